// linalg.cc

// Copyright 2026  The evadapt authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "evadapt/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "evadapt/error.h"

namespace evadapt {

CovarianceStats EstimateCovariance(const Eigen::MatrixXd &rows) {
  const Eigen::Index n = rows.rows(), d = rows.cols();
  if (n < 2)
    throw InsufficientDataError(
        "covariance estimation needs at least 2 samples, got " +
        std::to_string(n));
  if (!rows.allFinite())
    throw ValidationError("covariance input contains a non-finite value");

  // Sort rows into a canonical order so that the accumulation below (and
  // hence the result, bit for bit) does not depend on the order the caller
  // stored the samples in.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&rows, d](Eigen::Index a, Eigen::Index b) {
              for (Eigen::Index j = 0; j < d; ++j) {
                if (rows(a, j) < rows(b, j)) return true;
                if (rows(a, j) > rows(b, j)) return false;
              }
              return false;
            });
  Eigen::MatrixXd sorted(n, d);
  for (Eigen::Index i = 0; i < n; ++i) sorted.row(i) = rows.row(order[i]);

  CovarianceStats stats;
  stats.count = n;
  stats.mean = (sorted.colwise().sum() / static_cast<double>(n)).transpose();
  Eigen::MatrixXd centered = sorted.rowwise() - stats.mean.transpose();
  stats.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  stats.cov = 0.5 * (stats.cov + stats.cov.transpose()).eval();
  return stats;
}

CovarianceStats EstimateCovariance(const EmbeddingSet &set) {
  set.Validate();
  return EstimateCovariance(set.vectors);
}

EigenDecomposition SymEig(const Eigen::MatrixXd &m) {
  if (m.rows() != m.cols())
    throw ValidationError("eigendecomposition input must be square, got " +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  if (!m.allFinite())
    throw ValidationError("eigendecomposition input contains a non-finite "
                          "value");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale)
    throw ValidationError("matrix is asymmetric beyond tolerance (relative "
                          "asymmetry " + std::to_string(asym / scale) + ")");

  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition did not converge");

  // Eigen returns eigenvalues ascending; flip to descending and fix each
  // eigenvector's sign (first component with magnitude above 1e-12 made
  // positive).  The tolerance keeps the convention stable against roundoff
  // in components that are structurally zero.
  const Eigen::Index d = m.rows();
  EigenDecomposition eig;
  eig.values.resize(d);
  eig.vectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = d - 1 - k;
    eig.values(k) = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    eig.vectors.col(k) = v;
  }
  return eig;
}

Eigen::MatrixXd SymPower(const Eigen::MatrixXd &m, double p, double ridge) {
  if (ridge < 0.0)
    throw ValidationError("ridge must be non-negative, got " +
                          std::to_string(ridge));
  EigenDecomposition eig = SymEig(m);
  const Eigen::Index d = eig.values.size();

  const double max_eig = eig.values(0);
  const double psd_tol = 1e-10 * std::max(max_eig, 0.0);
  Eigen::VectorXd spectrum = eig.values;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (spectrum(i) < -psd_tol)
      throw NotPsdError("matrix has eigenvalue " + std::to_string(spectrum(i)) +
                        " below the PSD roundoff band");
    if (spectrum(i) < 0.0) spectrum(i) = 0.0;
    spectrum(i) += ridge;
  }

  if (p < 0.0) {
    const double max_r = spectrum(0), min_r = spectrum(d - 1);
    if (!(min_r > 1e-12 * max_r))
      throw SingularityError(
          "matrix is singular or too ill-conditioned for exponent " +
          std::to_string(p) + " (ridged spectrum range [" +
          std::to_string(min_r) + ", " + std::to_string(max_r) + "])");
  }

  Eigen::VectorXd powered(d);
  for (Eigen::Index i = 0; i < d; ++i) powered(i) = std::pow(spectrum(i), p);
  Eigen::MatrixXd result =
      eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (result + result.transpose()).eval();
}

}  // namespace evadapt
