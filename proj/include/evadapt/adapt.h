// evadapt/adapt.h

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

#ifndef EVADAPT_ADAPT_H_
#define EVADAPT_ADAPT_H_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "evadapt/embedding.h"

namespace evadapt {

// Feature-space domain adaptation.  The fits below estimate a linear map
// that pulls out-of-domain (training) embeddings toward the second-order
// statistics of unlabeled in-domain data.  Everything uses the row-vector
// convention: an adapted row is x_hat = (x - pre_shift) * matrix +
// post_shift.
//
// CORAL whitens with the out-of-domain covariance and re-colors with the
// in-domain one.  The fDA variant additionally aligns domain means and
// floors at 1 the spectrum of the in-domain covariance expressed in the
// whitened space, so no direction is ever shrunk.  The ++ variant
// z-score-normalizes the in-domain eigenvalue spectrum, floors it at
// alpha, and regularizes both covariances with lambda*I.  The z-scored
// spectrum is O(1) regardless of the input scale, so the transform
// rescales embeddings globally; downstream length normalization makes
// that harmless.

enum class AdaptMethod { kIdentity, kCoral, kFda, kCoralPP };

struct CoralPPConfig {
  double lambda = 0.1;  // covariance regularizer, must be > 0
  double alpha = 0.5;   // spectrum floor, must be >= 0
};

/// Diagnostic record of the spectrum manipulation: raw descending
/// eigenvalues s, z-scored values s_hat, and floored values
/// v_i = max(alpha, s_hat_i).
struct EigSpectrum {
  Eigen::VectorXd raw;
  Eigen::VectorXd normalized;
  Eigen::VectorXd floored;
  double alpha = 0.0;
};

struct AdaptationTransform {
  Eigen::MatrixXd matrix;      // D x D, applied on the right of a row
  Eigen::VectorXd pre_shift;   // subtracted before the map
  Eigen::VectorXd post_shift;  // added after the map
  AdaptMethod method = AdaptMethod::kIdentity;
  std::optional<CoralPPConfig> params;  // set for method == kCoralPP
  std::optional<EigSpectrum> spectrum;  // set for method == kCoralPP

  int64_t Dim() const { return matrix.rows(); }
};

/// The do-nothing baseline: matrix = I, zero shifts.
AdaptationTransform IdentityTransform(int64_t dim);

/// Classic whiten-then-recolor fit with a fixed unit regularizer:
/// matrix = (C_ood + I)^{-1/2} (C_ind + I)^{1/2}, no mean shifts.
/// Throws ValidationError on dimension mismatch; covariance estimation
/// errors propagate.
AdaptationTransform CoralFit(const EmbeddingSet &ood,
                             const EmbeddingSet &ind);

/// Same map with a caller-chosen ridge; ridge = 0 gives the exact
/// minimizer of || A^T C_ood A - C_ind ||_F for positive-definite C_ood
/// and throws SingularityError when C_ood is singular.
AdaptationTransform CoralFitExact(const EmbeddingSet &ood,
                                  const EmbeddingSet &ind, double ridge);

/// Mean alignment plus spectrum-floored covariance alignment.  With
/// W = C_ood^{-1/2} and the eigendecomposition W C_ind W = P Delta P^T,
/// directions where Delta < 1 are left unscaled (floor at 1):
/// matrix = W P max(1, Delta)^{1/2} P^T W^{-1}, pre_shift = mean(ood),
/// post_shift = mean(ind).  A relative ridge is added to C_ood only when
/// it is numerically rank-deficient.
AdaptationTransform FdaFit(const EmbeddingSet &ood, const EmbeddingSet &ind);

/// Z-scores a spectrum: (s - mean) / stddev with the population (divisor
/// n) standard deviation.  Preserves ordering.  Throws
/// DegenerateSpectrumError when n < 2 or all values are equal.
Eigen::VectorXd ZScoreSpectrum(const Eigen::VectorXd &s);

/// Elementwise max(alpha, s).  Throws ValidationError for alpha < 0.
Eigen::VectorXd FloorSpectrum(const Eigen::VectorXd &s, double alpha);

/// The spectrum surgery at the heart of the ++ fit, exposed for
/// inspection: eigendecompose cov = P diag(s) P^T, z-score and floor s,
/// and rebuild with the original eigenvectors.  `regularized` is
/// P diag(v) P^T, i.e. the rebuilt covariance before the lambda*I term.
struct CoralPPParts {
  EigSpectrum spectrum;
  Eigen::MatrixXd vectors;      // P, columns are eigenvectors
  Eigen::MatrixXd regularized;  // P diag(floored) P^T
};
CoralPPParts CoralPPRegularize(const Eigen::MatrixXd &cov,
                               const CoralPPConfig &cfg);

/// The ++ fit: matrix = (C_ood + lambda I)^{-1/2} (P diag(v) P^T +
/// lambda I)^{1/2} with v the z-scored, alpha-floored spectrum of
/// C_ind.  No mean shifts.  The returned transform carries the spectrum
/// and the config.  Throws DegenerateSpectrumError when the in-domain
/// spectrum is constant, ValidationError for invalid config.
AdaptationTransform CoralPPFit(const EmbeddingSet &ood,
                               const EmbeddingSet &ind,
                               const CoralPPConfig &cfg);

/// Maps every row through the transform; ids, labels and domain are
/// preserved.  The identity method returns a verbatim copy.  Throws
/// ValidationError on dimension mismatch.
EmbeddingSet ApplyTransform(const AdaptationTransform &t,
                            const EmbeddingSet &set);

/// Binary serialization (magic "ADT1").  The spectrum diagnostic is not
/// stored; a round-tripped ++ transform keeps its config but loses the
/// spectrum record.
void WriteTransform(const AdaptationTransform &t, const std::string &path);
AdaptationTransform ReadTransform(const std::string &path);

}  // namespace evadapt

#endif  // EVADAPT_ADAPT_H_
