// evadapt/linalg.h

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

#ifndef EVADAPT_LINALG_H_
#define EVADAPT_LINALG_H_

#include <cstdint>

#include <Eigen/Core>

#include "evadapt/embedding.h"

namespace evadapt {

/// First and second moments of a sample of D-dimensional vectors.
/// `cov` is the unbiased (divisor N-1) sample covariance, symmetric by
/// construction.
struct CovarianceStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::int64_t count = 0;
};

/// Eigendecomposition of a symmetric matrix: columns of `vectors` are
/// orthonormal eigenvectors, `values` holds the matching eigenvalues in
/// descending order.  The sign of each eigenvector is fixed so that its
/// first component of non-negligible magnitude is positive, which makes
/// the output unique outside degenerate (repeated-eigenvalue) subspaces.
struct EigenDecomposition {
  Eigen::MatrixXd vectors;  // D x D, columns are eigenvectors
  Eigen::VectorXd values;   // descending
};

/// Column means and unbiased sample covariance of the rows of `rows`.
/// Rows are accumulated in a canonical (lexicographically sorted) order,
/// so permuting the input rows leaves the result bit-identical.
/// Throws InsufficientDataError when N < 2 and ValidationError on
/// non-finite input.
CovarianceStats EstimateCovariance(const Eigen::MatrixXd &rows);

/// Convenience overload over an embedding set's vectors.
CovarianceStats EstimateCovariance(const EmbeddingSet &set);

/// Eigendecomposition of a symmetric matrix via the symmetric QR method.
/// The input must be symmetric to 1e-9 relative (max |m - m^T| over
/// max |m|); it is explicitly symmetrized before factorization.
/// Deterministic: the same input yields bitwise-identical output.
/// Throws ValidationError for asymmetric or non-finite input and
/// NumericalError if the solver fails to converge.
EigenDecomposition SymEig(const Eigen::MatrixXd &m);

/// (m + ridge*I)^p for symmetric positive semi-definite m, computed as
/// P diag((s_i + ridge)^p) P^T from the eigendecomposition of m.
/// Eigenvalues in [-1e-10 * s_max, 0) are treated as roundoff and clamped
/// to zero; anything more negative throws NotPsdError.  For p < 0 the
/// ridged spectrum must satisfy min > 1e-12 * max or SingularityError is
/// thrown.
Eigen::MatrixXd SymPower(const Eigen::MatrixXd &m, double p, double ridge);

}  // namespace evadapt

#endif  // EVADAPT_LINALG_H_
