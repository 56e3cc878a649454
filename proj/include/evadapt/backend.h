// evadapt/backend.h

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

#ifndef EVADAPT_BACKEND_H_
#define EVADAPT_BACKEND_H_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "evadapt/embedding.h"

namespace evadapt {

// The scoring back-end: centering, PCA, length normalization, LDA, and a
// two-covariance Gaussian PLDA, trained successively in that order.
// Embeddings are rows; every projection applies on the right.

/// Two-covariance PLDA: a speaker's latent mean y ~ N(mu, between) and
/// utterances scatter around it as x ~ N(y, within).  `between` is PSD,
/// `within` positive definite.
struct PldaParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
};

struct BackendModel {
  Eigen::VectorXd center_mean;          // D
  Eigen::MatrixXd pca;                  // D x d1, orthonormal columns
  std::optional<Eigen::MatrixXd> lda;   // d1 x d2
  std::optional<PldaParams> plda;       // fitted on lda outputs

  int64_t InputDim() const { return center_mean.size(); }
  int64_t PcaDim() const { return pca.cols(); }
  int64_t LdaDim() const { return lda ? lda->cols() : 0; }
};

/// How far through the stage chain to push an embedding.
enum class Depth { kCentered, kPca, kLnorm, kLda };

enum class Scoring { kPlda, kCosine };

/// Fits the full chain.  `train` must be labeled with at least 2
/// speakers and every speaker needs at least 2 utterances; the centering
/// mean is taken from `centering_set` (callers typically pass in-domain
/// data).  Constraints: 1 <= d1 <= D, 1 <= d2 <= min(d1, speakers - 1).
/// Throws ValidationError on dimension constraint violations or missing
/// labels, InsufficientDataError when speakers or utterances are too few
/// (including a singular within-speaker covariance).
BackendModel FitBackend(const EmbeddingSet &train,
                        const EmbeddingSet &centering_set, int64_t d1,
                        int64_t d2);

/// Partial fit for cosine-only use: centering and PCA, no supervision
/// needed.  The returned model has no lda/plda stages.
BackendModel FitCenterPca(const EmbeddingSet &train,
                          const EmbeddingSet &centering_set, int64_t d1);

/// Runs one embedding through the chain up to `depth`.  Throws
/// DegenerateInputError when the vector is zero at the length
/// normalization stage and StateError when a requested stage is absent.
Eigen::VectorXd TransformEmbedding(const BackendModel &model,
                                   const Eigen::VectorXd &x, Depth depth);

/// Verification log-likelihood ratio of the two-covariance model:
/// log p(e, t | same speaker) - log p(e, t | different speakers).
/// Inputs are lda-depth vectors.  Exactly symmetric in its arguments.
/// Precomputes the three inverse covariances once; reuse it across
/// trials.
class PldaScorer {
 public:
  /// Throws SingularityError when a required covariance is not positive
  /// definite and ValidationError on malformed parameters.
  explicit PldaScorer(const PldaParams &params);

  double Score(const Eigen::VectorXd &enroll,
               const Eigen::VectorXd &test) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd inv_sum_;     // (within + 2 between)^{-1}
  Eigen::MatrixXd inv_within_;  // within^{-1}
  Eigen::MatrixXd inv_total_;   // (between + within)^{-1}
  double logdet_sum_ = 0.0;
  double logdet_within_ = 0.0;
  double logdet_total_ = 0.0;
};

/// One-shot convenience wrapper around PldaScorer.  Throws StateError
/// when the model has no fitted PLDA stage.
double PldaScore(const BackendModel &model, const Eigen::VectorXd &enroll,
                 const Eigen::VectorXd &test);

/// cos(e, t) in [-1, 1].  Throws DegenerateInputError on a zero vector.
double CosineScore(const Eigen::VectorXd &enroll,
                   const Eigen::VectorXd &test);

/// Scores every trial pair, order preserved.  Enrollment ids resolve in
/// `enroll`, test ids in `test`.  PLDA scoring transforms to lda depth;
/// cosine scoring transforms to `cosine_depth` (the LDA stage is tied to
/// PLDA supervision, so cosine defaults to the length-normalized PCA
/// space).  Throws LookupError naming any unresolvable id.
ScoreSet ScoreTrials(const BackendModel &model, const EmbeddingSet &enroll,
                     const EmbeddingSet &test, const TrialList &trials,
                     Scoring scoring, Depth cosine_depth = Depth::kLnorm);

/// Binary serialization (magic "BKD1"); partial (cosine-only) models are
/// supported via a stage-presence bitmask.  Round-trips bit-exactly.
void WriteBackendModel(const BackendModel &model, const std::string &path);
BackendModel ReadBackendModel(const std::string &path);

}  // namespace evadapt

#endif  // EVADAPT_BACKEND_H_
