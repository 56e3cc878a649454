// evadapt/embedding.h

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

#ifndef EVADAPT_EMBEDDING_H_
#define EVADAPT_EMBEDDING_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace evadapt {

/// A set of N fixed-dimensional embedding vectors with utterance ids,
/// optional speaker labels and a domain tag.  Rows of `vectors` align 1:1
/// with `ids`.  Immutable by convention once validated; all operations take
/// it by const reference and return fresh sets.
struct EmbeddingSet {
  std::vector<std::string> ids;
  std::optional<std::vector<std::string>> labels;
  std::string domain;
  Eigen::MatrixXd vectors;  // N x D, one row per utterance

  Eigen::Index NumRows() const { return vectors.rows(); }
  Eigen::Index Dim() const { return vectors.cols(); }
  bool HasLabels() const { return labels.has_value(); }

  /// Throws ValidationError unless all invariants hold: N >= 1, D >= 1,
  /// ids unique, non-empty and aligned with rows, labels (if present)
  /// aligned and non-empty, every vector entry finite.
  void Validate() const;
};

/// A list of (enroll_id, test_id) pairs, optionally with ground-truth keys
/// (true = target, i.e. same speaker).
struct TrialList {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::optional<std::vector<bool>> keys;

  bool HasKeys() const { return keys.has_value(); }

  /// Throws ValidationError unless non-empty and keys (if present) align
  /// with pairs.
  void Validate() const;
};

/// Scores aligned with (enroll_id, test_id) pairs.
struct ScoreSet {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> scores;

  /// Throws ValidationError unless pairs/scores align, the set is
  /// non-empty and every score is finite.
  void Validate() const;
};

}  // namespace evadapt

#endif  // EVADAPT_EMBEDDING_H_
