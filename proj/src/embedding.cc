// embedding.cc

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

#include "evadapt/embedding.h"

#include <unordered_set>

#include "evadapt/error.h"

namespace evadapt {

void EmbeddingSet::Validate() const {
  const Eigen::Index n = vectors.rows(), d = vectors.cols();
  if (n < 1 || d < 1)
    throw ValidationError("embedding set must have N >= 1 rows and D >= 1 "
                          "columns, got N=" + std::to_string(n) +
                          " D=" + std::to_string(d));
  if (static_cast<Eigen::Index>(ids.size()) != n)
    throw ValidationError("embedding set has " + std::to_string(ids.size()) +
                          " ids but " + std::to_string(n) + " vector rows");
  std::unordered_set<std::string> seen;
  seen.reserve(ids.size());
  for (const std::string &id : ids) {
    if (id.empty())
      throw ValidationError("embedding set contains an empty utterance id");
    if (!seen.insert(id).second)
      throw ValidationError("duplicate utterance id '" + id + "'");
  }
  if (labels) {
    if (labels->size() != ids.size())
      throw ValidationError("embedding set has " +
                            std::to_string(labels->size()) + " labels but " +
                            std::to_string(ids.size()) + " ids");
    for (const std::string &label : *labels) {
      // "-" is the reserved unlabeled marker in the text format.
      if (label.empty() || label == "-")
        throw ValidationError("speaker labels, when present, must be "
                              "non-empty and must not be '-'");
    }
  }
  if (!vectors.allFinite())
    throw ValidationError("embedding set contains a non-finite value");
}

void TrialList::Validate() const {
  if (pairs.empty()) throw ValidationError("trial list is empty");
  if (keys && keys->size() != pairs.size())
    throw ValidationError("trial list has " + std::to_string(keys->size()) +
                          " keys but " + std::to_string(pairs.size()) +
                          " pairs");
}

void ScoreSet::Validate() const {
  if (pairs.empty()) throw ValidationError("score set is empty");
  if (scores.size() != pairs.size())
    throw ValidationError("score set has " + std::to_string(scores.size()) +
                          " scores but " + std::to_string(pairs.size()) +
                          " pairs");
  for (double s : scores)
    if (!std::isfinite(s))
      throw ValidationError("score set contains a non-finite score");
}

}  // namespace evadapt
