// evadapt/metrics.cc

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

#include "evadapt/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "evadapt/error.h"

namespace evadapt {

DetCurve ComputeDetCurve(const ScoreSet &scores, const TrialList &keys) {
  scores.Validate();
  keys.Validate();
  if (!keys.HasKeys())
    throw ValidationError("trial list carries no target/nontarget keys");

  std::map<std::pair<std::string, std::string>, bool> key_of;
  for (size_t i = 0; i < keys.pairs.size(); i++) {
    auto [it, inserted] = key_of.emplace(keys.pairs[i], (*keys.keys)[i]);
    if (!inserted && it->second != (*keys.keys)[i])
      throw ValidationError("trial (" + keys.pairs[i].first + ", " +
                            keys.pairs[i].second +
                            ") is keyed both target and nontarget");
  }

  std::vector<double> targets, nontargets;
  for (size_t i = 0; i < scores.pairs.size(); i++) {
    auto it = key_of.find(scores.pairs[i]);
    if (it == key_of.end())
      throw ValidationError("no key for scored trial (" +
                            scores.pairs[i].first + ", " +
                            scores.pairs[i].second + ")");
    (it->second ? targets : nontargets).push_back(scores.scores[i]);
  }
  if (targets.empty())
    throw DegenerateKeysError("no target trials, DET curve undefined");
  if (nontargets.empty())
    throw DegenerateKeysError("no nontarget trials, DET curve undefined");

  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());

  DetCurve curve;
  curve.thresholds = scores.scores;
  std::sort(curve.thresholds.begin(), curve.thresholds.end());
  curve.thresholds.erase(
      std::unique(curve.thresholds.begin(), curve.thresholds.end()),
      curve.thresholds.end());
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());

  double n_t = static_cast<double>(targets.size());
  double n_n = static_cast<double>(nontargets.size());
  curve.p_miss.reserve(curve.thresholds.size());
  curve.p_fa.reserve(curve.thresholds.size());
  for (double t : curve.thresholds) {
    // Misses are targets below threshold (score >= t accepts).
    auto missed = std::lower_bound(targets.begin(), targets.end(), t) -
                  targets.begin();
    auto accepted_nt = nontargets.end() -
                       std::lower_bound(nontargets.begin(), nontargets.end(),
                                        t);
    curve.p_miss.push_back(static_cast<double>(missed) / n_t);
    curve.p_fa.push_back(static_cast<double>(accepted_nt) / n_n);
  }
  return curve;
}

double ComputeEer(const DetCurve &curve) {
  size_t n = curve.thresholds.size();
  if (n < 2 || curve.p_miss.size() != n || curve.p_fa.size() != n)
    throw ValidationError("malformed DET curve");
  // d = p_miss - p_fa runs from -1 to +1; find the first sign change and
  // intersect the two linear segments across it.
  size_t k = 0;
  while (k < n && curve.p_miss[k] - curve.p_fa[k] < 0.0) k++;
  if (k == 0 || k == n) throw ValidationError("DET curve has no crossing");
  size_t j = k - 1;
  double below = curve.p_fa[j] - curve.p_miss[j];  // > 0
  double above = curve.p_miss[k] - curve.p_fa[k];  // >= 0
  double s = below / (below + above);
  return curve.p_miss[j] + s * (curve.p_miss[k] - curve.p_miss[j]);
}

double ComputeMinCost(const DetCurve &curve, const CostParams &params) {
  size_t n = curve.thresholds.size();
  if (n == 0 || curve.p_miss.size() != n || curve.p_fa.size() != n)
    throw ValidationError("malformed DET curve");
  if (params.p_target.empty())
    throw ValidationError("no target priors given");
  if (!(params.c_miss > 0.0) || !(params.c_fa > 0.0))
    throw ValidationError("detection costs must be positive");

  double total = 0.0;
  for (double p : params.p_target) {
    if (!(p > 0.0) || !(p < 1.0))
      throw ValidationError("target prior must lie in (0, 1), got " +
                            std::to_string(p));
    double w_miss = params.c_miss * p;
    double w_fa = params.c_fa * (1.0 - p);
    double norm = std::min(w_miss, w_fa);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; i++)
      best = std::min(best,
                      (w_miss * curve.p_miss[i] + w_fa * curve.p_fa[i]) / norm);
    total += best;
  }
  return total / static_cast<double>(params.p_target.size());
}

}  // namespace evadapt
