// evadapt/metrics.h

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

#ifndef EVADAPT_METRICS_H_
#define EVADAPT_METRICS_H_

#include <vector>

#include "evadapt/embedding.h"

namespace evadapt {

/// Detection error tradeoff as a step function over score thresholds.
/// Convention: a trial is accepted iff its score >= threshold (ties
/// accept).  Thresholds are the sorted distinct scores plus a +infinity
/// sentinel, so the curve always starts at (p_miss, p_fa) = (0, 1) and
/// ends at (1, 0).  p_miss is non-decreasing and p_fa non-increasing
/// along the threshold axis.
struct DetCurve {
  std::vector<double> thresholds;
  std::vector<double> p_miss;
  std::vector<double> p_fa;
};

/// Detection cost parameters.  The cost is averaged over the target
/// priors; defaults follow common telephone-speech evaluation practice.
struct CostParams {
  std::vector<double> p_target{0.01, 0.005};
  double c_miss = 1.0;
  double c_fa = 1.0;
};

/// Joins scores with their trial keys and builds the DET curve.
/// Throws ValidationError when a scored pair has no key (or the list is
/// unkeyed, or a pair is keyed inconsistently) and DegenerateKeysError
/// when all trials are targets or all are nontargets.
DetCurve ComputeDetCurve(const ScoreSet &scores, const TrialList &keys);

/// Equal error rate in [0, 1]: the crossing of the linearly interpolated
/// p_miss and p_fa.  The interpolation convention matters at O(1/N) on
/// small sets; this one intersects the two segments bracketing the sign
/// change of p_miss - p_fa.
double ComputeEer(const DetCurve &curve);

/// Minimum normalized detection cost: for each prior p, the minimum over
/// thresholds of (c_miss*p*p_miss + c_fa*(1-p)*p_fa) normalized by
/// min(c_miss*p, c_fa*(1-p)), averaged over priors.  Never exceeds 1.
double ComputeMinCost(const DetCurve &curve, const CostParams &params);

}  // namespace evadapt

#endif  // EVADAPT_METRICS_H_
