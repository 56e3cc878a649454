// evadapt/synth.h

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

#ifndef EVADAPT_SYNTH_H_
#define EVADAPT_SYNTH_H_

#include <cstdint>

#include <Eigen/Dense>

#include "evadapt/adapt.h"
#include "evadapt/backend.h"
#include "evadapt/embedding.h"

namespace evadapt {

// Synthetic cross-domain benchmark.  Speakers are latent identities
// y ~ N(0, between_scale^2 I); utterances scatter as x = y + e with
// e ~ N(0, within_scale^2 I).  The target domain sees every utterance
// through a fixed affine distortion x -> R S x + m, where R is a random
// rotation whose angle grows with rotation_strength (0 keeps R = I,
// 1 rotates the most-rotated plane by pi/2), S is a volume-preserving
// diagonal ladder with condition number `anisotropy`, and |m| =
// mean_shift_norm.  Source and target speaker pools are disjoint.

struct DomainShiftSpec {
  int64_t dim = 32;
  int64_t n_speakers = 200;
  int64_t utts_per_speaker = 10;
  double between_scale = 2.5;
  double within_scale = 1.2;
  double rotation_strength = 0.0;  // in [0, 1]
  double anisotropy = 1.0;         // >= 1, largest/smallest axis scale
  double mean_shift_norm = 0.0;    // >= 0
  uint64_t seed = 0;

  /// Throws ValidationError on out-of-range fields.
  void Validate() const;
};

struct GeneratedBenchmark {
  EmbeddingSet source;         // labeled, domain "source"
  EmbeddingSet target_adapt;   // unlabeled, domain "target"
  EmbeddingSet target_enroll;  // one utterance per evaluation speaker
  EmbeddingSet target_test;    // three utterances per evaluation speaker
  TrialList trials;            // all enroll x test pairs, keyed

  // The distortion, exposed so tests can build an oracle adaptor.
  Eigen::MatrixXd rotation;     // R
  Eigen::VectorXd axis_scales;  // diagonal of S
  Eigen::VectorXd mean_shift;   // m
};

/// Deterministic generation: the same spec yields bitwise-identical
/// output (a fixed random stream feeds distortion, then source, then
/// adaptation, then evaluation draws).
GeneratedBenchmark Generate(const DomainShiftSpec &spec);

/// Deterministic random subset of round(fraction * N) rows (at least 2,
/// original order preserved).  fraction must lie in (0, 1].
EmbeddingSet SubsampleEmbeddings(const EmbeddingSet &set, double fraction,
                                 uint64_t seed);

struct ExperimentResult {
  double eer = 0.0;
  double min_cost = 0.0;
};

/// One full pipeline run: generate, fit the chosen adaptation on
/// (source, target_adapt), adapt the source, fit the back-end on the
/// adapted source with the adaptation set as centering data, score the
/// target trials, compute metrics.  adapt_fraction < 1 subsamples the
/// adaptation set first.  d1/d2 of 0 pick the defaults (200/100) clamped
/// to the feasible range for the generated data.
ExperimentResult RunExperiment(const DomainShiftSpec &spec,
                               AdaptMethod method, const CoralPPConfig &cfg,
                               Scoring scoring, double adapt_fraction = 1.0,
                               int64_t d1 = 0, int64_t d2 = 0);

/// Runs at seeds {seed, seed+1, seed+2} and returns the per-metric
/// medians.
ExperimentResult RunExperimentMedian(const DomainShiftSpec &spec,
                                     AdaptMethod method,
                                     const CoralPPConfig &cfg,
                                     Scoring scoring,
                                     double adapt_fraction = 1.0,
                                     int64_t d1 = 0, int64_t d2 = 0);

}  // namespace evadapt

#endif  // EVADAPT_SYNTH_H_
