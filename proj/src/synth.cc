// evadapt/synth.cc

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

#include "evadapt/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "evadapt/error.h"
#include "evadapt/metrics.h"

namespace evadapt {

namespace {

// Evaluation-set sizing: up to this many held-out target speakers, one
// enrollment and three test utterances each (all-pairs trials stay small
// while every operating point has enough of both key types).
constexpr int64_t kMaxEvalSpeakers = 100;
constexpr int64_t kTestUttsPerSpeaker = 3;
// Default back-end dimensions when the caller passes 0, clamped to the
// feasible range of the generated data.
constexpr int64_t kDefaultPcaDim = 200;
constexpr int64_t kDefaultLdaDim = 100;
// Offset mixed into the seed for adaptation-subset sampling so it does
// not replay the generation stream.
constexpr uint64_t kSubsampleSeedOffset = 1000003;

// Box-Muller on top of a fixed-width engine.  std::normal_distribution
// is implementation-defined; this keeps generated corpora bit-identical
// across standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1]: 53 high bits, shifted off zero so log() is safe.
  double Uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double Next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(Uniform()));
    double angle = 2.0 * M_PI * Uniform();
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  Eigen::VectorXd Vector(int64_t n) {
    Eigen::VectorXd v(n);
    for (int64_t i = 0; i < n; i++) v(i) = Next();
    return v;
  }

  Eigen::MatrixXd Matrix(int64_t rows, int64_t cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int64_t i = 0; i < rows; i++)
      for (int64_t j = 0; j < cols; j++) m(i, j) = Next();
    return m;
  }

  uint64_t Raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::string Format(const char *fmt, int64_t a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, static_cast<long long>(a));
  return buf;
}

std::string Format2(const char *fmt, int64_t a, int64_t b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, static_cast<long long>(a),
                static_cast<long long>(b));
  return buf;
}

// Random rotation with a controlled angle: a random skew-symmetric
// direction K (unit spectral norm) scaled so the Cayley transform
// (I + K/2)(I - K/2)^{-1} rotates its fastest plane by
// rotation_strength * pi/2.  Strength 0 short-circuits to exact I.
Eigen::MatrixXd RandomRotation(int64_t dim, double strength,
                               GaussianSampler *rng) {
  if (strength == 0.0 || dim < 2)
    return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd g = rng->Matrix(dim, dim);
  Eigen::MatrixXd skew = 0.5 * (g - g.transpose());
  double norm = skew.jacobiSvd().singularValues()(0);
  if (!(norm > 0.0)) return Eigen::MatrixXd::Identity(dim, dim);
  // Cayley maps a plane with skew eigenvalue ik to a rotation by
  // 2*atan(k/2); scaling the unit-norm direction by 2*tan(angle/2) makes
  // the largest plane rotate by exactly `angle`.
  double angle = strength * M_PI / 2.0;
  skew *= 2.0 * std::tan(angle / 2.0) / norm;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
  return (eye + 0.5 * skew) *
         (eye - 0.5 * skew).partialPivLu().solve(eye);
}

Eigen::VectorXd AxisScales(int64_t dim, double anisotropy) {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(dim);
  if (dim < 2 || anisotropy == 1.0) return s;
  // Geometric ladder from sqrt(a) down to 1/sqrt(a): condition number a,
  // determinant 1 so the distortion preserves volume.
  for (int64_t i = 0; i < dim; i++)
    s(i) = std::pow(anisotropy,
                    0.5 - static_cast<double>(i) /
                              static_cast<double>(dim - 1));
  return s;
}

}  // namespace

void DomainShiftSpec::Validate() const {
  if (dim < 1)
    throw ValidationError("dim must be positive");
  if (n_speakers < 2)
    throw ValidationError("need at least 2 speakers");
  if (utts_per_speaker < 1)
    throw ValidationError("utts_per_speaker must be positive");
  if (!(between_scale > 0.0) || !(within_scale > 0.0))
    throw ValidationError("scales must be positive");
  if (!(rotation_strength >= 0.0) || !(rotation_strength <= 1.0))
    throw ValidationError("rotation_strength must lie in [0, 1]");
  if (!(anisotropy >= 1.0))
    throw ValidationError("anisotropy must be at least 1");
  if (dim == 1 && anisotropy != 1.0)
    throw ValidationError("anisotropy requires dim >= 2");
  if (!(mean_shift_norm >= 0.0))
    throw ValidationError("mean_shift_norm must be non-negative");
}

GeneratedBenchmark Generate(const DomainShiftSpec &spec) {
  spec.Validate();
  GaussianSampler rng(spec.seed);
  int64_t d = spec.dim;

  GeneratedBenchmark bench;
  bench.rotation = RandomRotation(d, spec.rotation_strength, &rng);
  bench.axis_scales = AxisScales(d, spec.anisotropy);
  if (spec.mean_shift_norm > 0.0) {
    Eigen::VectorXd dir = rng.Vector(d);
    double norm = dir.norm();
    bench.mean_shift = norm > 0.0
                           ? (dir * (spec.mean_shift_norm / norm)).eval()
                           : Eigen::VectorXd::Zero(d);
  } else {
    bench.mean_shift = Eigen::VectorXd::Zero(d);
  }
  // Column-vector distortion y = R S x + m; as row vectors that is
  // y_row = x_row S R^T + m^T.
  Eigen::MatrixXd distort_row =
      bench.axis_scales.asDiagonal() * bench.rotation.transpose();

  // Explicit return type: the sum must be materialized before the noise
  // temporary dies, an expression template here would dangle.
  auto draw_utterance = [&](const Eigen::VectorXd &latent) -> Eigen::VectorXd {
    return latent + spec.within_scale * rng.Vector(d);
  };

  // Source domain: labeled training speakers, undistorted.
  bench.source.domain = "source";
  bench.source.labels.emplace();
  bench.source.vectors.resize(spec.n_speakers * spec.utts_per_speaker, d);
  for (int64_t s = 0; s < spec.n_speakers; s++) {
    Eigen::VectorXd latent = spec.between_scale * rng.Vector(d);
    for (int64_t u = 0; u < spec.utts_per_speaker; u++) {
      int64_t row = s * spec.utts_per_speaker + u;
      bench.source.vectors.row(row) = draw_utterance(latent).transpose();
      bench.source.ids.push_back(Format2("src_spk%04lld_u%02lld", s, u));
      bench.source.labels->push_back(Format("spk%04lld", s));
    }
  }

  // Target adaptation pool: a fresh speaker population, distorted,
  // shipped without labels.
  bench.target_adapt.domain = "target";
  bench.target_adapt.vectors.resize(spec.n_speakers * spec.utts_per_speaker,
                                    d);
  for (int64_t s = 0; s < spec.n_speakers; s++) {
    Eigen::VectorXd latent = spec.between_scale * rng.Vector(d);
    for (int64_t u = 0; u < spec.utts_per_speaker; u++) {
      int64_t row = s * spec.utts_per_speaker + u;
      bench.target_adapt.vectors.row(row) =
          draw_utterance(latent).transpose() * distort_row +
          bench.mean_shift.transpose();
      bench.target_adapt.ids.push_back(
          Format2("adp_spk%04lld_u%02lld", s, u));
    }
  }

  // Evaluation speakers: disjoint again, one enrollment and several test
  // utterances each, all distorted.
  int64_t n_eval = std::min<int64_t>(kMaxEvalSpeakers, spec.n_speakers);
  bench.target_enroll.domain = "target";
  bench.target_enroll.labels.emplace();
  bench.target_enroll.vectors.resize(n_eval, d);
  bench.target_test.domain = "target";
  bench.target_test.labels.emplace();
  bench.target_test.vectors.resize(n_eval * kTestUttsPerSpeaker, d);
  for (int64_t s = 0; s < n_eval; s++) {
    Eigen::VectorXd latent = spec.between_scale * rng.Vector(d);
    bench.target_enroll.vectors.row(s) =
        draw_utterance(latent).transpose() * distort_row +
        bench.mean_shift.transpose();
    bench.target_enroll.ids.push_back(Format("enr_spk%04lld", s));
    bench.target_enroll.labels->push_back(Format("espk%04lld", s));
    for (int64_t u = 0; u < kTestUttsPerSpeaker; u++) {
      int64_t row = s * kTestUttsPerSpeaker + u;
      bench.target_test.vectors.row(row) =
          draw_utterance(latent).transpose() * distort_row +
          bench.mean_shift.transpose();
      bench.target_test.ids.push_back(
          Format2("tst_spk%04lld_u%02lld", s, u));
      bench.target_test.labels->push_back(Format("espk%04lld", s));
    }
  }

  bench.trials.keys.emplace();
  for (int64_t e = 0; e < n_eval; e++)
    for (int64_t t = 0; t < n_eval * kTestUttsPerSpeaker; t++) {
      bench.trials.pairs.emplace_back(bench.target_enroll.ids[e],
                                      bench.target_test.ids[t]);
      bench.trials.keys->push_back(t / kTestUttsPerSpeaker == e);
    }

  return bench;
}

EmbeddingSet SubsampleEmbeddings(const EmbeddingSet &set, double fraction,
                                 uint64_t seed) {
  set.Validate();
  if (!(fraction > 0.0) || !(fraction <= 1.0))
    throw ValidationError("subsample fraction must lie in (0, 1]");
  int64_t n = set.NumRows();
  int64_t keep = std::llround(fraction * static_cast<double>(n));
  keep = std::min(n, std::max<int64_t>(2, keep));
  if (keep == n) return set;

  // Partial Fisher-Yates with an explicit engine; the modulo bias is
  // irrelevant at these sizes and keeps the draw bit-stable everywhere.
  std::mt19937_64 engine(seed);
  std::vector<int64_t> order(n);
  for (int64_t i = 0; i < n; i++) order[i] = i;
  for (int64_t i = 0; i < keep; i++) {
    int64_t j = i + static_cast<int64_t>(
                        engine() % static_cast<uint64_t>(n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<int64_t> chosen(order.begin(), order.begin() + keep);
  std::sort(chosen.begin(), chosen.end());

  EmbeddingSet out;
  out.domain = set.domain;
  if (set.HasLabels()) out.labels.emplace();
  out.vectors.resize(keep, set.Dim());
  for (int64_t i = 0; i < keep; i++) {
    out.vectors.row(i) = set.vectors.row(chosen[i]);
    out.ids.push_back(set.ids[static_cast<size_t>(chosen[i])]);
    if (set.HasLabels())
      out.labels->push_back((*set.labels)[static_cast<size_t>(chosen[i])]);
  }
  return out;
}

ExperimentResult RunExperiment(const DomainShiftSpec &spec,
                               AdaptMethod method, const CoralPPConfig &cfg,
                               Scoring scoring, double adapt_fraction,
                               int64_t d1, int64_t d2) {
  GeneratedBenchmark bench = Generate(spec);
  EmbeddingSet adapt_set =
      adapt_fraction < 1.0
          ? SubsampleEmbeddings(bench.target_adapt, adapt_fraction,
                                spec.seed + kSubsampleSeedOffset)
          : bench.target_adapt;

  AdaptationTransform transform;
  switch (method) {
    case AdaptMethod::kIdentity:
      transform = IdentityTransform(spec.dim);
      break;
    case AdaptMethod::kCoral:
      transform = CoralFit(bench.source, adapt_set);
      break;
    case AdaptMethod::kFda:
      transform = FdaFit(bench.source, adapt_set);
      break;
    case AdaptMethod::kCoralPP:
      transform = CoralPPFit(bench.source, adapt_set, cfg);
      break;
  }
  EmbeddingSet adapted = ApplyTransform(transform, bench.source);

  int64_t d1_eff = std::min(d1 > 0 ? d1 : kDefaultPcaDim, spec.dim);
  int64_t d2_eff = std::min({d2 > 0 ? d2 : kDefaultLdaDim, d1_eff,
                             spec.n_speakers - 1});
  BackendModel model = FitBackend(adapted, adapt_set, d1_eff, d2_eff);
  ScoreSet scores = ScoreTrials(model, bench.target_enroll,
                                bench.target_test, bench.trials, scoring);
  DetCurve curve = ComputeDetCurve(scores, bench.trials);
  ExperimentResult result;
  result.eer = ComputeEer(curve);
  result.min_cost = ComputeMinCost(curve, CostParams{});
  return result;
}

ExperimentResult RunExperimentMedian(const DomainShiftSpec &spec,
                                     AdaptMethod method,
                                     const CoralPPConfig &cfg,
                                     Scoring scoring, double adapt_fraction,
                                     int64_t d1, int64_t d2) {
  double eers[3], costs[3];
  for (int i = 0; i < 3; i++) {
    DomainShiftSpec s = spec;
    s.seed = spec.seed + static_cast<uint64_t>(i);
    ExperimentResult r =
        RunExperiment(s, method, cfg, scoring, adapt_fraction, d1, d2);
    eers[i] = r.eer;
    costs[i] = r.min_cost;
  }
  std::sort(eers, eers + 3);
  std::sort(costs, costs + 3);
  return ExperimentResult{eers[1], costs[1]};
}

}  // namespace evadapt
