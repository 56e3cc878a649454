// tests/acceptance.cc

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
// See the Apache 2 License for the specific language governing permissions
// and limitations under the License.

// Release gate: eight self-contained checks, one PASS/FAIL line each,
// nonzero exit when anything fails.  Each check carries its own oracle
// (analytic value, brute-force search, or quadrature) so a regression in
// the library cannot hide behind a matching regression in the test.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evadapt/adapt.h"
#include "evadapt/backend.h"
#include "evadapt/embedio.h"
#include "evadapt/error.h"
#include "evadapt/linalg.h"
#include "evadapt/metrics.h"
#include "evadapt/synth.h"
#include "oracles.h"
#include "test_util.h"

#ifndef EVADAPT_CLI_PATH
#error "EVADAPT_CLI_PATH must point at the evadapt binary"
#endif

namespace evadapt {
namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

Outcome Pass(const std::string &detail) { return {true, detail}; }
Outcome Fail(const std::string &detail) { return {false, detail}; }

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Rows {+a_i e_i, -a_i e_i} have exact zero mean and exact diagonal
// sample covariance diag(2 a_i^2 / (2D - 1)).
EmbeddingSet DiagonalCovSet(const Eigen::VectorXd &target_diag,
                            const std::string &prefix) {
  int64_t d = target_diag.size();
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(2 * d, d);
  for (int64_t i = 0; i < d; i++) {
    double a = std::sqrt(target_diag(i) * static_cast<double>(2 * d - 1) /
                         2.0);
    rows(2 * i, i) = a;
    rows(2 * i + 1, i) = -a;
  }
  return test::MakeSet(rows, prefix);
}

double CoralObjective(const Eigen::MatrixXd &a, const Eigen::MatrixXd &c_o,
                      const Eigen::MatrixXd &c_i) {
  return (a.transpose() * c_o * a - c_i).norm();
}

// ---------------------------------------------------------------------
// 1. The exact whiten-recolor transform minimizes the covariance
//    transport objective.
Outcome CheckCoralOptimality() {
  auto start = std::chrono::steady_clock::now();
  test::TestRng rng(101);
  const int64_t kDim = 16;
  const int64_t kRows = 500;
  double worst_rel = 0.0;
  int increases = 0;
  int perturbations = 0;
  for (int inst = 0; inst < 20; inst++) {
    Eigen::MatrixXd cov_o = test::RandomSpd(kDim, &rng);
    Eigen::MatrixXd cov_i = test::RandomSpd(kDim, &rng);
    EmbeddingSet ood = test::MakeSet(
        test::GaussianRows(kRows, rng.Vector(kDim), cov_o, &rng), "o");
    EmbeddingSet ind = test::MakeSet(
        test::GaussianRows(kRows, rng.Vector(kDim), cov_i, &rng), "i");
    AdaptationTransform t = CoralFitExact(ood, ind, 0.0);
    Eigen::MatrixXd c_o = EstimateCovariance(ood.vectors).cov;
    Eigen::MatrixXd c_i = EstimateCovariance(ind.vectors).cov;
    double rel = CoralObjective(t.matrix, c_o, c_i) / c_i.norm();
    worst_rel = std::max(worst_rel, rel);
    double base = CoralObjective(t.matrix, c_o, c_i);
    for (int p = 0; p < 5; p++) {
      Eigen::MatrixXd dir = rng.Matrix(kDim, kDim);
      dir *= 1e-3 / dir.norm();
      perturbations++;
      if (CoralObjective(t.matrix + dir, c_o, c_i) > base) increases++;
    }
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (worst_rel >= 1e-6)
    return Fail("transport residual " + Num(worst_rel));
  if (increases != perturbations)
    return Fail(std::to_string(perturbations - increases) +
                " perturbations did not increase the objective");
  if (secs >= 5.0) return Fail("took " + Num(secs) + "s");
  return Pass("residual<=" + Num(worst_rel) + ", " +
              std::to_string(increases) + "/100 perturbations worse, " +
              Num(secs) + "s");
}

// ---------------------------------------------------------------------
// 2. Spectrum surgery: z-score stats, rebuilt eigenvalues, eigenvector
//    preservation, and the 2x2 diagonal hand trace.
Outcome CheckSpectrumContract() {
  test::TestRng rng(202);
  const int64_t kDim = 12;
  CoralPPConfig cfg;  // lambda 0.1, alpha 0.5
  for (int inst = 0; inst < 10; inst++) {
    Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(
                                rng.Matrix(kDim, kDim))
                                .householderQ();
    Eigen::VectorXd eigs(kDim);
    for (int64_t i = 0; i < kDim; i++)
      eigs(i) = 0.2 + 0.7 * static_cast<double>(kDim - i) +
                0.2 * std::abs(rng.Gauss());
    Eigen::MatrixXd cov = basis * eigs.asDiagonal() * basis.transpose();
    cov = ((cov + cov.transpose()) / 2.0).eval();

    CoralPPParts parts = CoralPPRegularize(cov, cfg);
    Eigen::VectorXd normalized = parts.spectrum.normalized;
    double mean = normalized.mean();
    double var = (normalized.array() - mean).square().sum() /
                 static_cast<double>(kDim);
    if (std::abs(mean) >= 1e-12)
      return Fail("z-score mean " + Num(mean));
    if (std::abs(std::sqrt(var) - 1.0) >= 1e-12)
      return Fail("z-score std off by " + Num(std::sqrt(var) - 1.0));

    Eigen::VectorXd expected =
        FloorSpectrum(ZScoreSpectrum(parts.spectrum.raw), cfg.alpha);
    EigenDecomposition redone = SymEig(parts.regularized);
    double eig_err = (redone.values - expected).cwiseAbs().maxCoeff();
    if (eig_err >= 1e-10)
      return Fail("rebuilt eigenvalues off by " + Num(eig_err));

    EigenDecomposition original = SymEig(cov);
    for (int64_t i = 0; i < kDim; i++) {
      bool gap_above = i == 0 || expected(i - 1) - expected(i) > 1e-6;
      bool gap_below =
          i == kDim - 1 || expected(i) - expected(i + 1) > 1e-6;
      if (!gap_above || !gap_below) continue;
      double align =
          std::abs(redone.vectors.col(i).dot(original.vectors.col(i)));
      if (std::abs(align - 1.0) >= 1e-8)
        return Fail("eigenvector " + std::to_string(i) + " misaligned (" +
                    Num(align) + ")");
    }
  }

  // Hand trace: C_ood = I, C_ind = diag(4, 1) at lambda 0.1, alpha 0.5.
  EmbeddingSet ood = DiagonalCovSet(Eigen::Vector2d(1.0, 1.0), "o");
  EmbeddingSet ind = DiagonalCovSet(Eigen::Vector2d(4.0, 1.0), "i");
  AdaptationTransform t = CoralPPFit(ood, ind, cfg);
  double err = std::max(
      {std::abs(t.matrix(0, 0) - 1.0),
       std::abs(t.matrix(1, 1) - 0.7385489458759964),
       std::abs(t.matrix(0, 1)), std::abs(t.matrix(1, 0))});
  if (err >= 1e-8) return Fail("hand trace off by " + Num(err));
  return Pass("10 random spectra plus hand trace, worst " + Num(err));
}

// ---------------------------------------------------------------------
// 3. Distribution adaptor: matched domains give the identity map, and
//    the floor leaves already-small directions alone.
Outcome CheckFdaContract() {
  test::TestRng rng(303);
  EmbeddingSet set = test::MakeSet(
      test::GaussianRows(200, rng.Vector(6), test::RandomSpd(6, &rng), &rng),
      "s");
  AdaptationTransform self = FdaFit(set, set);
  Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(6, 6);
  double id_err = (self.matrix - identity).cwiseAbs().maxCoeff();
  if (id_err >= 1e-8) return Fail("self-adaptation matrix off by " +
                                  Num(id_err));
  EmbeddingSet mapped = ApplyTransform(self, set);
  double row_err = (mapped.vectors - set.vectors).cwiseAbs().maxCoeff();
  if (row_err >= 1e-8) return Fail("self-adaptation moved rows by " +
                                   Num(row_err));

  EmbeddingSet ood = DiagonalCovSet(Eigen::Vector2d(1.0, 1.0), "o");
  EmbeddingSet ind = DiagonalCovSet(Eigen::Vector2d(4.0, 0.25), "i");
  AdaptationTransform t = FdaFit(ood, ind);
  double err = std::max(
      {std::abs(t.matrix(0, 0) - 2.0), std::abs(t.matrix(1, 1) - 1.0),
       std::abs(t.matrix(0, 1)), std::abs(t.matrix(1, 0))});
  if (err >= 1e-8) return Fail("floored case off by " + Num(err));
  return Pass("identity to " + Num(std::max(id_err, row_err)) +
              ", floored case to " + Num(err));
}

// ---------------------------------------------------------------------
// 4. Detection metrics against exhaustive search, invariance under
//    monotone score maps, and the 1-D verification LLR against
//    quadrature.
Outcome CheckMetricOracles() {
  test::TestRng rng(404);
  double worst_eer = 0.0;
  double worst_cost = 0.0;
  double worst_invariance = 0.0;
  for (int inst = 0; inst < 100; inst++) {
    int64_t n_t = rng.Int(5, 100);
    int64_t n_n = rng.Int(5, 100);
    std::vector<double> targets, nontargets;
    auto draw = [&](double offset, int64_t idx) {
      double v = offset + rng.Gauss();
      // Quantize a third of the scores so threshold ties actually occur.
      if (idx % 3 == 0) v = std::round(v * 2.0) / 2.0;
      return v;
    };
    for (int64_t i = 0; i < n_t; i++) targets.push_back(draw(1.0, i));
    for (int64_t i = 0; i < n_n; i++) nontargets.push_back(draw(0.0, i));

    ScoreSet scores;
    TrialList trials;
    trials.keys.emplace();
    for (size_t i = 0; i < targets.size(); i++) {
      auto pair = std::make_pair("e" + std::to_string(i), "t");
      scores.pairs.push_back(pair);
      scores.scores.push_back(targets[i]);
      trials.pairs.push_back(pair);
      trials.keys->push_back(true);
    }
    for (size_t i = 0; i < nontargets.size(); i++) {
      auto pair = std::make_pair("n" + std::to_string(i), "t");
      scores.pairs.push_back(pair);
      scores.scores.push_back(nontargets[i]);
      trials.pairs.push_back(pair);
      trials.keys->push_back(false);
    }

    DetCurve curve = ComputeDetCurve(scores, trials);
    CostParams params;
    double lib_eer = ComputeEer(curve);
    double lib_cost = ComputeMinCost(curve, params);
    worst_eer = std::max(
        worst_eer,
        std::abs(lib_eer - test::BruteForceEer(targets, nontargets)));
    worst_cost = std::max(
        worst_cost,
        std::abs(lib_cost -
                 test::BruteForceMinCost(targets, nontargets,
                                         params.p_target, params.c_miss,
                                         params.c_fa)));

    for (int variant = 0; variant < 2; variant++) {
      ScoreSet warped = scores;
      for (double &s : warped.scores)
        s = variant == 0 ? 2.0 * s + 1.0 : std::atan(s);
      DetCurve warped_curve = ComputeDetCurve(warped, trials);
      worst_invariance = std::max(
          {worst_invariance, std::abs(ComputeEer(warped_curve) - lib_eer),
           std::abs(ComputeMinCost(warped_curve, params) - lib_cost)});
    }
  }
  if (worst_eer >= 1e-12) return Fail("eer deviates " + Num(worst_eer));
  if (worst_cost >= 1e-12)
    return Fail("min cost deviates " + Num(worst_cost));
  if (worst_invariance >= 1e-12)
    return Fail("monotone invariance broken by " + Num(worst_invariance));

  double worst_llr = 0.0;
  const double cases[][3] = {{0.0, 1.0, 1.0}, {0.3, 2.0, 0.5}};
  for (const double *c : cases) {
    PldaParams params;
    params.mu = Eigen::VectorXd::Constant(1, c[0]);
    params.between = Eigen::MatrixXd::Constant(1, 1, c[1]);
    params.within = Eigen::MatrixXd::Constant(1, 1, c[2]);
    PldaScorer scorer(params);
    for (double e : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
      for (double t : {-1.5, 0.0, 0.8, 2.0}) {
        double got = scorer.Score(Eigen::VectorXd::Constant(1, e),
                                  Eigen::VectorXd::Constant(1, t));
        double want = test::QuadraturePldaLlr(e, t, c[0], c[1], c[2]);
        worst_llr = std::max(worst_llr, std::abs(got - want));
      }
    }
  }
  if (worst_llr >= 1e-6) return Fail("llr deviates " + Num(worst_llr));
  return Pass("eer<=" + Num(worst_eer) + ", cost<=" + Num(worst_cost) +
              ", llr<=" + Num(worst_llr));
}

// ---------------------------------------------------------------------
// Shared operating point for the comparative checks: a strong shift
// scored through an 8/8 bottleneck, medians over three seeds.
DomainShiftSpec ShiftedSpec() {
  DomainShiftSpec spec;
  spec.anisotropy = 4.0;
  spec.rotation_strength = 0.5;
  spec.mean_shift_norm = 2.0;
  spec.seed = 36;
  return spec;
}

constexpr int64_t kD1 = 8;
constexpr int64_t kD2 = 8;

// 5. Adapted systems beat the unadapted baseline under both scorings,
//    and plda scoring never loses to cosine for any method.
Outcome CheckMethodOrdering() {
  auto start = std::chrono::steady_clock::now();
  DomainShiftSpec spec = ShiftedSpec();
  CoralPPConfig cfg;
  const AdaptMethod methods[] = {AdaptMethod::kIdentity, AdaptMethod::kCoral,
                                 AdaptMethod::kFda, AdaptMethod::kCoralPP};
  double plda[4], cosine[4];
  for (int m = 0; m < 4; m++) {
    plda[m] = RunExperimentMedian(spec, methods[m], cfg, Scoring::kPlda,
                                  1.0, kD1, kD2)
                  .eer;
    cosine[m] = RunExperimentMedian(spec, methods[m], cfg, Scoring::kCosine,
                                    1.0, kD1, kD2)
                    .eer;
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (!(plda[3] < plda[0]))
    return Fail("coralpp plda " + Num(plda[3]) + " vs raw " + Num(plda[0]));
  if (!(cosine[3] < cosine[0]))
    return Fail("coralpp cosine " + Num(cosine[3]) + " vs raw " +
                Num(cosine[0]));
  for (int m = 0; m < 4; m++)
    if (!(plda[m] <= cosine[m]))
      return Fail("plda " + Num(plda[m]) + " > cosine " + Num(cosine[m]) +
                  " for method " + std::to_string(m));
  if (secs >= 120.0) return Fail("took " + Num(secs) + "s");
  return Pass("coralpp/raw eer plda " + Num(100 * plda[3]) + "/" +
              Num(100 * plda[0]) + "%, cosine " + Num(100 * cosine[3]) +
              "/" + Num(100 * cosine[0]) + "%, " + Num(secs) + "s");
}

// 6. A 10% adaptation pool is still enough to beat the baseline.
Outcome CheckSubsetStability() {
  DomainShiftSpec spec = ShiftedSpec();
  CoralPPConfig cfg;
  for (Scoring sc : {Scoring::kPlda, Scoring::kCosine}) {
    double raw = RunExperimentMedian(spec, AdaptMethod::kIdentity, cfg, sc,
                                     1.0, kD1, kD2)
                     .eer;
    double tenth = RunExperimentMedian(spec, AdaptMethod::kCoralPP, cfg, sc,
                                       0.1, kD1, kD2)
                       .eer;
    if (!(tenth < raw))
      return Fail("10% pool eer " + Num(100 * tenth) + "% vs raw " +
                  Num(100 * raw) + "%");
  }
  return Pass("10% pool beats raw under both scorings");
}

// ---------------------------------------------------------------------
// CLI plumbing for criterion 7.
struct CliResult {
  int code = -1;
  std::string out;
};

std::string ReadWholeFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliResult RunCli(const std::string &args,
                 const std::filesystem::path &scratch) {
  std::filesystem::path out = scratch / "stdout";
  std::string cmd = std::string(EVADAPT_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> /dev/null";
  int status = std::system(cmd.c_str());
  CliResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = ReadWholeFile(out);
  std::filesystem::remove(out);
  return result;
}

int CountDataRows(const std::string &text) {
  int rows = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_of("0123456789") == std::string::npos) continue;
    if (!std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    rows++;
  }
  return rows;
}

// 7. The sweep harness emits deterministic, well-formed tables for both
//    spectrum knobs.
Outcome CheckSweepDeterminism() {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("evadapt_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  CliResult synth = RunCli("synth --dim 12 --n-speakers 40 "
                           "--utts-per-speaker 5 --anisotropy 3 "
                           "--rotation-strength 0.5 --mean-shift-norm 1.5 "
                           "--seed 9 --out " + dir.string(),
                           dir);
  if (synth.code != 0) {
    std::filesystem::remove_all(dir);
    return Fail("synth exited " + std::to_string(synth.code));
  }
  for (const char *param : {"lambda", "alpha"}) {
    std::string args = std::string("sweep --param ") + param +
                       " --d1 8 --d2 8 --data " + dir.string();
    CliResult a = RunCli(args, dir);
    CliResult b = RunCli(args, dir);
    if (a.code != 0 || b.code != 0) {
      std::filesystem::remove_all(dir);
      return Fail(std::string(param) + " sweep exited " +
                  std::to_string(a.code));
    }
    if (a.out != b.out) {
      std::filesystem::remove_all(dir);
      return Fail(std::string(param) + " sweep not deterministic");
    }
    std::string header = std::string("# sweep ") + param + "\tfixed " +
                         (std::string(param) == "lambda" ? "alpha=0.0000"
                                                         : "lambda=0.1000") +
                         "\n";
    if (a.out.rfind(header, 0) != 0) {
      std::filesystem::remove_all(dir);
      return Fail(std::string(param) + " sweep header malformed");
    }
    if (CountDataRows(a.out) != 7) {
      std::filesystem::remove_all(dir);
      return Fail(std::string(param) + " sweep row count " +
                  std::to_string(CountDataRows(a.out)));
    }
  }
  std::filesystem::remove_all(dir);
  return Pass("both knobs, 7-point grids, byte-identical reruns");
}

// ---------------------------------------------------------------------
// 8. Corruption fuzzing across every file reader plus bit-exact binary
//    round-trips.
Outcome CheckReaderRobustness() {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("evadapt_fuzz_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  struct Cleanup {
    std::filesystem::path dir;
    ~Cleanup() { std::filesystem::remove_all(dir); }
  } cleanup{dir};

  test::TestRng rng(808);
  EmbeddingSet labeled = test::MakeLabeledClusters(6, 4, 5, 2.0, &rng);
  EmbeddingSet pool = test::MakeSet(
      test::GaussianRows(24, Eigen::VectorXd::Zero(5),
                         test::RandomSpd(5, &rng), &rng),
      "p");
  TrialList trials;
  trials.keys.emplace();
  for (int i = 0; i < 8; i++) {
    trials.pairs.emplace_back("e" + std::to_string(i / 4),
                              "t" + std::to_string(i % 4));
    trials.keys->push_back(i % 3 == 0);
  }
  ScoreSet scores;
  for (int i = 0; i < 8; i++) {
    scores.pairs.emplace_back("e" + std::to_string(i / 4),
                              "t" + std::to_string(i % 4));
    scores.scores.push_back(0.1 * i - 0.3);
  }
  AdaptationTransform transform = CoralPPFit(labeled, pool, CoralPPConfig{});
  BackendModel model = FitBackend(labeled, pool, 4, 4);

  // Base artifacts, one per reader.
  std::filesystem::path bin = dir / "set.evb";
  std::filesystem::path tsv = dir / "set.tsv";
  std::filesystem::path tri = dir / "trials.tsv";
  std::filesystem::path sco = dir / "scores.tsv";
  std::filesystem::path adt = dir / "transform.adt";
  std::filesystem::path bkd = dir / "backend.bkd";
  WriteEmbeddings(labeled, bin.string(), FileFormat::kBinary);
  WriteEmbeddings(labeled, tsv.string(), FileFormat::kTsv);
  WriteTrials(trials, tri.string());
  WriteScores(scores, sco.string());
  WriteTransform(transform, adt.string());
  WriteBackendModel(model, bkd.string());

  // Round-trips first: read back, rewrite, compare bytes.
  {
    EmbeddingSet back = ReadEmbeddings(bin.string(), FileFormat::kBinary);
    std::filesystem::path again = dir / "set2.evb";
    WriteEmbeddings(back, again.string(), FileFormat::kBinary);
    if (ReadWholeFile(bin) != ReadWholeFile(again))
      return Fail("embedding binary round-trip not bit-exact");
    AdaptationTransform t2 = ReadTransform(adt.string());
    std::filesystem::path adt2 = dir / "transform2.adt";
    WriteTransform(t2, adt2.string());
    if (ReadWholeFile(adt) != ReadWholeFile(adt2))
      return Fail("transform round-trip not bit-exact");
    BackendModel m2 = ReadBackendModel(bkd.string());
    std::filesystem::path bkd2 = dir / "backend2.bkd";
    WriteBackendModel(m2, bkd2.string());
    if (ReadWholeFile(bkd) != ReadWholeFile(bkd2))
      return Fail("backend round-trip not bit-exact");
  }

  struct Target {
    std::string bytes;
    int reader;
  };
  std::vector<Target> targets = {
      {ReadWholeFile(bin), 0}, {ReadWholeFile(tsv), 1},
      {ReadWholeFile(tri), 2}, {ReadWholeFile(sco), 3},
      {ReadWholeFile(adt), 4}, {ReadWholeFile(bkd), 5}};

  std::filesystem::path victim = dir / "victim";
  int rejected = 0;
  int survived = 0;
  for (int i = 0; i < 1000; i++) {
    std::string bytes = targets[i % targets.size()].bytes;
    int mode = static_cast<int>(rng.Int(0, 4));
    size_t pos = bytes.empty()
                     ? 0
                     : static_cast<size_t>(rng.Int(
                           0, static_cast<int64_t>(bytes.size()) - 1));
    switch (mode) {
      case 0:
        bytes.resize(pos);
        break;
      case 1:
        if (!bytes.empty())
          bytes[pos] = static_cast<char>(bytes[pos] ^
                                         (1 << rng.Int(0, 7)));
        break;
      case 2:
        for (size_t k = pos; k < std::min(bytes.size(), pos + 4); k++)
          bytes[k] = static_cast<char>(rng.Int(0, 255));
        break;
      case 3:
        for (int64_t k = rng.Int(1, 8); k > 0; k--)
          bytes.push_back(static_cast<char>(rng.Int(0, 255)));
        break;
      default:
        if (!bytes.empty()) bytes.erase(pos, 1);
        break;
    }
    {
      std::ofstream out(victim, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(),
                static_cast<std::streamsize>(bytes.size()));
    }
    try {
      switch (targets[i % targets.size()].reader) {
        case 0: ReadEmbeddings(victim.string(), FileFormat::kBinary); break;
        case 1: ReadEmbeddings(victim.string(), FileFormat::kTsv); break;
        case 2: ReadTrials(victim.string()); break;
        case 3: ReadScores(victim.string()); break;
        case 4: ReadTransform(victim.string()); break;
        default: ReadBackendModel(victim.string()); break;
      }
      survived++;
    } catch (const Error &) {
      rejected++;
    } catch (const std::exception &e) {
      return Fail("case " + std::to_string(i) + " escaped with " +
                  e.what());
    }
  }
  if (rejected < 300)
    return Fail("only " + std::to_string(rejected) +
                " corruptions were rejected; corpus too tame");
  return Pass(std::to_string(rejected) + " rejected, " +
              std::to_string(survived) +
              " benign, zero untyped escapes, round-trips bit-exact");
}

}  // namespace
}  // namespace evadapt

int main() {
  using evadapt::Outcome;
  struct Criterion {
    const char *label;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"coral transform optimality", evadapt::CheckCoralOptimality},
      {"coralpp spectrum contract", evadapt::CheckSpectrumContract},
      {"fda identity and flooring", evadapt::CheckFdaContract},
      {"metric oracle agreement", evadapt::CheckMetricOracles},
      {"shifted-benchmark method ordering", evadapt::CheckMethodOrdering},
      {"subset stability", evadapt::CheckSubsetStability},
      {"sweep determinism", evadapt::CheckSweepDeterminism},
      {"reader robustness", evadapt::CheckReaderRobustness},
  };
  bool all_ok = true;
  for (size_t i = 0; i < sizeof(criteria) / sizeof(criteria[0]); i++) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception &e) {
      outcome = {false, std::string("unhandled exception: ") + e.what()};
    }
    std::printf("criterion %zu [%s]: %s (%s)\n", i + 1, criteria[i].label,
                outcome.ok ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && outcome.ok;
  }
  return all_ok ? 0 : 1;
}
