// tools/evadapt_main.cc

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

// Command-line front end.  One subcommand per pipeline stage plus two
// reporting harnesses:
//
//   synth       write a synthetic cross-domain benchmark to a directory
//   adapt       fit a domain adaptation transform and apply it
//   train       fit the scoring back-end on (adapted) embeddings
//   score       score trial pairs against a fitted back-end
//   eval        compute EER / min-cost from scores and keyed trials
//   sweep       lambda/alpha sensitivity table for the coralpp adaptor
//   experiment  method x scoring x adaptation-ratio comparison table
//
// Exit codes: 0 success, 1 computational failure (singular matrices,
// degenerate data), 2 usage or input-file errors.  All tables go to
// stdout and are byte-stable for a fixed seed; diagnostics go to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evadapt/adapt.h"
#include "evadapt/backend.h"
#include "evadapt/embedio.h"
#include "evadapt/error.h"
#include "evadapt/metrics.h"
#include "evadapt/synth.h"

namespace {

using namespace evadapt;

// Reads go through a four-byte sniff so users never have to repeat
// --format for inputs; the flag only selects the format of outputs.
FileFormat SniffFormat(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::string(magic, 4) == "EVB1")
    return FileFormat::kBinary;
  return FileFormat::kTsv;
}

EmbeddingSet LoadEmbeddings(const std::string &path) {
  return ReadEmbeddings(path, SniffFormat(path));
}

AdaptMethod ParseMethod(const std::string &name) {
  if (name == "raw") return AdaptMethod::kIdentity;
  if (name == "coral") return AdaptMethod::kCoral;
  if (name == "fda") return AdaptMethod::kFda;
  if (name == "coralpp") return AdaptMethod::kCoralPP;
  throw ValidationError("unknown method \"" + name + "\"");
}

const char *MethodName(AdaptMethod method) {
  switch (method) {
    case AdaptMethod::kIdentity: return "raw";
    case AdaptMethod::kCoral: return "coral";
    case AdaptMethod::kFda: return "fda";
    case AdaptMethod::kCoralPP: return "coralpp";
  }
  return "?";
}

AdaptationTransform FitMethod(AdaptMethod method, const EmbeddingSet &ood,
                              const EmbeddingSet &ind,
                              const CoralPPConfig &cfg) {
  switch (method) {
    case AdaptMethod::kIdentity: return IdentityTransform(ood.Dim());
    case AdaptMethod::kCoral: return CoralFit(ood, ind);
    case AdaptMethod::kFda: return FdaFit(ood, ind);
    case AdaptMethod::kCoralPP: return CoralPPFit(ood, ind, cfg);
  }
  throw StateError("unreachable method dispatch");
}

// Projection dimensions are given with large defaults suited to real
// embedding dumps; on smaller data they are clamped to the feasible
// range instead of erroring so the defaults work everywhere.
int64_t ClampD1(int64_t d1, int64_t dim) { return std::min(d1, dim); }

int64_t ClampD2(int64_t d2, int64_t d1_eff, int64_t n_speakers) {
  return std::min({d2, d1_eff, n_speakers - 1});
}

int64_t CountSpeakers(const EmbeddingSet &set) {
  std::set<std::string> labels;
  if (set.HasLabels())
    for (const auto &label : *set.labels) labels.insert(label);
  return static_cast<int64_t>(labels.size());
}

struct SpecFlags {
  DomainShiftSpec spec;

  void Attach(CLI::App *cmd) {
    cmd->add_option("--dim", spec.dim, "Embedding dimensionality")
        ->capture_default_str();
    cmd->add_option("--n-speakers", spec.n_speakers,
                    "Speakers per generated population")
        ->capture_default_str();
    cmd->add_option("--utts-per-speaker", spec.utts_per_speaker,
                    "Utterances per speaker")
        ->capture_default_str();
    cmd->add_option("--between-scale", spec.between_scale,
                    "Speaker (between-class) standard deviation")
        ->capture_default_str();
    cmd->add_option("--within-scale", spec.within_scale,
                    "Utterance (within-class) standard deviation")
        ->capture_default_str();
    cmd->add_option("--rotation-strength", spec.rotation_strength,
                    "Domain rotation in [0,1]; 0 keeps axes")
        ->capture_default_str();
    cmd->add_option("--anisotropy", spec.anisotropy,
                    "Axis-scaling condition number of the domain shift")
        ->capture_default_str();
    cmd->add_option("--mean-shift-norm", spec.mean_shift_norm,
                    "Norm of the domain mean offset")
        ->capture_default_str();
    cmd->add_option("--seed", spec.seed, "Generator seed")
        ->capture_default_str();
  }
};

void CmdSynth(const DomainShiftSpec &spec, const std::string &out_dir) {
  GeneratedBenchmark bench = Generate(spec);
  std::filesystem::create_directories(out_dir);
  WriteEmbeddings(bench.source, out_dir + "/source.evb",
                  FileFormat::kBinary);
  WriteEmbeddings(bench.target_adapt, out_dir + "/adapt.evb",
                  FileFormat::kBinary);
  WriteEmbeddings(bench.target_enroll, out_dir + "/enroll.evb",
                  FileFormat::kBinary);
  WriteEmbeddings(bench.target_test, out_dir + "/test.evb",
                  FileFormat::kBinary);
  WriteTrials(bench.trials, out_dir + "/trials.tsv");
}

void CmdAdapt(const std::string &ood_path, const std::string &ind_path,
              const std::string &method_name, const CoralPPConfig &cfg,
              bool params_given, const std::string &out_path,
              FileFormat out_format) {
  AdaptMethod method = ParseMethod(method_name);
  if (method != AdaptMethod::kCoralPP && params_given)
    std::cerr << "warning: --lambda/--alpha ignored for method "
              << method_name << "\n";
  EmbeddingSet ood = LoadEmbeddings(ood_path);
  EmbeddingSet ind = LoadEmbeddings(ind_path);
  AdaptationTransform transform = FitMethod(method, ood, ind, cfg);
  EmbeddingSet adapted = ApplyTransform(transform, ood);
  WriteEmbeddings(adapted, out_path, out_format);
  WriteTransform(transform, out_path + ".adt");
}

void CmdTrain(const std::string &train_path,
              const std::string &centering_path, int64_t d1, int64_t d2,
              const std::string &out_path) {
  EmbeddingSet train = LoadEmbeddings(train_path);
  EmbeddingSet centering =
      centering_path.empty() ? train : LoadEmbeddings(centering_path);
  int64_t d1_eff = ClampD1(d1, train.Dim());
  BackendModel model;
  if (train.HasLabels()) {
    int64_t d2_eff = ClampD2(d2, d1_eff, CountSpeakers(train));
    model = FitBackend(train, centering, d1_eff, d2_eff);
  } else {
    // Unlabeled training data can still support cosine scoring through
    // the centering + projection stages.
    model = FitCenterPca(train, centering, d1_eff);
  }
  WriteBackendModel(model, out_path);
}

void CmdScore(const std::string &model_path, const std::string &enroll_path,
              const std::string &test_path, const std::string &trials_path,
              Scoring scoring, const std::string &out_path) {
  BackendModel model = ReadBackendModel(model_path);
  EmbeddingSet enroll = LoadEmbeddings(enroll_path);
  EmbeddingSet test = LoadEmbeddings(test_path);
  TrialList trials = ReadTrials(trials_path);
  ScoreSet scores = ScoreTrials(model, enroll, test, trials, scoring);
  WriteScores(scores, out_path);
}

void CmdEval(const std::string &scores_path, const std::string &trials_path,
             const CostParams &params) {
  ScoreSet scores = ReadScores(scores_path);
  TrialList trials = ReadTrials(trials_path);
  DetCurve curve = ComputeDetCurve(scores, trials);
  std::printf("EER%%\t%.4f\n", 100.0 * ComputeEer(curve));
  std::printf("minCost\t%.4f\n", ComputeMinCost(curve, params));
}

struct BenchmarkData {
  EmbeddingSet source;
  EmbeddingSet adapt;
  EmbeddingSet enroll;
  EmbeddingSet test;
  TrialList trials;
};

BenchmarkData LoadBenchmarkDir(const std::string &dir) {
  BenchmarkData data;
  data.source = LoadEmbeddings(dir + "/source.evb");
  data.adapt = LoadEmbeddings(dir + "/adapt.evb");
  data.enroll = LoadEmbeddings(dir + "/enroll.evb");
  data.test = LoadEmbeddings(dir + "/test.evb");
  data.trials = ReadTrials(dir + "/trials.tsv");
  return data;
}

BenchmarkData FromBenchmark(GeneratedBenchmark &&bench) {
  BenchmarkData data;
  data.source = std::move(bench.source);
  data.adapt = std::move(bench.target_adapt);
  data.enroll = std::move(bench.target_enroll);
  data.test = std::move(bench.target_test);
  data.trials = std::move(bench.trials);
  return data;
}

void CmdSweep(const std::string &param, std::vector<double> grid,
              double fixed, bool fixed_given, const std::string &data_dir,
              const DomainShiftSpec &spec, Scoring scoring, int64_t d1,
              int64_t d2) {
  bool sweep_lambda = param == "lambda";
  if (!sweep_lambda && param != "alpha")
    throw ValidationError("sweep parameter must be lambda or alpha");
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  // Reject invalid grid points before any work runs.
  for (double v : grid) {
    if (sweep_lambda && !(v > 0.0))
      throw ValidationError("lambda grid values must be positive");
    if (!sweep_lambda && !(v >= 0.0))
      throw ValidationError("alpha grid values must be non-negative");
  }
  // Sweeping one parameter pins the other: alpha drops to 0 while lambda
  // varies, and lambda sits at its default 0.1 while alpha varies,
  // unless --fixed overrides.
  if (!fixed_given) fixed = sweep_lambda ? 0.0 : 0.1;

  BenchmarkData data = data_dir.empty()
                           ? FromBenchmark(Generate(spec))
                           : LoadBenchmarkDir(data_dir);
  int64_t d1_eff = ClampD1(d1, data.source.Dim());
  int64_t d2_eff = ClampD2(d2, d1_eff, CountSpeakers(data.source));

  std::printf("# sweep %s\tfixed %s=%.4f\n", param.c_str(),
              sweep_lambda ? "alpha" : "lambda", fixed);
  std::printf("%s\teer_pct\tmin_cost\n", param.c_str());
  for (double value : grid) {
    CoralPPConfig cfg;
    cfg.lambda = sweep_lambda ? value : fixed;
    cfg.alpha = sweep_lambda ? fixed : value;
    AdaptationTransform transform = CoralPPFit(data.source, data.adapt, cfg);
    EmbeddingSet adapted = ApplyTransform(transform, data.source);
    BackendModel model = FitBackend(adapted, data.adapt, d1_eff, d2_eff);
    ScoreSet scores =
        ScoreTrials(model, data.enroll, data.test, data.trials, scoring);
    DetCurve curve = ComputeDetCurve(scores, data.trials);
    std::printf("%.4f\t%.4f\t%.4f\n", value, 100.0 * ComputeEer(curve),
                ComputeMinCost(curve, CostParams{}));
  }
}

void CmdExperiment(const DomainShiftSpec &spec, const CoralPPConfig &cfg,
                   int64_t d1, int64_t d2) {
  const double ratios[] = {1.0, 0.5, 0.1};
  const AdaptMethod methods[] = {AdaptMethod::kIdentity, AdaptMethod::kCoral,
                                 AdaptMethod::kFda, AdaptMethod::kCoralPP};
  const Scoring scorings[] = {Scoring::kPlda, Scoring::kCosine};
  std::printf("# ratio_pct\tmethod\tscoring\teer_pct\tmin_cost\n");
  for (double ratio : ratios) {
    for (AdaptMethod method : methods) {
      // The identity baseline fits nothing on the pool but still centers
      // on it, so its rows drift slightly with the ratio too.
      for (Scoring scoring : scorings) {
        ExperimentResult r =
            RunExperimentMedian(spec, method, cfg, scoring, ratio, d1, d2);
        std::printf("%.0f\t%s\t%s\t%.4f\t%.4f\n", 100.0 * ratio,
                    MethodName(method),
                    scoring == Scoring::kPlda ? "plda" : "cosine",
                    100.0 * r.eer, r.min_cost);
      }
    }
  }
}

int Dispatch(int argc, char **argv) {
  CLI::App app{"Speaker-embedding domain adaptation toolkit"};
  app.require_subcommand(1);

  // synth ----------------------------------------------------------------
  auto *synth = app.add_subcommand(
      "synth", "Generate a synthetic cross-domain benchmark directory");
  SpecFlags synth_spec;
  synth_spec.Attach(synth);
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output directory")->required();

  // adapt ----------------------------------------------------------------
  auto *adapt = app.add_subcommand(
      "adapt", "Fit an adaptation transform and apply it to embeddings");
  std::string adapt_ood, adapt_ind, adapt_method, adapt_out;
  CoralPPConfig adapt_cfg;
  std::string adapt_format = "binary";
  adapt->add_option("--ood", adapt_ood,
                    "Out-of-domain (training) embeddings")->required();
  adapt->add_option("--ind", adapt_ind,
                    "In-domain (adaptation) embeddings")->required();
  adapt->add_option("--method", adapt_method,
                    "Adaptation method: raw, coral, fda, coralpp")
      ->required();
  adapt->add_option("--lambda", adapt_cfg.lambda,
                    "coralpp covariance regularizer (> 0)")
      ->capture_default_str();
  adapt->add_option("--alpha", adapt_cfg.alpha,
                    "coralpp spectrum floor (>= 0)")
      ->capture_default_str();
  adapt->add_option("--out", adapt_out,
                    "Adapted embeddings path; transform goes to <out>.adt")
      ->required();
  adapt->add_option("--format", adapt_format, "Output format: tsv, binary")
      ->check(CLI::IsMember({"tsv", "binary"}))
      ->capture_default_str();

  // train ----------------------------------------------------------------
  auto *train = app.add_subcommand(
      "train", "Fit the scoring back-end on training embeddings");
  std::string train_train, train_centering, train_out;
  int64_t train_d1 = 200, train_d2 = 100;
  train->add_option("--train", train_train,
                    "Training embeddings (labels enable LDA/PLDA)")
      ->required();
  train->add_option("--centering", train_centering,
                    "Centering set (defaults to the training set)");
  train->add_option("--d1", train_d1,
                    "Projection size, clamped to the data dimension")
      ->capture_default_str();
  train->add_option("--d2", train_d2,
                    "Discriminant size, clamped to feasible range")
      ->capture_default_str();
  train->add_option("--out", train_out, "Back-end model path")->required();

  // score ----------------------------------------------------------------
  auto *score = app.add_subcommand("score",
                                   "Score trial pairs with a back-end");
  std::string score_model, score_enroll, score_test, score_trials, score_out;
  std::string score_scoring = "plda";
  score->add_option("--model", score_model, "Back-end model")->required();
  score->add_option("--enroll", score_enroll, "Enrollment embeddings")
      ->required();
  score->add_option("--test", score_test, "Test embeddings")->required();
  score->add_option("--trials", score_trials, "Trial list")->required();
  score->add_option("--scoring", score_scoring, "Scoring: plda, cosine")
      ->check(CLI::IsMember({"plda", "cosine"}))
      ->capture_default_str();
  score->add_option("--out", score_out, "Scores output path")->required();

  // eval -----------------------------------------------------------------
  auto *eval = app.add_subcommand("eval",
                                  "Compute EER and min-cost from scores");
  std::string eval_scores, eval_trials;
  std::vector<double> eval_priors;
  double eval_cmiss = 1.0, eval_cfa = 1.0;
  eval->add_option("--scores", eval_scores, "Scores file")->required();
  eval->add_option("--trials", eval_trials, "Keyed trial list")->required();
  eval->add_option("--p-target", eval_priors,
                   "Target prior; repeatable (default 0.01 and 0.005)");
  eval->add_option("--c-miss", eval_cmiss, "Miss cost")
      ->capture_default_str();
  eval->add_option("--c-fa", eval_cfa, "False-alarm cost")
      ->capture_default_str();

  // sweep ----------------------------------------------------------------
  auto *sweep = app.add_subcommand(
      "sweep", "Sensitivity table over the coralpp lambda or alpha grid");
  std::string sweep_param, sweep_data;
  std::vector<double> sweep_grid = {0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  double sweep_fixed = 0.0;
  std::string sweep_scoring = "plda";
  int64_t sweep_d1 = 200, sweep_d2 = 100;
  SpecFlags sweep_spec;
  sweep->add_option("--param", sweep_param, "Swept parameter: lambda, alpha")
      ->required()
      ->check(CLI::IsMember({"lambda", "alpha"}));
  sweep->add_option("--grid", sweep_grid, "Grid values")
      ->delimiter(',')
      ->capture_default_str();
  auto *fixed_opt = sweep->add_option(
      "--fixed", sweep_fixed,
      "Value of the non-swept parameter (default: alpha 0 / lambda 0.1)");
  sweep->add_option("--data", sweep_data,
                    "Benchmark directory written by synth; when absent a "
                    "benchmark is generated from the spec flags");
  sweep->add_option("--scoring", sweep_scoring, "Scoring: plda, cosine")
      ->check(CLI::IsMember({"plda", "cosine"}))
      ->capture_default_str();
  sweep->add_option("--d1", sweep_d1, "Projection size (clamped)")
      ->capture_default_str();
  sweep->add_option("--d2", sweep_d2, "Discriminant size (clamped)")
      ->capture_default_str();
  sweep_spec.Attach(sweep);

  // experiment -----------------------------------------------------------
  auto *experiment = app.add_subcommand(
      "experiment",
      "Method x scoring x adaptation-ratio table, median of three seeds");
  SpecFlags exp_spec;
  CoralPPConfig exp_cfg;
  int64_t exp_d1 = 200, exp_d2 = 100;
  exp_spec.Attach(experiment);
  experiment->add_option("--lambda", exp_cfg.lambda,
                         "coralpp covariance regularizer")
      ->capture_default_str();
  experiment->add_option("--alpha", exp_cfg.alpha, "coralpp spectrum floor")
      ->capture_default_str();
  experiment->add_option("--d1", exp_d1, "Projection size (clamped)")
      ->capture_default_str();
  experiment->add_option("--d2", exp_d2, "Discriminant size (clamped)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) {
      CmdSynth(synth_spec.spec, synth_out);
    } else if (adapt->parsed()) {
      bool params_given = adapt->count("--lambda") > 0 ||
                          adapt->count("--alpha") > 0;
      CmdAdapt(adapt_ood, adapt_ind, adapt_method, adapt_cfg, params_given,
               adapt_out,
               adapt_format == "tsv" ? FileFormat::kTsv
                                     : FileFormat::kBinary);
    } else if (train->parsed()) {
      CmdTrain(train_train, train_centering, train_d1, train_d2, train_out);
    } else if (score->parsed()) {
      CmdScore(score_model, score_enroll, score_test, score_trials,
               score_scoring == "plda" ? Scoring::kPlda : Scoring::kCosine,
               score_out);
    } else if (eval->parsed()) {
      CostParams params;
      if (!eval_priors.empty()) params.p_target = eval_priors;
      params.c_miss = eval_cmiss;
      params.c_fa = eval_cfa;
      CmdEval(eval_scores, eval_trials, params);
    } else if (sweep->parsed()) {
      CmdSweep(sweep_param, sweep_grid, sweep_fixed, fixed_opt->count() > 0,
               sweep_data, sweep_spec.spec,
               sweep_scoring == "plda" ? Scoring::kPlda : Scoring::kCosine,
               sweep_d1, sweep_d2);
    } else if (experiment->parsed()) {
      CmdExperiment(exp_spec.spec, exp_cfg, exp_d1, exp_d2);
    }
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const LookupError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) { return Dispatch(argc, argv); }
