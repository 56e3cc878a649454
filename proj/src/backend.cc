// evadapt/backend.cc

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

#include "evadapt/backend.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "binio.h"
#include "evadapt/error.h"
#include "evadapt/linalg.h"

namespace evadapt {

namespace {

constexpr std::string_view kModelMagic = "BKD1";
constexpr uint16_t kModelVersion = 1;
constexpr double kLdaRidgeScale = 1e-8;
// Relative spectrum cutoff treating a covariance as singular (condition
// number above 1e12).
constexpr double kPdTol = 1e-12;

Eigen::VectorXd MeanOf(const EmbeddingSet &set) {
  if (set.NumRows() == 1) return set.vectors.row(0).transpose();
  // The covariance is thrown away; this buys the canonical-order
  // summation, so the mean is invariant to row permutations.
  return EstimateCovariance(set).mean;
}

// Rows of `set`, centered and projected: (X - mean) * pca.
Eigen::MatrixXd CenterProject(const BackendModel &model,
                              const EmbeddingSet &set) {
  return (set.vectors.rowwise() - model.center_mean.transpose()) * model.pca;
}

// Groups row indices by speaker label, ordered by label so the fit is
// independent of hash seeds and stable across runs.
std::map<std::string, std::vector<int64_t>> GroupBySpeaker(
    const EmbeddingSet &set) {
  std::map<std::string, std::vector<int64_t>> groups;
  for (int64_t i = 0; i < set.NumRows(); i++)
    groups[(*set.labels)[static_cast<size_t>(i)]].push_back(i);
  return groups;
}

struct InverseWithLogDet {
  Eigen::MatrixXd inv;
  double logdet = 0.0;
};

InverseWithLogDet InvertPd(const Eigen::MatrixXd &m, const char *what) {
  EigenDecomposition eig = SymEig(m);
  int64_t d = eig.values.size();
  double max_eig = eig.values(0);
  double min_eig = eig.values(d - 1);
  if (!(min_eig > 0.0) || min_eig <= kPdTol * max_eig)
    throw SingularityError(std::string(what) +
                           " is not positive definite, cannot invert");
  InverseWithLogDet out;
  out.inv = eig.vectors * eig.values.cwiseInverse().asDiagonal() *
            eig.vectors.transpose();
  out.inv = (0.5 * (out.inv + out.inv.transpose())).eval();
  out.logdet = eig.values.array().log().sum();
  return out;
}

BackendModel FitCenterPcaChecked(const EmbeddingSet &train,
                                 const EmbeddingSet &centering_set,
                                 int64_t d1) {
  train.Validate();
  centering_set.Validate();
  if (train.Dim() != centering_set.Dim())
    throw ValidationError("centering set dimension " +
                          std::to_string(centering_set.Dim()) +
                          " does not match training dimension " +
                          std::to_string(train.Dim()));
  if (d1 < 1 || d1 > train.Dim())
    throw ValidationError("pca dimension must be in [1, " +
                          std::to_string(train.Dim()) + "], got " +
                          std::to_string(d1));
  BackendModel model;
  model.center_mean = MeanOf(centering_set);
  EigenDecomposition eig = SymEig(EstimateCovariance(train).cov);
  model.pca = eig.vectors.leftCols(d1);
  return model;
}

// Length-normalizes each row in place; a zero row cannot be normalized.
void LengthNormalizeRows(Eigen::MatrixXd *rows) {
  for (int64_t i = 0; i < rows->rows(); i++) {
    double norm = rows->row(i).norm();
    if (!(norm > 0.0))
      throw DegenerateInputError(
          "zero vector at length normalization (row " + std::to_string(i) +
          ")");
    rows->row(i) /= norm;
  }
}

uint64_t ModelPayloadBytes(uint32_t dim, uint32_t d1, uint32_t d2,
                           uint8_t flags) {
  uint64_t bytes = 0;
  if (flags & 1) bytes += static_cast<uint64_t>(dim) * 8;
  if (flags & 2) bytes += static_cast<uint64_t>(dim) * d1 * 8;
  if (flags & 4) bytes += static_cast<uint64_t>(d1) * d2 * 8;
  if (flags & 8)
    bytes += (static_cast<uint64_t>(d2) +
              2 * static_cast<uint64_t>(d2) * d2) * 8;
  return bytes;
}

void PutVector(std::string *out, const Eigen::VectorXd &v) {
  for (int64_t i = 0; i < v.size(); i++) PutF64(out, v(i));
}

void PutMatrixRowMajor(std::string *out, const Eigen::MatrixXd &m) {
  for (int64_t i = 0; i < m.rows(); i++)
    for (int64_t j = 0; j < m.cols(); j++) PutF64(out, m(i, j));
}

Eigen::VectorXd GetVector(ByteReader *reader, int64_t n) {
  Eigen::VectorXd v(n);
  for (int64_t i = 0; i < n; i++) v(i) = reader->GetF64();
  return v;
}

Eigen::MatrixXd GetMatrixRowMajor(ByteReader *reader, int64_t rows,
                                  int64_t cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int64_t i = 0; i < rows; i++)
    for (int64_t j = 0; j < cols; j++) m(i, j) = reader->GetF64();
  return m;
}

}  // namespace

BackendModel FitCenterPca(const EmbeddingSet &train,
                          const EmbeddingSet &centering_set, int64_t d1) {
  return FitCenterPcaChecked(train, centering_set, d1);
}

BackendModel FitBackend(const EmbeddingSet &train,
                        const EmbeddingSet &centering_set, int64_t d1,
                        int64_t d2) {
  if (!train.HasLabels())
    throw ValidationError("training set has no speaker labels");
  BackendModel model = FitCenterPcaChecked(train, centering_set, d1);

  std::map<std::string, std::vector<int64_t>> groups = GroupBySpeaker(train);
  int64_t n = train.NumRows();
  int64_t n_speakers = static_cast<int64_t>(groups.size());
  if (n_speakers < 2)
    throw InsufficientDataError("need at least 2 speakers, got " +
                                std::to_string(n_speakers));
  for (const auto &[label, rows] : groups)
    if (rows.size() < 2)
      throw InsufficientDataError("speaker \"" + label +
                                  "\" has fewer than 2 utterances");
  if (d2 < 1 || d2 > std::min(d1, n_speakers - 1))
    throw ValidationError("lda dimension must be in [1, min(d1, speakers-1)"
                          "] = [1, " +
                          std::to_string(std::min(d1, n_speakers - 1)) +
                          "], got " + std::to_string(d2));

  // Center, project, length-normalize the training rows.
  Eigen::MatrixXd z = CenterProject(model, train);
  LengthNormalizeRows(&z);

  // Fisher LDA on the normalized projections.  Scatter normalizations
  // cancel in the generalized eigenproblem, so only relative scale
  // matters; both are covariance-style here.
  Eigen::VectorXd global_mean = z.colwise().mean().transpose();
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d1, d1);
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d1, d1);
  std::vector<Eigen::VectorXd> speaker_means;
  std::vector<int64_t> speaker_counts;
  speaker_means.reserve(groups.size());
  for (const auto &[label, rows] : groups) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d1);
    for (int64_t r : rows) mean += z.row(r).transpose();
    mean /= static_cast<double>(rows.size());
    for (int64_t r : rows) {
      Eigen::VectorXd c = z.row(r).transpose() - mean;
      sw.noalias() += c * c.transpose();
    }
    Eigen::VectorXd b = mean - global_mean;
    sb.noalias() += static_cast<double>(rows.size()) * b * b.transpose();
    speaker_means.push_back(std::move(mean));
    speaker_counts.push_back(static_cast<int64_t>(rows.size()));
  }
  sw /= static_cast<double>(n - n_speakers);
  sb /= static_cast<double>(n);
  sw = (0.5 * (sw + sw.transpose())).eval();
  sb = (0.5 * (sb + sb.transpose())).eval();

  double lda_ridge = kLdaRidgeScale * sw.trace() / static_cast<double>(d1);
  Eigen::MatrixXd whiten = SymPower(sw, -0.5, lda_ridge);
  EigenDecomposition fisher = SymEig(whiten * sb * whiten);
  model.lda = whiten * fisher.vectors.leftCols(d2);

  // Two-covariance PLDA by moments on the LDA outputs.  The covariances
  // need speaker labels and come from the training rows; the global mean
  // is a pure location parameter, so it is anchored on the centering set
  // like every other location in the chain.  When centering_set == train
  // this reduces to the mean of the training projections.
  Eigen::MatrixXd u = z * (*model.lda);
  Eigen::MatrixXd zc = CenterProject(model, centering_set);
  LengthNormalizeRows(&zc);
  PldaParams plda;
  plda.mu = ((zc * (*model.lda)).colwise().mean()).transpose();

  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(d2, d2);
  Eigen::MatrixXd means(n_speakers, d2);
  double inv_count_sum = 0.0;
  {
    int64_t k = 0;
    for (const auto &[label, rows] : groups) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d2);
      for (int64_t r : rows) mean += u.row(r).transpose();
      mean /= static_cast<double>(rows.size());
      for (int64_t r : rows) {
        Eigen::VectorXd c = u.row(r).transpose() - mean;
        within.noalias() += c * c.transpose();
      }
      means.row(k++) = mean.transpose();
      inv_count_sum += 1.0 / static_cast<double>(rows.size());
    }
  }
  within /= static_cast<double>(n - n_speakers);
  within = (0.5 * (within + within.transpose())).eval();
  {
    EigenDecomposition eig = SymEig(within);
    if (!(eig.values(d2 - 1) > 0.0) ||
        eig.values(d2 - 1) <= kPdTol * eig.values(0))
      throw InsufficientDataError(
          "within-speaker covariance is singular; need more utterances "
          "relative to the lda dimension");
  }

  // The covariance of speaker means overshoots the between covariance by
  // within/n per speaker; subtract at the harmonic mean count and clamp
  // the result to PSD.
  Eigen::VectorXd mean_of_means = means.colwise().mean().transpose();
  Eigen::MatrixXd centered = means.rowwise() - mean_of_means.transpose();
  Eigen::MatrixXd means_cov = (centered.transpose() * centered) /
                              static_cast<double>(n_speakers - 1);
  double harmonic = static_cast<double>(n_speakers) / inv_count_sum;
  Eigen::MatrixXd between_raw = means_cov - within / harmonic;
  between_raw = (0.5 * (between_raw + between_raw.transpose())).eval();
  EigenDecomposition beig = SymEig(between_raw);
  plda.between = beig.vectors * beig.values.cwiseMax(0.0).asDiagonal() *
                 beig.vectors.transpose();
  plda.between = (0.5 * (plda.between + plda.between.transpose())).eval();
  plda.within = within;
  model.plda = std::move(plda);
  return model;
}

Eigen::VectorXd TransformEmbedding(const BackendModel &model,
                                   const Eigen::VectorXd &x, Depth depth) {
  if (model.center_mean.size() == 0)
    throw StateError("backend model is not fitted");
  if (x.size() != model.InputDim())
    throw ValidationError("embedding dimension " + std::to_string(x.size()) +
                          " does not match model dimension " +
                          std::to_string(model.InputDim()));
  Eigen::VectorXd v = x - model.center_mean;
  if (depth == Depth::kCentered) return v;
  if (model.pca.rows() != model.InputDim())
    throw StateError("backend model has no pca stage");
  v = (v.transpose() * model.pca).transpose();
  if (depth == Depth::kPca) return v;
  double norm = v.norm();
  if (!(norm > 0.0))
    throw DegenerateInputError("zero vector at length normalization");
  v /= norm;
  if (depth == Depth::kLnorm) return v;
  if (!model.lda) throw StateError("backend model has no lda stage");
  return (v.transpose() * (*model.lda)).transpose();
}

PldaScorer::PldaScorer(const PldaParams &params) {
  int64_t d = params.mu.size();
  if (d < 1 || params.between.rows() != d || params.between.cols() != d ||
      params.within.rows() != d || params.within.cols() != d)
    throw ValidationError("plda parameter dimensions disagree");
  if (!params.mu.allFinite() || !params.between.allFinite() ||
      !params.within.allFinite())
    throw ValidationError("plda parameters contain non-finite values");
  mu_ = params.mu;
  InverseWithLogDet sum =
      InvertPd(params.within + 2.0 * params.between, "within + 2*between");
  InverseWithLogDet within = InvertPd(params.within, "within covariance");
  InverseWithLogDet total =
      InvertPd(params.within + params.between, "total covariance");
  inv_sum_ = std::move(sum.inv);
  inv_within_ = std::move(within.inv);
  inv_total_ = std::move(total.inv);
  logdet_sum_ = sum.logdet;
  logdet_within_ = within.logdet;
  logdet_total_ = total.logdet;
}

double PldaScorer::Score(const Eigen::VectorXd &enroll,
                         const Eigen::VectorXd &test) const {
  if (enroll.size() != mu_.size() || test.size() != mu_.size())
    throw ValidationError("plda input dimension does not match model");
  // Rotate the pair into independent coordinates: a = (u+v)/sqrt(2) has
  // covariance within + 2*between under the same-speaker hypothesis and
  // total under the different-speaker one; b = (u-v)/sqrt(2) has within
  // and total respectively.  The rotation makes the score exactly
  // symmetric: swapping the arguments only flips the sign of b.
  Eigen::VectorXd u = enroll - mu_;
  Eigen::VectorXd v = test - mu_;
  Eigen::VectorXd a = (u + v) * M_SQRT1_2;
  Eigen::VectorXd b = (u - v) * M_SQRT1_2;
  double same = a.dot(inv_sum_ * a) + b.dot(inv_within_ * b) + logdet_sum_ +
                logdet_within_;
  double diff = a.dot(inv_total_ * a) + b.dot(inv_total_ * b) +
                2.0 * logdet_total_;
  return 0.5 * (diff - same);
}

double PldaScore(const BackendModel &model, const Eigen::VectorXd &enroll,
                 const Eigen::VectorXd &test) {
  if (!model.plda) throw StateError("backend model has no plda stage");
  return PldaScorer(*model.plda).Score(enroll, test);
}

double CosineScore(const Eigen::VectorXd &enroll,
                   const Eigen::VectorXd &test) {
  if (enroll.size() != test.size())
    throw ValidationError("cosine inputs of different dimension");
  double ne = enroll.norm();
  double nt = test.norm();
  if (!(ne > 0.0) || !(nt > 0.0))
    throw DegenerateInputError("cosine score of a zero vector");
  return std::clamp(enroll.dot(test) / (ne * nt), -1.0, 1.0);
}

ScoreSet ScoreTrials(const BackendModel &model, const EmbeddingSet &enroll,
                     const EmbeddingSet &test, const TrialList &trials,
                     Scoring scoring, Depth cosine_depth) {
  enroll.Validate();
  test.Validate();
  trials.Validate();
  Depth depth = scoring == Scoring::kPlda ? Depth::kLda : cosine_depth;
  std::optional<PldaScorer> scorer;
  if (scoring == Scoring::kPlda) {
    if (!model.plda) throw StateError("backend model has no plda stage");
    scorer.emplace(*model.plda);
  }

  // Transform each referenced embedding once.
  auto make_index = [](const EmbeddingSet &set) {
    std::unordered_map<std::string, int64_t> index;
    index.reserve(set.ids.size());
    for (size_t i = 0; i < set.ids.size(); i++)
      index.emplace(set.ids[i], static_cast<int64_t>(i));
    return index;
  };
  std::unordered_map<std::string, int64_t> enroll_index = make_index(enroll);
  std::unordered_map<std::string, int64_t> test_index = make_index(test);
  std::unordered_map<int64_t, Eigen::VectorXd> enroll_cache, test_cache;

  auto transformed = [&](const EmbeddingSet &set,
                         const std::unordered_map<std::string, int64_t> &index,
                         std::unordered_map<int64_t, Eigen::VectorXd> &cache,
                         const std::string &id,
                         const char *side) -> const Eigen::VectorXd & {
    auto it = index.find(id);
    if (it == index.end())
      throw LookupError(std::string("unknown ") + side + " id \"" + id +
                        "\"");
    auto [cit, inserted] = cache.try_emplace(it->second);
    if (inserted)
      cit->second =
          TransformEmbedding(model, set.vectors.row(it->second).transpose(),
                             depth);
    return cit->second;
  };

  ScoreSet out;
  out.pairs = trials.pairs;
  out.scores.reserve(trials.pairs.size());
  for (const auto &[enroll_id, test_id] : trials.pairs) {
    const Eigen::VectorXd &e =
        transformed(enroll, enroll_index, enroll_cache, enroll_id,
                     "enrollment");
    const Eigen::VectorXd &t =
        transformed(test, test_index, test_cache, test_id, "test");
    out.scores.push_back(scoring == Scoring::kPlda ? scorer->Score(e, t)
                                                   : CosineScore(e, t));
  }
  return out;
}

void WriteBackendModel(const BackendModel &model, const std::string &path) {
  int64_t dim = model.InputDim();
  if (dim < 1) throw ValidationError("cannot serialize an unfitted model");
  if (!model.center_mean.allFinite() || !model.pca.allFinite())
    throw ValidationError("model contains non-finite values");
  if (model.pca.rows() != dim)
    throw ValidationError("pca stage does not match model dimension");
  uint8_t flags = 1 | 2;
  uint32_t d1 = static_cast<uint32_t>(model.pca.cols());
  uint32_t d2 = 0;
  if (model.lda) {
    if (model.lda->rows() != model.pca.cols() || !model.lda->allFinite())
      throw ValidationError("lda stage does not match pca dimension");
    flags |= 4;
    d2 = static_cast<uint32_t>(model.lda->cols());
  }
  if (model.plda) {
    if (!model.lda)
      throw ValidationError("plda stage present without lda stage");
    if (model.plda->mu.size() != model.lda->cols())
      throw ValidationError("plda stage does not match lda dimension");
    if (!model.plda->mu.allFinite() || !model.plda->between.allFinite() ||
        !model.plda->within.allFinite())
      throw ValidationError("model contains non-finite values");
    flags |= 8;
  }

  std::string out;
  out.reserve(17 + ModelPayloadBytes(static_cast<uint32_t>(dim), d1, d2,
                                     flags));
  out += kModelMagic;
  PutU16(&out, kModelVersion);
  PutU32(&out, static_cast<uint32_t>(dim));
  PutU32(&out, d1);
  PutU32(&out, d2);
  out.push_back(static_cast<char>(flags));
  PutVector(&out, model.center_mean);
  PutMatrixRowMajor(&out, model.pca);
  if (model.lda) PutMatrixRowMajor(&out, *model.lda);
  if (model.plda) {
    PutVector(&out, model.plda->mu);
    PutMatrixRowMajor(&out, model.plda->between);
    PutMatrixRowMajor(&out, model.plda->within);
  }
  WriteWholeFile(path, out);
}

BackendModel ReadBackendModel(const std::string &path) {
  std::string data = ReadWholeFile(path);
  ByteReader reader(data, path);
  if (reader.GetBytes(4) != kModelMagic)
    throw ParseError(path + ": bad magic, not a backend model file");
  uint16_t version = reader.GetU16();
  if (version != kModelVersion)
    throw ParseError(path + ": unsupported model version " +
                     std::to_string(version));
  uint32_t dim = reader.GetU32();
  uint32_t d1 = reader.GetU32();
  uint32_t d2 = reader.GetU32();
  uint8_t flags = static_cast<uint8_t>(reader.GetBytes(1)[0]);
  if (flags & ~0x0f)
    throw ParseError(path + ": unknown stage flags");
  if ((flags & 3) != 3)
    throw ParseError(path + ": model lacks centering or pca stage");
  if ((flags & 8) && !(flags & 4))
    throw ParseError(path + ": plda stage present without lda stage");
  if (dim == 0 || d1 == 0 || d1 > dim || ((flags & 4) && (d2 == 0 ||
                                                          d2 > d1)))
    throw ParseError(path + ": inconsistent model dimensions");
  if (reader.Remaining() != ModelPayloadBytes(dim, d1, d2, flags))
    throw ParseError(path + ": file size does not match declared stages");

  BackendModel model;
  model.center_mean = GetVector(&reader, dim);
  model.pca = GetMatrixRowMajor(&reader, dim, d1);
  if (flags & 4) model.lda = GetMatrixRowMajor(&reader, d1, d2);
  if (flags & 8) {
    PldaParams plda;
    plda.mu = GetVector(&reader, d2);
    plda.between = GetMatrixRowMajor(&reader, d2, d2);
    plda.within = GetMatrixRowMajor(&reader, d2, d2);
    model.plda = std::move(plda);
  }
  reader.ExpectEnd();

  if (!model.center_mean.allFinite() || !model.pca.allFinite() ||
      (model.lda && !model.lda->allFinite()) ||
      (model.plda &&
       (!model.plda->mu.allFinite() || !model.plda->between.allFinite() ||
        !model.plda->within.allFinite())))
    throw ValidationError(path + ": model contains non-finite values");
  Eigen::MatrixXd gram = model.pca.transpose() * model.pca;
  if ((gram - Eigen::MatrixXd::Identity(d1, d1)).cwiseAbs().maxCoeff() >
      1e-10)
    throw ValidationError(path + ": pca columns are not orthonormal");
  return model;
}

}  // namespace evadapt
