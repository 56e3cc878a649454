// evadapt/adapt.cc

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

#include "evadapt/adapt.h"

#include <cmath>
#include <cstdint>
#include <string_view>

#include "binio.h"
#include "evadapt/error.h"
#include "evadapt/linalg.h"

namespace evadapt {

namespace {

constexpr std::string_view kTransformMagic = "ADT1";

// Relative eigenvalue cutoff below which the out-of-domain covariance is
// considered rank-deficient, and the relative ridge applied then.  The
// ridge is conditional: adding it to a well-conditioned covariance would
// perturb the fitted map at the 1e-6 level for no benefit.
constexpr double kRankTol = 1e-10;
constexpr double kDeficientRidgeScale = 1e-6;

void CheckSameDim(const EmbeddingSet &ood, const EmbeddingSet &ind) {
  if (ood.Dim() != ind.Dim())
    throw ValidationError("dimension mismatch between domains: " +
                          std::to_string(ood.Dim()) + " vs " +
                          std::to_string(ind.Dim()));
}

void CheckConfig(const CoralPPConfig &cfg) {
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
    throw ValidationError("lambda must be positive and finite, got " +
                          std::to_string(cfg.lambda));
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha))
    throw ValidationError("alpha must be non-negative and finite, got " +
                          std::to_string(cfg.alpha));
}

void CheckTransform(const AdaptationTransform &t) {
  int64_t d = t.matrix.rows();
  if (d < 1 || t.matrix.cols() != d)
    throw ValidationError("transform matrix must be square and non-empty");
  if (t.pre_shift.size() != d || t.post_shift.size() != d)
    throw ValidationError("transform shift dimensions do not match matrix");
  if (!t.matrix.allFinite() || !t.pre_shift.allFinite() ||
      !t.post_shift.allFinite())
    throw ValidationError("transform contains non-finite values");
}

uint8_t MethodTag(AdaptMethod m) {
  switch (m) {
    case AdaptMethod::kIdentity: return 0;
    case AdaptMethod::kCoral: return 1;
    case AdaptMethod::kFda: return 2;
    case AdaptMethod::kCoralPP: return 3;
  }
  throw ValidationError("unknown adaptation method tag");
}

AdaptMethod TagMethod(uint8_t tag, const std::string &path) {
  switch (tag) {
    case 0: return AdaptMethod::kIdentity;
    case 1: return AdaptMethod::kCoral;
    case 2: return AdaptMethod::kFda;
    case 3: return AdaptMethod::kCoralPP;
    default:
      throw ParseError(path + ": unknown method tag " + std::to_string(tag));
  }
}

}  // namespace

AdaptationTransform IdentityTransform(int64_t dim) {
  if (dim < 1)
    throw ValidationError("transform dimension must be positive, got " +
                          std::to_string(dim));
  AdaptationTransform t;
  t.matrix = Eigen::MatrixXd::Identity(dim, dim);
  t.pre_shift = Eigen::VectorXd::Zero(dim);
  t.post_shift = Eigen::VectorXd::Zero(dim);
  t.method = AdaptMethod::kIdentity;
  return t;
}

AdaptationTransform CoralFitExact(const EmbeddingSet &ood,
                                  const EmbeddingSet &ind, double ridge) {
  CheckSameDim(ood, ind);
  CovarianceStats so = EstimateCovariance(ood);
  CovarianceStats si = EstimateCovariance(ind);
  AdaptationTransform t;
  t.matrix = SymPower(so.cov, -0.5, ridge) * SymPower(si.cov, 0.5, ridge);
  t.pre_shift = Eigen::VectorXd::Zero(ood.Dim());
  t.post_shift = Eigen::VectorXd::Zero(ood.Dim());
  t.method = AdaptMethod::kCoral;
  return t;
}

AdaptationTransform CoralFit(const EmbeddingSet &ood,
                             const EmbeddingSet &ind) {
  return CoralFitExact(ood, ind, 1.0);
}

AdaptationTransform FdaFit(const EmbeddingSet &ood, const EmbeddingSet &ind) {
  CheckSameDim(ood, ind);
  CovarianceStats so = EstimateCovariance(ood);
  CovarianceStats si = EstimateCovariance(ind);
  int64_t d = so.cov.rows();

  EigenDecomposition eo = SymEig(so.cov);
  double max_eig = std::max(eo.values(0), 0.0);
  double ridge = 0.0;
  if (!(eo.values(d - 1) > kRankTol * max_eig))
    ridge = kDeficientRidgeScale * so.cov.trace() / static_cast<double>(d);

  Eigen::MatrixXd w = SymPower(so.cov, -0.5, ridge);
  Eigen::MatrixXd h = SymPower(so.cov, 0.5, ridge);
  EigenDecomposition inner = SymEig(w * si.cov * w);
  Eigen::VectorXd floored = FloorSpectrum(inner.values, 1.0);
  Eigen::MatrixXd scale = inner.vectors *
                          floored.cwiseSqrt().asDiagonal() *
                          inner.vectors.transpose();

  AdaptationTransform t;
  t.matrix = w * scale * h;
  t.pre_shift = so.mean;
  t.post_shift = si.mean;
  t.method = AdaptMethod::kFda;
  return t;
}

Eigen::VectorXd ZScoreSpectrum(const Eigen::VectorXd &s) {
  int64_t n = s.size();
  if (!s.allFinite())
    throw ValidationError("spectrum contains non-finite values");
  if (n < 2)
    throw DegenerateSpectrumError(
        "spectrum normalization needs at least 2 values, got " +
        std::to_string(n));
  double mean = s.mean();
  double var = (s.array() - mean).square().sum() / static_cast<double>(n);
  double sd = std::sqrt(var);
  if (!(sd > 0.0))
    throw DegenerateSpectrumError(
        "constant spectrum, cannot normalize (zero standard deviation)");
  return (s.array() - mean) / sd;
}

Eigen::VectorXd FloorSpectrum(const Eigen::VectorXd &s, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("spectrum floor must be non-negative, got " +
                          std::to_string(alpha));
  if (!s.allFinite())
    throw ValidationError("spectrum contains non-finite values");
  return s.cwiseMax(alpha);
}

CoralPPParts CoralPPRegularize(const Eigen::MatrixXd &cov,
                               const CoralPPConfig &cfg) {
  CheckConfig(cfg);
  EigenDecomposition eig = SymEig(cov);
  CoralPPParts parts;
  parts.spectrum.raw = eig.values;
  parts.spectrum.normalized = ZScoreSpectrum(eig.values);
  parts.spectrum.floored = FloorSpectrum(parts.spectrum.normalized, cfg.alpha);
  parts.spectrum.alpha = cfg.alpha;
  parts.vectors = eig.vectors;
  parts.regularized = eig.vectors * parts.spectrum.floored.asDiagonal() *
                      eig.vectors.transpose();
  parts.regularized =
      (0.5 * (parts.regularized + parts.regularized.transpose())).eval();
  return parts;
}

AdaptationTransform CoralPPFit(const EmbeddingSet &ood,
                               const EmbeddingSet &ind,
                               const CoralPPConfig &cfg) {
  CheckSameDim(ood, ind);
  CheckConfig(cfg);
  CovarianceStats so = EstimateCovariance(ood);
  CovarianceStats si = EstimateCovariance(ind);
  CoralPPParts parts = CoralPPRegularize(si.cov, cfg);

  AdaptationTransform t;
  t.matrix = SymPower(so.cov, -0.5, cfg.lambda) *
             SymPower(parts.regularized, 0.5, cfg.lambda);
  t.pre_shift = Eigen::VectorXd::Zero(ood.Dim());
  t.post_shift = Eigen::VectorXd::Zero(ood.Dim());
  t.method = AdaptMethod::kCoralPP;
  t.params = cfg;
  t.spectrum = parts.spectrum;
  return t;
}

EmbeddingSet ApplyTransform(const AdaptationTransform &t,
                            const EmbeddingSet &set) {
  CheckTransform(t);
  if (t.Dim() != set.Dim())
    throw ValidationError("transform dimension " + std::to_string(t.Dim()) +
                          " does not match embedding dimension " +
                          std::to_string(set.Dim()));
  EmbeddingSet out = set;
  // The identity method is a verbatim copy; even multiplying by I could
  // flip the sign of a negative zero.
  if (t.method == AdaptMethod::kIdentity) return out;
  out.vectors = ((set.vectors.rowwise() - t.pre_shift.transpose()) *
                 t.matrix).rowwise() +
                t.post_shift.transpose();
  return out;
}

void WriteTransform(const AdaptationTransform &t, const std::string &path) {
  CheckTransform(t);
  if (t.params) CheckConfig(*t.params);
  uint32_t dim = static_cast<uint32_t>(t.matrix.rows());
  std::string out;
  out.reserve(25 + (2 * dim + static_cast<size_t>(dim) * dim) * 8);
  out += kTransformMagic;
  out.push_back(static_cast<char>(MethodTag(t.method)));
  PutU32(&out, dim);
  double lambda = std::nan("");
  double alpha = std::nan("");
  if (t.params) {
    lambda = t.params->lambda;
    alpha = t.params->alpha;
  }
  PutF64(&out, lambda);
  PutF64(&out, alpha);
  for (uint32_t i = 0; i < dim; i++) PutF64(&out, t.pre_shift(i));
  for (uint32_t i = 0; i < dim; i++) PutF64(&out, t.post_shift(i));
  for (uint32_t i = 0; i < dim; i++)
    for (uint32_t j = 0; j < dim; j++) PutF64(&out, t.matrix(i, j));
  WriteWholeFile(path, out);
}

AdaptationTransform ReadTransform(const std::string &path) {
  std::string data = ReadWholeFile(path);
  ByteReader reader(data, path);
  if (reader.GetBytes(4) != kTransformMagic)
    throw ParseError(path + ": bad magic, not a transform file");
  uint8_t tag = static_cast<uint8_t>(reader.GetBytes(1)[0]);
  AdaptMethod method = TagMethod(tag, path);
  uint32_t dim = reader.GetU32();
  if (dim == 0) throw ParseError(path + ": zero transform dimension");
  uint64_t need = 16 + (2 * static_cast<uint64_t>(dim) +
                        static_cast<uint64_t>(dim) * dim) * 8;
  if (reader.Remaining() != need)
    throw ParseError(path + ": file size does not match dimension " +
                     std::to_string(dim));

  AdaptationTransform t;
  t.method = method;
  double lambda = reader.GetF64();
  double alpha = reader.GetF64();
  if (!std::isnan(lambda) || !std::isnan(alpha)) {
    if (std::isnan(lambda) || std::isnan(alpha))
      throw ParseError(path + ": half-missing adaptation parameters");
    t.params = CoralPPConfig{lambda, alpha};
  }
  t.pre_shift.resize(dim);
  t.post_shift.resize(dim);
  t.matrix.resize(dim, dim);
  for (uint32_t i = 0; i < dim; i++) t.pre_shift(i) = reader.GetF64();
  for (uint32_t i = 0; i < dim; i++) t.post_shift(i) = reader.GetF64();
  for (uint32_t i = 0; i < dim; i++)
    for (uint32_t j = 0; j < dim; j++) t.matrix(i, j) = reader.GetF64();
  reader.ExpectEnd();
  try {
    CheckTransform(t);
    if (t.params) CheckConfig(*t.params);
  } catch (const ValidationError &e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (t.method == AdaptMethod::kIdentity &&
      (t.matrix != Eigen::MatrixXd::Identity(dim, dim) ||
       !t.pre_shift.isZero(0.0) || !t.post_shift.isZero(0.0)))
    throw ValidationError(path +
                          ": identity-tagged transform is not the identity");
  return t;
}

}  // namespace evadapt
