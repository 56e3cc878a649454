// evadapt/embedio.cc

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

#include "evadapt/embedio.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string_view>
#include <utility>
#include <vector>

#include "binio.h"
#include "evadapt/error.h"

namespace evadapt {

namespace {

// Re-throws set-level validation failures with the file name attached.
template <typename T>
void ValidateWithContext(const T &obj, const std::string &path) {
  try {
    obj.Validate();
  } catch (const ValidationError &e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// Pulls the next line (without terminator) out of data; handles a final
// line with no trailing newline and strips one trailing '\r'.
class LineReader {
 public:
  explicit LineReader(const std::string &data) : data_(data), pos_(0) {}

  bool Next(std::string_view *line) {
    if (pos_ >= data_.size()) return false;
    size_t nl = data_.find('\n', pos_);
    size_t end = (nl == std::string::npos) ? data_.size() : nl;
    *line = std::string_view(data_.data() + pos_, end - pos_);
    if (!line->empty() && line->back() == '\r') line->remove_suffix(1);
    pos_ = (nl == std::string::npos) ? data_.size() : nl + 1;
    lineno_++;
    return true;
  }

  int lineno() const { return lineno_; }

 private:
  const std::string &data_;
  size_t pos_;
  int lineno_ = 0;
};

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string Location(const std::string &path, int lineno) {
  return path + ":" + std::to_string(lineno);
}

double ParseDoubleField(std::string_view field, const std::string &path,
                        int lineno) {
  double v = 0.0;
  const char *end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end)
    throw ParseError(Location(path, lineno) + ": bad float field \"" +
                     std::string(field) + "\"");
  if (!std::isfinite(v))
    throw ValidationError(Location(path, lineno) + ": non-finite value \"" +
                          std::string(field) + "\"");
  return v;
}

// Text fields are tab-separated and newline-terminated, so the payload
// must not contain either.
void CheckTextField(const std::string &s, const char *what) {
  if (s.find_first_of("\t\n\r") != std::string::npos)
    throw ValidationError(std::string(what) + " \"" + s +
                          "\" contains a tab or newline, not representable "
                          "in the text format");
}

void CheckBinaryField(const std::string &s, const char *what) {
  if (s.size() > 0xffff)
    throw ValidationError(std::string(what) + " longer than 65535 bytes, "
                          "not representable in the binary format");
}

constexpr std::string_view kTsvHeaderPrefix = "#EVEC v1 dim=";
constexpr std::string_view kBinaryMagic = "EVB1";

EmbeddingSet ReadTsvEmbeddings(const std::string &path) {
  std::string data = ReadWholeFile(path);
  LineReader lines(data);
  std::string_view header;
  if (!lines.Next(&header))
    throw ParseError(path + ": empty file, expected \"#EVEC v1\" header");
  if (header.substr(0, kTsvHeaderPrefix.size()) != kTsvHeaderPrefix)
    throw ParseError(Location(path, 1) +
                     ": malformed header, expected \"#EVEC v1 dim=<D>\"");
  std::string_view dim_str = header.substr(kTsvHeaderPrefix.size());
  uint32_t dim = 0;
  const char *dim_end = dim_str.data() + dim_str.size();
  auto [p, ec] = std::from_chars(dim_str.data(), dim_end, dim);
  if (ec != std::errc() || p != dim_end)
    throw ParseError(Location(path, 1) + ": malformed dimension \"" +
                     std::string(dim_str) + "\"");

  EmbeddingSet set;
  std::vector<std::string> labels;
  std::vector<double> values;
  bool has_labels = false;
  std::string_view line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields = SplitTabs(line);
    if (fields.size() != 3 + static_cast<size_t>(dim))
      throw ParseError(Location(path, lines.lineno()) + ": expected " +
                       std::to_string(3 + dim) + " fields, got " +
                       std::to_string(fields.size()));
    bool first = set.ids.empty();
    set.ids.emplace_back(fields[0]);
    bool labeled = fields[1] != "-";
    if (first) {
      has_labels = labeled;
      set.domain = std::string(fields[2]);
    } else if (labeled != has_labels) {
      throw ValidationError(Location(path, lines.lineno()) +
                            ": mixes labeled and unlabeled records");
    } else if (fields[2] != set.domain) {
      throw ValidationError(Location(path, lines.lineno()) + ": domain \"" +
                            std::string(fields[2]) +
                            "\" differs from earlier domain \"" + set.domain +
                            "\"");
    }
    if (labeled) labels.emplace_back(fields[1]);
    for (uint32_t j = 0; j < dim; j++)
      values.push_back(ParseDoubleField(fields[3 + j], path, lines.lineno()));
  }
  int64_t n = static_cast<int64_t>(set.ids.size());
  set.vectors = Eigen::Map<const Eigen::Matrix<
      double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<int64_t>(dim));
  if (has_labels) set.labels = std::move(labels);
  ValidateWithContext(set, path);
  return set;
}

EmbeddingSet ReadBinaryEmbeddings(const std::string &path) {
  std::string data = ReadWholeFile(path);
  ByteReader reader(data, path);
  if (reader.GetBytes(4) != kBinaryMagic)
    throw ParseError(path + ": bad magic, not a binary embedding file");
  uint32_t count = reader.GetU32();
  uint32_t dim = reader.GetU32();
  // Cheapest possible record is three empty strings plus the vector;
  // rejecting oversized declarations here keeps corrupt headers from
  // triggering a huge allocation below.
  uint64_t min_record = 6 + static_cast<uint64_t>(dim) * 8;
  if (static_cast<uint64_t>(count) * min_record > reader.Remaining())
    throw ParseError(path + ": declared " + std::to_string(count) +
                     " records of dimension " + std::to_string(dim) +
                     " exceed the file size");

  EmbeddingSet set;
  set.vectors.resize(count, dim);
  set.ids.reserve(count);
  std::vector<std::string> labels;
  bool has_labels = false;
  for (uint32_t i = 0; i < count; i++) {
    set.ids.emplace_back(reader.GetBytes(reader.GetU16()));
    uint16_t label_len = reader.GetU16();
    std::string label(reader.GetBytes(label_len));
    std::string domain(reader.GetBytes(reader.GetU16()));
    if (i == 0) {
      has_labels = label_len > 0;
      set.domain = std::move(domain);
    } else if ((label_len > 0) != has_labels) {
      throw ValidationError(path + ": record " + std::to_string(i) +
                            " mixes labeled and unlabeled records");
    } else if (domain != set.domain) {
      throw ValidationError(path + ": record " + std::to_string(i) +
                            " has domain \"" + domain +
                            "\", expected \"" + set.domain + "\"");
    }
    if (has_labels) labels.push_back(std::move(label));
    for (uint32_t j = 0; j < dim; j++) set.vectors(i, j) = reader.GetF64();
  }
  reader.ExpectEnd();
  if (has_labels) set.labels = std::move(labels);
  ValidateWithContext(set, path);
  return set;
}

void WriteTsvEmbeddings(const EmbeddingSet &set, const std::string &path) {
  CheckTextField(set.domain, "domain");
  std::string out;
  out.reserve(64 + static_cast<size_t>(set.NumRows()) *
                       (24 * static_cast<size_t>(set.Dim()) + 32));
  out += kTsvHeaderPrefix;
  out += std::to_string(set.Dim());
  out += '\n';
  for (int64_t i = 0; i < set.NumRows(); i++) {
    const std::string &id = set.ids[static_cast<size_t>(i)];
    CheckTextField(id, "id");
    out += id;
    out += '\t';
    if (set.HasLabels()) {
      const std::string &label = (*set.labels)[static_cast<size_t>(i)];
      CheckTextField(label, "label");
      out += label;
    } else {
      out += '-';
    }
    out += '\t';
    out += set.domain;
    for (int64_t j = 0; j < set.Dim(); j++) {
      out += '\t';
      out += FormatDouble(set.vectors(i, j));
    }
    out += '\n';
  }
  WriteWholeFile(path, out);
}

void WriteBinaryEmbeddings(const EmbeddingSet &set, const std::string &path) {
  CheckBinaryField(set.domain, "domain");
  std::string out;
  out.reserve(12 + static_cast<size_t>(set.NumRows()) *
                       (static_cast<size_t>(set.Dim()) * 8 + 48));
  out += kBinaryMagic;
  PutU32(&out, static_cast<uint32_t>(set.NumRows()));
  PutU32(&out, static_cast<uint32_t>(set.Dim()));
  for (int64_t i = 0; i < set.NumRows(); i++) {
    const std::string &id = set.ids[static_cast<size_t>(i)];
    CheckBinaryField(id, "id");
    PutU16(&out, static_cast<uint16_t>(id.size()));
    out += id;
    if (set.HasLabels()) {
      const std::string &label = (*set.labels)[static_cast<size_t>(i)];
      CheckBinaryField(label, "label");
      PutU16(&out, static_cast<uint16_t>(label.size()));
      out += label;
    } else {
      PutU16(&out, 0);
    }
    PutU16(&out, static_cast<uint16_t>(set.domain.size()));
    out += set.domain;
    for (int64_t j = 0; j < set.Dim(); j++) PutF64(&out, set.vectors(i, j));
  }
  WriteWholeFile(path, out);
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[32];
  int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<size_t>(len));
}

EmbeddingSet ReadEmbeddings(const std::string &path, FileFormat format) {
  return format == FileFormat::kTsv ? ReadTsvEmbeddings(path)
                                    : ReadBinaryEmbeddings(path);
}

void WriteEmbeddings(const EmbeddingSet &set, const std::string &path,
                     FileFormat format) {
  set.Validate();
  if (format == FileFormat::kTsv)
    WriteTsvEmbeddings(set, path);
  else
    WriteBinaryEmbeddings(set, path);
}

TrialList ReadTrials(const std::string &path) {
  std::string data = ReadWholeFile(path);
  LineReader lines(data);
  TrialList trials;
  std::vector<bool> keys;
  bool has_keys = false;
  std::string_view line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields = SplitTabs(line);
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError(Location(path, lines.lineno()) +
                       ": expected 2 or 3 fields, got " +
                       std::to_string(fields.size()));
    bool first = trials.pairs.empty();
    bool keyed = fields.size() == 3;
    if (first) {
      has_keys = keyed;
    } else if (keyed != has_keys) {
      throw ValidationError(Location(path, lines.lineno()) +
                            ": mixes keyed and unkeyed trials");
    }
    if (keyed) {
      if (fields[2] == "target") {
        keys.push_back(true);
      } else if (fields[2] == "nontarget") {
        keys.push_back(false);
      } else {
        throw ParseError(Location(path, lines.lineno()) + ": bad key \"" +
                         std::string(fields[2]) +
                         "\", expected \"target\" or \"nontarget\"");
      }
    }
    trials.pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  if (has_keys) trials.keys = std::move(keys);
  ValidateWithContext(trials, path);
  return trials;
}

void WriteTrials(const TrialList &trials, const std::string &path) {
  trials.Validate();
  std::string out;
  for (size_t i = 0; i < trials.pairs.size(); i++) {
    CheckTextField(trials.pairs[i].first, "enroll id");
    CheckTextField(trials.pairs[i].second, "test id");
    out += trials.pairs[i].first;
    out += '\t';
    out += trials.pairs[i].second;
    if (trials.HasKeys()) {
      out += '\t';
      out += (*trials.keys)[i] ? "target" : "nontarget";
    }
    out += '\n';
  }
  WriteWholeFile(path, out);
}

ScoreSet ReadScores(const std::string &path) {
  std::string data = ReadWholeFile(path);
  LineReader lines(data);
  ScoreSet scores;
  std::string_view line;
  while (lines.Next(&line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields = SplitTabs(line);
    if (fields.size() != 3)
      throw ParseError(Location(path, lines.lineno()) +
                       ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    scores.pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
    scores.scores.push_back(ParseDoubleField(fields[2], path, lines.lineno()));
  }
  ValidateWithContext(scores, path);
  return scores;
}

void WriteScores(const ScoreSet &scores, const std::string &path) {
  scores.Validate();
  std::string out;
  for (size_t i = 0; i < scores.pairs.size(); i++) {
    CheckTextField(scores.pairs[i].first, "enroll id");
    CheckTextField(scores.pairs[i].second, "test id");
    out += scores.pairs[i].first;
    out += '\t';
    out += scores.pairs[i].second;
    out += '\t';
    out += FormatDouble(scores.scores[i]);
    out += '\n';
  }
  WriteWholeFile(path, out);
}

}  // namespace evadapt
