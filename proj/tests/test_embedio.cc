// tests/test_embedio.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "evadapt/embedio.h"
#include "evadapt/error.h"
#include "test_util.h"

using namespace evadapt;
using test::TestRng;

namespace {

// Fresh scratch path per test file run; removed eagerly by each case.
std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("evadapt_io_" + name))
      .string();
}

void WriteText(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string ReadText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

EmbeddingSet SampleSet(bool labeled) {
  TestRng rng(5);
  EmbeddingSet set = test::MakeSet(rng.Matrix(7, 4), "utt", "mic");
  if (labeled) {
    set.labels.emplace();
    for (int i = 0; i < 7; i++)
      set.labels->push_back("spk" + std::to_string(i / 2));
  }
  // Exercise values that stress text formatting.
  set.vectors(0, 0) = 1.0;
  set.vectors(0, 1) = -2.5;
  set.vectors(1, 0) = 1.0 / 3.0;
  set.vectors(1, 1) = 1e-300;
  return set;
}

}  // namespace

TEST_CASE("binary embedding round-trip is bit-exact") {
  for (bool labeled : {false, true}) {
    EmbeddingSet set = SampleSet(labeled);
    std::string path = TempPath("round.evb");
    WriteEmbeddings(set, path, FileFormat::kBinary);
    EmbeddingSet back = ReadEmbeddings(path, FileFormat::kBinary);
    CHECK(back.ids == set.ids);
    CHECK(back.labels == set.labels);
    CHECK(back.domain == set.domain);
    CHECK((back.vectors.array() == set.vectors.array()).all());
    std::filesystem::remove(path);
  }
}

TEST_CASE("tsv embedding round-trip reproduces exact doubles") {
  // 17 significant digits round-trip any double through decimal.
  EmbeddingSet set = SampleSet(true);
  std::string path = TempPath("round.tsv");
  WriteEmbeddings(set, path, FileFormat::kTsv);
  EmbeddingSet back = ReadEmbeddings(path, FileFormat::kTsv);
  CHECK(back.ids == set.ids);
  CHECK(back.labels == set.labels);
  CHECK((back.vectors.array() == set.vectors.array()).all());
  std::filesystem::remove(path);
}

TEST_CASE("tsv layout is the documented header plus one record per line") {
  EmbeddingSet set;
  set.ids = {"id"};
  set.domain = "domain";
  set.vectors.resize(1, 2);
  set.vectors << 1.0, -2.5;
  std::string path = TempPath("layout.tsv");
  WriteEmbeddings(set, path, FileFormat::kTsv);
  CHECK(ReadText(path) == "#EVEC v1 dim=2\nid\t-\tdomain\t1\t-2.5\n");
  std::filesystem::remove(path);
}

TEST_CASE("missing file raises an i/o error naming the path") {
  CHECK_THROWS_WITH_AS(ReadEmbeddings("/no/such/file.evb",
                                      FileFormat::kBinary),
                       doctest::Contains("/no/such/file.evb"), IoError);
  CHECK_THROWS_AS(ReadTrials("/no/such/trials.tsv"), IoError);
  CHECK_THROWS_AS(ReadScores("/no/such/scores.tsv"), IoError);
}

TEST_CASE("unwritable path raises an i/o error") {
  EmbeddingSet set = SampleSet(false);
  CHECK_THROWS_AS(WriteEmbeddings(set, "/no/such/dir/out.evb",
                                  FileFormat::kBinary),
                  IoError);
}

TEST_CASE("tsv parse errors name the offending line") {
  std::string path = TempPath("bad.tsv");

  WriteText(path, "");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ParseError);

  WriteText(path, "#WRONG header\n");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ParseError);

  WriteText(path, "#EVEC v1 dim=2\nu1\t-\tdom\t1.0\n");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ParseError);

  WriteText(path, "#EVEC v1 dim=2\nu1\t-\tdom\t1.0\tx\n");
  CHECK_THROWS_WITH_AS(ReadEmbeddings(path, FileFormat::kTsv),
                       doctest::Contains(":2"), ParseError);

  WriteText(path, "#EVEC v1 dim=2\nu1\t-\tdom\t1.0\tinf\n");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ValidationError);

  WriteText(path,
            "#EVEC v1 dim=1\nu1\t-\tdom\t1.0\nu1\t-\tdom\t2.0\n");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ValidationError);

  WriteText(path,
            "#EVEC v1 dim=1\nu1\t-\tdom\t1.0\nu2\tspk\tdom\t2.0\n");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ValidationError);

  WriteText(path,
            "#EVEC v1 dim=1\nu1\t-\tdomA\t1.0\nu2\t-\tdomB\t2.0\n");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kTsv), ValidationError);

  std::filesystem::remove(path);
}

TEST_CASE("binary parse errors reject malformed structure") {
  std::string path = TempPath("bad.evb");

  WriteText(path, "NOPE");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kBinary), ParseError);

  // Truncation inside the header and inside a record.
  EmbeddingSet set = SampleSet(false);
  std::string good = TempPath("good.evb");
  WriteEmbeddings(set, good, FileFormat::kBinary);
  std::string bytes = ReadText(good);
  WriteText(path, bytes.substr(0, 9));
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kBinary), ParseError);
  WriteText(path, bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kBinary), ParseError);

  // Trailing garbage after the declared records.
  WriteText(path, bytes + "junk");
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kBinary), ParseError);

  // A record count far beyond the file size must not allocate.
  std::string huge = bytes;
  huge[4] = '\xff';
  huge[5] = '\xff';
  huge[6] = '\xff';
  huge[7] = '\x7f';
  WriteText(path, huge);
  CHECK_THROWS_AS(ReadEmbeddings(path, FileFormat::kBinary), ParseError);

  std::filesystem::remove(path);
  std::filesystem::remove(good);
}

TEST_CASE("trial list round-trip with and without keys") {
  TrialList trials;
  trials.pairs = {{"e1", "t1"}, {"e1", "t2"}, {"e2", "t1"}};
  std::string path = TempPath("trials.tsv");

  WriteTrials(trials, path);
  TrialList back = ReadTrials(path);
  CHECK(back.pairs == trials.pairs);
  CHECK_FALSE(back.HasKeys());

  trials.keys = std::vector<bool>{true, false, false};
  WriteTrials(trials, path);
  back = ReadTrials(path);
  CHECK(back.pairs == trials.pairs);
  REQUIRE(back.HasKeys());
  CHECK(*back.keys == *trials.keys);
  CHECK(ReadText(path) ==
        "e1\tt1\ttarget\ne1\tt2\tnontarget\ne2\tt1\tnontarget\n");
  std::filesystem::remove(path);
}

TEST_CASE("trial key tokens other than target/nontarget are rejected") {
  std::string path = TempPath("badtrials.tsv");
  WriteText(path, "u1\tu2\tmaybe\n");
  CHECK_THROWS_AS(ReadTrials(path), ParseError);
  WriteText(path, "u1\tu2\ttarget\nu3\tu4\n");
  CHECK_THROWS_AS(ReadTrials(path), ValidationError);
  WriteText(path, "u1\n");
  CHECK_THROWS_AS(ReadTrials(path), ParseError);
  WriteText(path, "");
  CHECK_THROWS_AS(ReadTrials(path), ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("score file round-trip preserves exact values") {
  ScoreSet scores;
  scores.pairs = {{"e1", "t1"}, {"e2", "t2"}};
  scores.scores = {1.0 / 3.0, -7.25e-12};
  std::string path = TempPath("scores.tsv");
  WriteScores(scores, path);
  ScoreSet back = ReadScores(path);
  CHECK(back.pairs == scores.pairs);
  CHECK(back.scores[0] == scores.scores[0]);
  CHECK(back.scores[1] == scores.scores[1]);

  WriteText(path, "e1\tt1\tnotanumber\n");
  CHECK_THROWS_AS(ReadScores(path), ParseError);
  WriteText(path, "e1\tt1\tnan\n");
  CHECK_THROWS_AS(ReadScores(path), ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("format_double emits 17 significant digits") {
  CHECK(FormatDouble(1.0) == "1");
  CHECK(FormatDouble(-2.5) == "-2.5");
  double third = 1.0 / 3.0;
  CHECK(std::stod(FormatDouble(third)) == third);
}

TEST_CASE("ids with tabs are rejected by the text writer") {
  EmbeddingSet set = SampleSet(false);
  set.ids[0] = "bad\tid";
  std::string path = TempPath("tabid.tsv");
  CHECK_THROWS_AS(WriteEmbeddings(set, path, FileFormat::kTsv),
                  ValidationError);
}
