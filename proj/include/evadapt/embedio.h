// evadapt/embedio.h

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

#ifndef EVADAPT_EMBEDIO_H_
#define EVADAPT_EMBEDIO_H_

#include <string>

#include "evadapt/embedding.h"

namespace evadapt {

enum class FileFormat { kTsv, kBinary };

/// Reads an embedding set.
///
/// Text format: header line "#EVEC v1 dim=D", then one record per line,
/// tab-separated: id, label ("-" when absent), domain, D float fields.
/// Labels must be present on all records or on none; the domain tag must
/// be identical on every record.
///
/// Binary format: magic "EVB1", u32 record count, u32 dimension (both
/// little-endian), then per record: u16-length-prefixed UTF-8 id, label
/// (zero length when absent) and domain, followed by D little-endian f64.
///
/// Throws ParseError (naming line or byte offset) on malformed input,
/// ValidationError when a well-formed file violates set invariants, and
/// IoError when the file cannot be opened.
EmbeddingSet ReadEmbeddings(const std::string &path, FileFormat format);

/// Writes an embedding set in the chosen format.  Binary round-trips
/// bit-exactly; text emits 17 significant digits so values round-trip to
/// the same double.  Throws IoError on failure, naming the path.
void WriteEmbeddings(const EmbeddingSet &set, const std::string &path,
                     FileFormat format);

/// Reads a trial list: lines "enroll_id<TAB>test_id" with an optional
/// third field "target"/"nontarget".  Keys must be present on all lines
/// or on none.
TrialList ReadTrials(const std::string &path);

/// Writes a trial list in the same format.
void WriteTrials(const TrialList &trials, const std::string &path);

/// Score files: lines "enroll_id<TAB>test_id<TAB>score", score printed
/// with 17 significant digits.
ScoreSet ReadScores(const std::string &path);
void WriteScores(const ScoreSet &scores, const std::string &path);

/// Formats a double with 17 significant digits ("%.17g"), enough to
/// reproduce the exact value on read-back.
std::string FormatDouble(double value);

}  // namespace evadapt

#endif  // EVADAPT_EMBEDIO_H_
