// evadapt/binio.h

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

// Internal little-endian byte plumbing shared by the binary file formats.
// Not part of the public headers.

#ifndef EVADAPT_SRC_BINIO_H_
#define EVADAPT_SRC_BINIO_H_

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "evadapt/error.h"

namespace evadapt {

inline std::string ReadWholeFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::streamsize size = in.tellg();
  std::string data(static_cast<size_t>(size), '\0');
  in.seekg(0);
  if (size > 0) in.read(data.data(), size);
  if (!in) throw IoError("read failure on " + path);
  return data;
}

inline void WriteWholeFile(const std::string &path, const std::string &data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

inline void PutU16(std::string *out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; i++)
    out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void PutF64(std::string *out, double d) {
  uint64_t v = std::bit_cast<uint64_t>(d);
  for (int i = 0; i < 8; i++)
    out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Cursor over a byte buffer; every read is bounds-checked and failures
// report the byte offset, so truncated files fail cleanly.
class ByteReader {
 public:
  ByteReader(const std::string &data, const std::string &path)
      : data_(data), path_(path), pos_(0) {}

  uint16_t GetU16() {
    Require(2);
    uint16_t v = static_cast<uint16_t>(Byte(0) | (Byte(1) << 8));
    pos_ += 2;
    return v;
  }

  uint32_t GetU32() {
    Require(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; i--) v = (v << 8) | Byte(i);
    pos_ += 4;
    return v;
  }

  double GetF64() {
    Require(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; i--) v = (v << 8) | Byte(i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }

  std::string_view GetBytes(size_t n) {
    Require(n);
    std::string_view sv(data_.data() + pos_, n);
    pos_ += n;
    return sv;
  }

  size_t Remaining() const { return data_.size() - pos_; }

  void ExpectEnd() const {
    if (pos_ != data_.size())
      throw ParseError(path_ + ": " + std::to_string(data_.size() - pos_) +
                       " trailing bytes at offset " + std::to_string(pos_));
  }

 private:
  uint32_t Byte(int i) const {
    return static_cast<uint8_t>(data_[pos_ + static_cast<size_t>(i)]);
  }

  void Require(size_t n) const {
    if (data_.size() - pos_ < n)
      throw ParseError(path_ + ": unexpected end of file at offset " +
                       std::to_string(pos_));
  }

  const std::string &data_;
  const std::string &path_;
  size_t pos_;
};

}  // namespace evadapt

#endif  // EVADAPT_SRC_BINIO_H_
