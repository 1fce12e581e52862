// Copyright 2026 The doorledger Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary canonical serialization used for every hash input and for the block
// file. Fields are concatenated in declared order; integers are big-endian
// fixed width; strings and byte strings carry a u32 length prefix.

#ifndef DOORLEDGER_CODEC_H_
#define DOORLEDGER_CODEC_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "doorledger/common.h"

namespace doorledger {

class Encoder {
 public:
  Encoder& U8(uint8_t v);
  Encoder& U32(uint32_t v);
  Encoder& U64(uint64_t v);
  Encoder& I64(int64_t v) { return U64(static_cast<uint64_t>(v)); }
  Encoder& Bool(bool v) { return U8(v ? 1 : 0); }
  Encoder& Str(std::string_view s);
  Encoder& Blob(ByteView b);
  Encoder& Time(Timestamp t) { return I64(ToMillis(t)); }
  // Raw bytes with no length prefix.
  Encoder& Raw(ByteView b);

  const Bytes& bytes() const& { return out_; }
  Bytes bytes() && { return std::move(out_); }

 private:
  Bytes out_;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DecodeError on truncated or malformed input. Callers at API
// boundaries translate it into a Status.
class Decoder {
 public:
  explicit Decoder(ByteView data) : data_(data) {}

  uint8_t U8();
  uint32_t U32();
  uint64_t U64();
  int64_t I64() { return static_cast<int64_t>(U64()); }
  bool Bool();
  std::string Str();
  Bytes Blob();
  Timestamp Time() { return FromMillis(I64()); }
  Bytes Raw(size_t n);

  size_t remaining() const { return data_.size() - pos_; }
  size_t position() const { return pos_; }
  void ExpectEnd() const;

 private:
  void Need(size_t n) const;

  ByteView data_;
  size_t pos_ = 0;
};

}  // namespace doorledger

#endif  // DOORLEDGER_CODEC_H_
