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

#include "doorledger/codec.h"

#include <limits>

namespace doorledger {

Encoder& Encoder::U8(uint8_t v) {
  out_.push_back(v);
  return *this;
}

Encoder& Encoder::U32(uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
  return *this;
}

Encoder& Encoder::U64(uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
  return *this;
}

Encoder& Encoder::Str(std::string_view s) { return Blob(AsBytes(s)); }

Encoder& Encoder::Blob(ByteView b) {
  if (b.size() > std::numeric_limits<uint32_t>::max()) {
    throw std::length_error("field exceeds u32 length prefix");
  }
  U32(static_cast<uint32_t>(b.size()));
  return Raw(b);
}

Encoder& Encoder::Raw(ByteView b) {
  out_.insert(out_.end(), b.begin(), b.end());
  return *this;
}

void Decoder::Need(size_t n) const {
  if (remaining() < n) throw DecodeError("truncated input");
}

uint8_t Decoder::U8() {
  Need(1);
  return data_[pos_++];
}

uint32_t Decoder::U32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

uint64_t Decoder::U64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

bool Decoder::Bool() {
  uint8_t v = U8();
  if (v > 1) throw DecodeError("bad bool");
  return v == 1;
}

std::string Decoder::Str() {
  uint32_t n = U32();
  Need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

Bytes Decoder::Blob() { return Raw(U32()); }

Bytes Decoder::Raw(size_t n) {
  Need(n);
  Bytes b(data_.begin() + static_cast<ptrdiff_t>(pos_),
          data_.begin() + static_cast<ptrdiff_t>(pos_ + n));
  pos_ += n;
  return b;
}

void Decoder::ExpectEnd() const {
  if (remaining() != 0) throw DecodeError("trailing bytes");
}

}  // namespace doorledger
