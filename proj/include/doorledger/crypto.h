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

#ifndef DOORLEDGER_CRYPTO_H_
#define DOORLEDGER_CRYPTO_H_

#include <array>
#include <string>

#include "doorledger/common.h"

namespace doorledger {

using Hash32 = std::array<uint8_t, 32>;

// Idempotent; every entry point below calls it.
void EnsureCryptoInitialized();

Hash32 Sha256(ByteView data);
inline Hash32 Sha256(std::string_view data) { return Sha256(AsBytes(data)); }

inline std::string HashHex(const Hash32& h) { return ToHex(h); }
absl::StatusOr<Hash32> HashFromHex(std::string_view hex);

// Ed25519. Public keys are 32 bytes, secret keys 64 bytes (seed || public),
// signatures 64 bytes.
struct PublicKey {
  Bytes bytes;
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct SigningKey {
  Bytes secret;
  PublicKey public_key;
};

using Signature = Bytes;

SigningKey GenerateSigningKey();
// Deterministic key from a 32-byte seed; used for fixtures and test vectors.
SigningKey SigningKeyFromSeed(ByteView seed);
absl::StatusOr<SigningKey> SigningKeyFromSecret(ByteView secret);

Signature SignPayload(const SigningKey& key, ByteView payload);
// False on any malformed key or signature.
bool VerifyPayload(const PublicKey& key, ByteView payload,
                   const Signature& signature);

// Cryptographically secure random bytes.
Bytes RandomBytes(size_t n);

}  // namespace doorledger

#endif  // DOORLEDGER_CRYPTO_H_
