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

#include "doorledger/crypto.h"

#include <sodium.h>

#include <algorithm>
#include <stdexcept>

namespace doorledger {

void EnsureCryptoInitialized() {
  static const bool ok = [] { return sodium_init() >= 0; }();
  if (!ok) throw std::runtime_error("libsodium failed to initialize");
}

Hash32 Sha256(ByteView data) {
  EnsureCryptoInitialized();
  Hash32 out;
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

absl::StatusOr<Hash32> HashFromHex(std::string_view hex) {
  auto bytes = FromHex(hex);
  if (!bytes.ok()) return bytes.status();
  if (bytes->size() != 32) return absl::InvalidArgumentError("hash length");
  Hash32 h;
  std::copy(bytes->begin(), bytes->end(), h.begin());
  return h;
}

SigningKey GenerateSigningKey() {
  EnsureCryptoInitialized();
  SigningKey key;
  key.secret.resize(crypto_sign_SECRETKEYBYTES);
  key.public_key.bytes.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_keypair(key.public_key.bytes.data(), key.secret.data());
  return key;
}

SigningKey SigningKeyFromSeed(ByteView seed) {
  EnsureCryptoInitialized();
  if (seed.size() != crypto_sign_SEEDBYTES) {
    throw std::invalid_argument("seed must be 32 bytes");
  }
  SigningKey key;
  key.secret.resize(crypto_sign_SECRETKEYBYTES);
  key.public_key.bytes.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_seed_keypair(key.public_key.bytes.data(), key.secret.data(),
                           seed.data());
  return key;
}

absl::StatusOr<SigningKey> SigningKeyFromSecret(ByteView secret) {
  EnsureCryptoInitialized();
  if (secret.size() != crypto_sign_SECRETKEYBYTES) {
    return absl::InvalidArgumentError("secret key must be 64 bytes");
  }
  SigningKey key;
  key.secret.assign(secret.begin(), secret.end());
  key.public_key.bytes.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_ed25519_sk_to_pk(key.public_key.bytes.data(), key.secret.data());
  return key;
}

Signature SignPayload(const SigningKey& key, ByteView payload) {
  EnsureCryptoInitialized();
  Signature sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, payload.data(), payload.size(),
                       key.secret.data());
  return sig;
}

bool VerifyPayload(const PublicKey& key, ByteView payload,
                   const Signature& signature) {
  EnsureCryptoInitialized();
  if (key.bytes.size() != crypto_sign_PUBLICKEYBYTES ||
      signature.size() != crypto_sign_BYTES) {
    return false;
  }
  return crypto_sign_verify_detached(signature.data(), payload.data(),
                                     payload.size(), key.bytes.data()) == 0;
}

Bytes RandomBytes(size_t n) {
  EnsureCryptoInitialized();
  Bytes out(n);
  randombytes_buf(out.data(), n);
  return out;
}

}  // namespace doorledger
