#include "reloc/rng.hpp"

#include <stdexcept>

#include <sodium.h>

namespace reloc {

namespace {

void store_le(std::uint64_t x, unsigned char* out) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(x >> (8 * i));
}

bool sodium_ready() {
  static const bool ok = sodium_init() >= 0;
  return ok;
}

}  // namespace

Rng::Rng(RngSpec spec, std::uint64_t substream) {
  if (!sodium_ready()) throw std::runtime_error("libsodium failed to initialize");
  std::uint64_t x = splitmix64(spec.seed) ^ splitmix64(spec.stream + 0x51ed27ULL);
  for (int i = 0; i < 4; ++i) {
    x = splitmix64(x);
    store_le(x, key_.data() + 8 * i);
  }
  store_le(substream, nonce_.data());
}

void Rng::refill() {
  static constexpr unsigned char zeros[sizeof(buf_)] = {};
  unsigned char bytes[sizeof(buf_)];
  // Each call covers two 64-byte ChaCha blocks.
  crypto_stream_chacha20_xor_ic(bytes, zeros, sizeof(bytes), nonce_.data(), block_, key_.data());
  block_ += sizeof(bytes) / 64;
  for (std::size_t i = 0; i < buf_.size(); ++i) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[8 * i + static_cast<std::size_t>(b)];
    buf_[i] = v;
  }
  pos_ = 0;
}

}  // namespace reloc
