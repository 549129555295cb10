#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace spherefield {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// A stream is addressed by (key, stream words); the block counter walks
// within the stream. Two generators with different stream words never
// share output blocks, so substreams derived from a master seed are
// disjoint by construction and independent of scheduling.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t key, std::uint32_t stream_hi, std::uint32_t stream_lo)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_hi_(stream_hi),
        stream_lo_(stream_lo) {}

  Block block(std::uint64_t index) const {
    return apply({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                  stream_lo_, stream_hi_},
                 key_);
  }

  // The raw bijection, exposed for known-answer tests.
  static Block apply(Block ctr, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block single_round(const Block& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_hi_;
  std::uint32_t stream_lo_;
};

// SplitMix64 finalizer; used only to spread (seed, domain) into a key.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Purpose tags so that e.g. KL coefficient draws and direct-sampler draws
// keyed by the same master seed never overlap.
enum class StreamDomain : std::uint32_t {
  kKlCoefficients = 1,
  kDirectSampler = 2,
  kGeometryProbe = 3,
  kVolumeMc = 4,
  kPairScan = 5,
  kSweep = 6,
};

// Sequential uniform / standard-normal draws from one Philox substream.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, StreamDomain domain, std::uint32_t stream_hi,
            std::uint32_t stream_lo)
      : gen_(mix64(seed ^ (static_cast<std::uint64_t>(domain) << 56)), stream_hi, stream_lo) {}

  // Uniform on (0, 1), 53-bit resolution.
  double uniform() {
    if (pos_ >= 2) refill();
    return uniforms_[pos_++];
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Box-Muller on two fresh uniforms.
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill_normal(std::span<double> out) {
    for (double& v : out) v = normal();
  }

 private:
  void refill() {
    const auto b = gen_.block(counter_++);
    uniforms_[0] = to_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
    uniforms_[1] = to_unit((static_cast<std::uint64_t>(b[2]) << 32) | b[3]);
    pos_ = 0;
  }

  static double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32 gen_;
  std::uint64_t counter_ = 0;
  std::array<double, 2> uniforms_{};
  int pos_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spherefield
