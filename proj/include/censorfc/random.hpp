// Copyright 2026 The censorfc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace censorfc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// The 64-bit seed is the key; the upper 64 counter bits select an independent
/// stream, the lower 64 bits count blocks within it.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0) : key_{lo(seed), hi(seed)}, stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      buffer_ = bijection({lo(block_), hi(block_), lo(stream_), hi(stream_)}, key_);
      ++block_;
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// Independent generator sharing this seed.
  Philox4x32 split(std::uint64_t stream) const { return Philox4x32(seed(), stream); }
  std::uint64_t seed() const { return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0]; }
  std::uint64_t stream() const { return stream_; }

  /// The raw 10-round keyed bijection on one counter block.
  static constexpr Block bijection(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      ctr = {hi(p1) ^ ctr[1] ^ key[0], lo(p1), hi(p0) ^ ctr[3] ^ key[1], lo(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static constexpr std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int index_ = 4;
};

/// Convenience draws over a Philox stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) : engine_(seed, stream) {}
  explicit Rng(Philox4x32 engine) : engine_(engine) {}

  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine_); }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  int poisson(double mean) { return mean > 0.0 ? std::poisson_distribution<int>(mean)(engine_) : 0; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  Rng split(std::uint64_t stream) const { return Rng(engine_.split(stream)); }
  Philox4x32& engine() { return engine_; }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
};

/// Seed for the i-th child of `seed`; distinct children get unrelated keys.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child) {
  const auto b = Philox4x32::bijection(
      {static_cast<std::uint32_t>(child), static_cast<std::uint32_t>(child >> 32), 0x5EEDu, 0xC0FFEEu},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

}  // namespace censorfc
