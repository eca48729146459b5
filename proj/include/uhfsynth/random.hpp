/*
 * uhfsynth - synthetic training data and evaluation tools for brain MRI
 *
 * Copyright 2026 The uhfsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace uhfsynth {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure
/// function of (counter, key): any draw can be recomputed from its position
/// alone, which is what makes parallel fills reproducible.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// SplitMix64 finalizer; used to derive keys and stream ids.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a over a tag string, for naming substreams.
constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// A named random stream over Philox. Sequential draws advance an internal
/// position; the `*_at` accessors address an absolute position and leave the
/// cursor alone.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(mix64(seed)), static_cast<std::uint32_t>(mix64(seed) >> 32)},
        stream_id_(stream_id) {}

  /// Independent child stream identified by a tag.
  RandomStream substream(std::string_view tag) const { return derive(hash_tag(tag)); }
  RandomStream substream(std::uint64_t id) const { return derive(id); }

  std::uint64_t stream_id() const { return stream_id_; }

  /// 128 random bits at an absolute position.
  Philox4x32::Counter block_at(std::uint64_t position) const {
    return Philox4x32::generate({static_cast<std::uint32_t>(position), static_cast<std::uint32_t>(position >> 32),
                                 static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
                                key_);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform_at(std::uint64_t position) const { return to_unit(block_at(position), 0); }

  /// Standard normal via Box-Muller on one block.
  double normal_at(std::uint64_t position) const {
    const auto b = block_at(position);
    const double u1 = 1.0 - to_unit(b, 0);  // (0, 1]
    const double u2 = to_unit(b, 2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double uniform() { return uniform_at(position_++); }
  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) {
    const double v = lo + (hi - lo) * uniform();
    return v > hi ? hi : v;
  }
  double normal() { return normal_at(position_++); }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const auto b = block_at(position_++);
      const std::uint64_t x = (std::uint64_t{b[0]} << 32) | b[1];
      if (x < limit) return x % n;
    }
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;

  RandomStream(Philox4x32::Key key, std::uint64_t id) : key_(key), stream_id_(id) {}

  RandomStream derive(std::uint64_t id) const { return RandomStream(key_, mix64(stream_id_ ^ mix64(id))); }

  static double to_unit(const Philox4x32::Counter& b, int first) {
    const std::uint64_t bits = ((std::uint64_t{b[first]} << 32) | b[first + 1]) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
};

/// Stream for one generated sample, independent of scheduling order.
inline RandomStream sample_stream(std::uint64_t master_seed, std::uint64_t subject_id, std::uint64_t sample_index) {
  return RandomStream(master_seed, mix64(subject_id ^ mix64(sample_index + 0x5851F42D4C957F2Dull)));
}

}  // namespace uhfsynth
