// Copyright 2026 The terasim contributors
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

#ifndef TERASIM_RNG_HPP
#define TERASIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace terasim
{

namespace detail
{
constexpr std::uint64_t splitmix64(std::uint64_t z)
{
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// FNV-1a; used to derive stream keys from subsystem names.
constexpr std::uint64_t stream_hash(std::string_view name)
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based generator: draw i of stream (key, stream) is a pure function of
/// (key, stream, i). Streams never share state, so adding draws to one subsystem
/// leaves every other stream untouched.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  CounterRng(std::uint64_t key, std::uint64_t stream)
  : key_(detail::splitmix64(key ^ detail::splitmix64(stream)))
  {
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64()
  {
    const std::uint64_t c = counter_++;
    return detail::splitmix64(detail::splitmix64(key_ + c * 0xD1B54A32D192ED03ULL) ^ c);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal()
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

  /// A child stream keyed off this stream and a label (e.g. an agent id).
  CounterRng derive(std::string_view label) const { return CounterRng(key_, stream_hash(label)); }

private:
  std::uint64_t key_{0};
  std::uint64_t counter_{0};
};

/// Per-episode root of all randomness; subsystems draw from named streams.
class EpisodeRng
{
public:
  explicit EpisodeRng(std::uint64_t seed) : seed_(seed) {}

  CounterRng stream(std::string_view subsystem) const { return CounterRng(seed_, stream_hash(subsystem)); }
  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
};

}  // namespace terasim

#endif  // TERASIM_RNG_HPP
