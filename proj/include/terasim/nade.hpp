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

#ifndef TERASIM_NADE_HPP
#define TERASIM_NADE_HPP

#include "terasim/json_util.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace terasim
{

enum class SimMode { kNde, kNade };
std::string_view to_string(SimMode mode);
SimMode parse_mode(std::string_view text);

struct LikelihoodLedger
{
  double log_weight{0.0};
  std::uint64_t roll_count{0};
};

/// Adds ln(p/q) on activation and ln((1-p)/(1-q)) otherwise.
/// Throws ConfigError for p > q, q = 1 with p < 1, or an activation with p = 0.
void record_roll(LikelihoodLedger & ledger, double p, double q, bool activated);

struct ActivationRecord
{
  std::string spec;
  std::string subject;
  double time{0.0};
  /// When the adversity ended; empty if still active when the episode stopped.
  std::optional<double> until;
  bool operator==(const ActivationRecord &) const = default;
};

struct EpisodeRecord
{
  std::uint64_t seed{0};
  SimMode mode{SimMode::kNde};
  double miles{0.0};
  double nominal_miles{0.5};
  bool crash{false};
  std::optional<double> crash_time;
  std::vector<std::string> crash_partners;
  double log_weight{0.0};
  std::uint64_t rolls{0};
  std::vector<ActivationRecord> activations;
  double duration{0.0};
  std::string digest;
  bool aborted{false};

  double weight() const;
  bool operator==(const EpisodeRecord &) const = default;
};

Json to_json(const EpisodeRecord & r);
EpisodeRecord record_from_json(const Json & doc);

/// One canonical JSON object per line.
std::string serialize_records(std::span<const EpisodeRecord> records);
std::vector<EpisodeRecord> parse_records(std::string_view text);
/// Reads a records file, or every *.jsonl file of a directory in name order.
std::vector<EpisodeRecord> load_records(const std::filesystem::path & path);

struct CrashRateEstimate
{
  double r_hat{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  std::size_t n_episodes{0};
  std::size_t n_crashes_raw{0};
  double effective_sample_size{0.0};
  double nominal_miles{0.0};
  double std_error{0.0};
  std::size_t n_aborted{0};
};

Json to_json(const CrashRateEstimate & e);

/// Weighted crashes per nominal mile with a 95% normal-approximation interval.
/// Aborted records are excluded. Throws std::invalid_argument on empty input or
/// mixed nominal episode lengths.
CrashRateEstimate estimate_crash_rate(std::span<const EpisodeRecord> records);

/// Episodes needed to reach `target_relative_error` half-width at 95%.
double episodes_to_target(std::span<const EpisodeRecord> records, double target_relative_error);

/// Ratio of episodes-to-target NDE over NADE. Throws InsufficientEvents when
/// either set has no crash.
double acceleration_factor(std::span<const EpisodeRecord> nde, std::span<const EpisodeRecord> nade, double target_relative_error = 0.2);

}  // namespace terasim

#endif  // TERASIM_NADE_HPP
