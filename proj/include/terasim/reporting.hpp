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

#ifndef TERASIM_REPORTING_HPP
#define TERASIM_REPORTING_HPP

#include "terasim/engine.hpp"
#include "terasim/nade.hpp"
#include "terasim/trajectory_log.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace terasim
{

/// Average human-driver crash rate per mile used when no baseline is given.
inline constexpr double kHumanCrashRatePerMile = 1.86e-6;

struct ReportOptions
{
  /// Human baseline in crashes per mile; the comparison ratio is omitted when empty.
  std::optional<double> human_baseline{kHumanCrashRatePerMile};
  /// Seconds before a crash during which an active adversity still counts towards it.
  double attribution_window{10.0};
  double wall_seconds{0.0};
  /// NDE records for the same scenario, used for the acceleration factor.
  std::span<const EpisodeRecord> nde_records{};
};

struct AdversitySummary
{
  std::size_t activations{0};
  std::size_t attributed_crashes{0};
  /// Sum of episode weights over attributed crashes.
  double attributed_weight{0.0};
};

struct SafetyReport
{
  CrashRateEstimate estimate;
  std::map<std::string, AdversitySummary> adversities;
  double total_miles{0.0};
  std::size_t total_episodes{0};
  double wall_seconds{0.0};
  std::optional<double> acceleration_factor;
  std::optional<double> human_baseline;
  std::optional<double> baseline_ratio;
  bool insufficient_events{false};
  double attribution_window{10.0};
  SimMode mode{SimMode::kNde};
  std::string episode_convention;
};

/// True when either crash partner had `spec` active at some point in
/// [crash_time - window, crash_time].
bool attributed_to(const EpisodeRecord & record, const std::string & spec, double window);

/// Throws std::invalid_argument for empty input or zero driven miles.
SafetyReport build_report(std::span<const EpisodeRecord> records, const ReportOptions & options = {});

Json to_json(const SafetyReport & r);
std::string format_report(const SafetyReport & r);

enum class ImpactKind { kRear, kFront, kSide };
std::string_view to_string(ImpactKind k);

struct TimelineEvent
{
  double time{0.0};
  std::string type;
  std::string spec;
  std::string subject;
};

struct SpeedSample
{
  double time{0.0};
  double speed{0.0};
};

struct GapSample
{
  double time{0.0};
  std::string partner;
  double gap{0.0};
};

struct EventTimeline
{
  CrashEvent crash;
  double window_start{0.0};
  double window_end{0.0};
  /// The reference actor: the AV when it is a partner, otherwise partners[0].
  std::string ego;
  std::vector<TimelineEvent> events;
  std::vector<SpeedSample> ego_speed;
  std::vector<GapSample> partner_gaps;
  double ego_min_speed{0.0};
  ImpactKind impact{ImpactKind::kSide};
  /// Partner's position relative to the ego at impact, in the ego frame.
  double impact_longitudinal{0.0};
  double impact_lateral{0.0};
};

/// The last 15 s before `crash`, clipped to the episode start. Throws
/// std::invalid_argument when the log has no snapshot at the crash time with both partners.
EventTimeline event_timeline(const TrajectoryLog & log, const CrashEvent & crash, double span = 15.0);

/// The ending crash recorded in a full log, if any.
std::optional<CrashEvent> find_crash(const TrajectoryLog & log);
CrashEvent crash_from_json(const Json & doc);

Json to_json(const EventTimeline & t);

}  // namespace terasim

#endif  // TERASIM_REPORTING_HPP
