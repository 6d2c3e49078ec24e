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

#include "terasim/reporting.hpp"

#include "terasim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace terasim
{

bool attributed_to(const EpisodeRecord & record, const std::string & spec, double window)
{
  if (!record.crash || !record.crash_time) return false;
  const double t = *record.crash_time;
  for (const auto & a : record.activations) {
    if (a.spec != spec) continue;
    if (std::find(record.crash_partners.begin(), record.crash_partners.end(), a.subject) == record.crash_partners.end()) continue;
    if (a.time > t) continue;
    if (!a.until || *a.until >= t - window) return true;
  }
  return false;
}

SafetyReport build_report(std::span<const EpisodeRecord> records, const ReportOptions & options)
{
  if (records.empty()) throw std::invalid_argument("build_report: no records");
  if (!(options.attribution_window >= 0.0)) throw std::invalid_argument("build_report: attribution window must be >= 0");
  SafetyReport r;
  r.attribution_window = options.attribution_window;
  r.wall_seconds = options.wall_seconds;
  r.mode = records.front().mode;
  for (const auto & rec : records) {
    if (rec.aborted) continue;
    ++r.total_episodes;
    r.total_miles += rec.miles;
  }
  if (!(r.total_miles > 0.0)) throw std::invalid_argument("build_report: records cover zero driven miles");
  r.estimate = estimate_crash_rate(records);
  r.insufficient_events = r.estimate.n_crashes_raw == 0;

  for (const auto & rec : records) {
    if (rec.aborted) continue;
    std::set<std::string> seen;
    for (const auto & a : rec.activations) {
      ++r.adversities[a.spec].activations;
      seen.insert(a.spec);
    }
    for (const auto & spec : seen) {
      if (attributed_to(rec, spec, options.attribution_window)) {
        auto & s = r.adversities[spec];
        ++s.attributed_crashes;
        s.attributed_weight += rec.weight();
      }
    }
  }

  if (!options.nde_records.empty()) {
    try {
      r.acceleration_factor = acceleration_factor(options.nde_records, records);
    } catch (const InsufficientEvents &) {
      r.acceleration_factor.reset();
    }
  }
  if (options.human_baseline) {
    if (!(*options.human_baseline > 0.0)) throw std::invalid_argument("build_report: human baseline must be > 0");
    r.human_baseline = options.human_baseline;
    r.baseline_ratio = r.estimate.r_hat / *options.human_baseline;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "crash-truncated, nominal %.6g mi per episode", r.estimate.nominal_miles);
  r.episode_convention = buf;
  return r;
}

Json to_json(const SafetyReport & r)
{
  Json adv = Json::object();
  for (const auto & [id, s] : r.adversities) {
    adv[id] = {{"activations", s.activations}, {"attributed_crashes", s.attributed_crashes}, {"attributed_weight", s.attributed_weight}};
  }
  Json j = {
    {"estimate", to_json(r.estimate)},
    {"adversities", std::move(adv)},
    {"exposure", {{"miles", r.total_miles}, {"episodes", r.total_episodes}, {"wall_seconds", r.wall_seconds}}},
    {"insufficient_events", r.insufficient_events},
    {"attribution_window", r.attribution_window},
    {"mode", to_string(r.mode)},
    {"episode_convention", r.episode_convention},
  };
  j["acceleration_factor"] = r.acceleration_factor ? Json(*r.acceleration_factor) : Json(nullptr);
  j["human_baseline"] = r.human_baseline ? Json(*r.human_baseline) : Json(nullptr);
  j["baseline_ratio"] = r.baseline_ratio ? Json(*r.baseline_ratio) : Json(nullptr);
  return j;
}

std::string format_report(const SafetyReport & r)
{
  std::ostringstream out;
  char line[256];
  const auto & e = r.estimate;
  std::snprintf(line, sizeof line, "mode               %s\n", std::string(to_string(r.mode)).c_str());
  out << line;
  std::snprintf(line, sizeof line, "episodes           %zu (%zu aborted)\n", r.total_episodes, e.n_aborted);
  out << line;
  std::snprintf(line, sizeof line, "miles driven       %.3f\n", r.total_miles);
  out << line;
  std::snprintf(line, sizeof line, "crashes (raw)      %zu%s\n", e.n_crashes_raw, r.insufficient_events ? "  [insufficient events]" : "");
  out << line;
  std::snprintf(line, sizeof line, "crash rate         %.4e /mi  95%% CI [%.4e, %.4e]\n", e.r_hat, e.ci_low, e.ci_high);
  out << line;
  std::snprintf(line, sizeof line, "effective samples  %.1f\n", e.effective_sample_size);
  out << line;
  if (r.baseline_ratio) {
    std::snprintf(line, sizeof line, "vs human baseline  %.4g x (baseline %.3e /mi)\n", *r.baseline_ratio, *r.human_baseline);
    out << line;
  }
  if (r.acceleration_factor) {
    std::snprintf(line, sizeof line, "acceleration       %.4g x\n", *r.acceleration_factor);
    out << line;
  }
  std::snprintf(line, sizeof line, "convention         %s\n", r.episode_convention.c_str());
  out << line;
  if (!r.adversities.empty()) {
    std::snprintf(line, sizeof line, "\n%-24s %12s %12s %14s\n", "adversity", "activations", "attributed", "weight");
    out << line;
    for (const auto & [id, s] : r.adversities) {
      std::snprintf(line, sizeof line, "%-24s %12zu %12zu %14.6g\n", id.c_str(), s.activations, s.attributed_crashes, s.attributed_weight);
      out << line;
    }
    std::snprintf(line, sizeof line, "(attribution window %.3g s)\n", r.attribution_window);
    out << line;
  }
  return out.str();
}

std::string_view to_string(ImpactKind k)
{
  switch (k) {
    case ImpactKind::kRear:
      return "REAR";
    case ImpactKind::kFront:
      return "FRONT";
    case ImpactKind::kSide:
      return "SIDE";
  }
  return "SIDE";
}

CrashEvent crash_from_json(const Json & doc)
{
  CrashEvent c;
  c.time = doc.at("t").get<double>();
  c.partners = {doc.at("partners").at(0).get<std::string>(), doc.at("partners").at(1).get<std::string>()};
  c.relative_speed = doc.value("relative_speed", 0.0);
  if (doc.contains("witness")) {
    const auto & w = doc.at("witness");
    c.witness.overlap = true;
    c.witness.depth = w.value("depth", 0.0);
    if (w.contains("axis")) c.witness.axis = Vec2d(w.at("axis").at(0).get<double>(), w.at("axis").at(1).get<double>());
  }
  c.involves_av = doc.value("av", false);
  return c;
}

std::optional<CrashEvent> find_crash(const TrajectoryLog & log)
{
  for (const auto & snap : log.snapshots()) {
    if (!snap.is_object() || !snap.contains("events")) continue;
    for (const auto & e : snap.at("events")) {
      if (e.value("type", "") == "crash") return crash_from_json(e.at("crash"));
    }
  }
  return std::nullopt;
}

namespace
{
const Json * find_actor(const Json & snap, const std::string & id)
{
  for (const auto & a : snap.at("actors")) {
    if (a.at("id").get<std::string>() == id) return &a;
  }
  return nullptr;
}

double footprint_gap(const Json & a, const Json & b)
{
  const double dx = b.at("x").get<double>() - a.at("x").get<double>();
  const double dy = b.at("y").get<double>() - a.at("y").get<double>();
  return std::hypot(dx, dy) - (a.at("length").get<double>() + b.at("length").get<double>()) / 2.0;
}
}  // namespace

EventTimeline event_timeline(const TrajectoryLog & log, const CrashEvent & crash, double span)
{
  constexpr double kEps = 1e-6;
  EventTimeline tl;
  tl.crash = crash;
  tl.window_end = crash.time;
  tl.window_start = std::max(0.0, crash.time - span);
  const auto & p = crash.partners;
  tl.ego = (p[1] == "av") ? p[1] : p[0];
  const std::string other = tl.ego == p[0] ? p[1] : p[0];

  const auto snaps = log.snapshots();
  bool found = false;
  tl.ego_min_speed = std::numeric_limits<double>::infinity();
  for (const auto & snap : snaps) {
    if (!snap.is_object() || !snap.contains("t")) continue;
    const double t = snap.at("t").get<double>();
    if (t < tl.window_start - kEps || t > tl.window_end + kEps) continue;
    for (const auto & e : snap.at("events")) {
      const std::string type = e.value("type", "");
      if (type == "activation" || type == "expire" || type == "retire") {
        tl.events.push_back({e.at("t").get<double>(), type, e.at("spec").get<std::string>(), e.at("subject").get<std::string>()});
      } else if (type == "crash") {
        tl.events.push_back({t, type, "", p[0] + "," + p[1]});
      }
    }
    const Json * ego = find_actor(snap, tl.ego);
    const Json * partner = find_actor(snap, other);
    if (ego) {
      const double v = ego->at("speed").get<double>();
      tl.ego_speed.push_back({t, v});
      tl.ego_min_speed = std::min(tl.ego_min_speed, v);
      if (partner) tl.partner_gaps.push_back({t, other, footprint_gap(*ego, *partner)});
    }
    if (std::abs(t - crash.time) <= kEps && ego && partner) {
      found = true;
      const double heading = ego->at("heading").get<double>();
      const Vec2d u = unit_from_heading(heading);
      const Vec2d n = left_normal(u);
      const Vec2d d(partner->at("x").get<double>() - ego->at("x").get<double>(), partner->at("y").get<double>() - ego->at("y").get<double>());
      tl.impact_longitudinal = d.dot(u);
      tl.impact_lateral = d.dot(n);
      // Longitudinal impacts leave the partner mostly behind or ahead of the ego box.
      const double ego_len = ego->at("length").get<double>();
      const double ego_wid = ego->at("width").get<double>();
      const double along = std::abs(tl.impact_longitudinal) - ego_len / 2.0;
      const double across = std::abs(tl.impact_lateral) - ego_wid / 2.0;
      if (along > across) {
        tl.impact = tl.impact_longitudinal < 0.0 ? ImpactKind::kRear : ImpactKind::kFront;
      } else {
        tl.impact = ImpactKind::kSide;
      }
    }
  }
  if (!found) throw std::invalid_argument("event_timeline: crash at t=" + std::to_string(crash.time) + " is not in the log");
  std::stable_sort(tl.events.begin(), tl.events.end(), [](const auto & a, const auto & b) { return a.time < b.time; });
  return tl;
}

Json to_json(const EventTimeline & t)
{
  Json events = Json::array();
  for (const auto & e : t.events) events.push_back({{"t", e.time}, {"type", e.type}, {"spec", e.spec}, {"subject", e.subject}});
  Json speed = Json::array();
  for (const auto & s : t.ego_speed) speed.push_back({{"t", s.time}, {"speed", s.speed}});
  Json gaps = Json::array();
  for (const auto & g : t.partner_gaps) gaps.push_back({{"t", g.time}, {"partner", g.partner}, {"gap", g.gap}});
  return {
    {"crash", to_json(t.crash)},
    {"window", {t.window_start, t.window_end}},
    {"ego", t.ego},
    {"events", std::move(events)},
    {"ego_speed", std::move(speed)},
    {"partner_gaps", std::move(gaps)},
    {"ego_min_speed", t.ego_min_speed},
    {"impact", to_string(t.impact)},
    {"impact_offset", {t.impact_longitudinal, t.impact_lateral}},
  };
}

}  // namespace terasim
