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

#include "terasim/nade.hpp"

#include "terasim/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace terasim
{

std::string_view to_string(SimMode mode) { return mode == SimMode::kNade ? "NADE" : "NDE"; }

SimMode parse_mode(std::string_view text)
{
  if (text == "NDE" || text == "nde") return SimMode::kNde;
  if (text == "NADE" || text == "nade") return SimMode::kNade;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

void record_roll(LikelihoodLedger & ledger, double p, double q, bool activated)
{
  if (!(p >= 0.0 && p <= q && q <= 1.0)) throw ConfigError("adversity", "roll requires 0 <= p <= q <= 1");
  if (q >= 1.0 && p < 1.0) throw ConfigError("adversity", "proposal q = 1 requires p = 1");
  if (activated) {
    if (p == 0.0) throw ConfigError("adversity", "activation of an event with zero natural probability");
    ledger.log_weight += std::log(p / q);
  } else if (p != q) {
    ledger.log_weight += std::log1p(-p) - std::log1p(-q);
  }
  ++ledger.roll_count;
}

double EpisodeRecord::weight() const { return std::exp(log_weight); }

Json to_json(const EpisodeRecord & r)
{
  Json acts = Json::array();
  for (const auto & a : r.activations) {
    acts.push_back({{"spec", a.spec}, {"subject", a.subject}, {"t", a.time}, {"until", a.until ? Json(*a.until) : Json(nullptr)}});
  }
  Json j = {
    {"seed", r.seed},
    {"mode", to_string(r.mode)},
    {"miles", r.miles},
    {"nominal_miles", r.nominal_miles},
    {"crash", r.crash},
    {"crash_time", r.crash_time ? Json(*r.crash_time) : Json(nullptr)},
    {"crash_partners", r.crash_partners},
    {"log_weight", r.log_weight},
    {"weight", r.weight()},
    {"rolls", r.rolls},
    {"activations", acts},
    {"duration", r.duration},
    {"digest", r.digest},
  };
  if (r.aborted) j["aborted"] = true;
  return j;
}

EpisodeRecord record_from_json(const Json & doc)
{
  JsonCursor<SchemaError> c(doc, "");
  EpisodeRecord r;
  r.seed = c.at("seed").value().get<std::uint64_t>();
  try {
    r.mode = parse_mode(c.at("mode").string());
  } catch (const std::invalid_argument & e) {
    throw SchemaError("mode", e.what());
  }
  r.miles = c.at("miles").non_negative();
  r.nominal_miles = c.at("nominal_miles").positive();
  r.crash = c.at("crash").boolean();
  if (auto t = c.maybe("crash_time")) r.crash_time = t->number();
  if (auto p = c.maybe("crash_partners")) r.crash_partners = p->strings();
  r.log_weight = c.at("log_weight").number();
  if (auto n = c.maybe("rolls")) r.rolls = static_cast<std::uint64_t>(n->integer());
  if (auto acts = c.maybe("activations")) {
    for (const auto & a : acts->elements()) {
      ActivationRecord rec{a.at("spec").string(), a.at("subject").string(), a.at("t").number(), std::nullopt};
      if (auto u = a.maybe("until")) rec.until = u->number();
      r.activations.push_back(std::move(rec));
    }
  }
  if (auto d = c.maybe("duration")) r.duration = d->non_negative();
  if (auto d = c.maybe("digest")) r.digest = d->string();
  if (auto a = c.maybe("aborted")) r.aborted = a->boolean();
  if (r.mode == SimMode::kNde && r.log_weight != 0.0) throw SchemaError("log_weight", "NDE records carry unit weight");
  return r;
}

std::string serialize_records(std::span<const EpisodeRecord> records)
{
  std::string out;
  for (const auto & r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<EpisodeRecord> parse_records(std::string_view text)
{
  std::vector<EpisodeRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const Json::exception & e) {
      throw SchemaError("line " + std::to_string(line_no), e.what());
    } catch (const SchemaError & e) {
      throw SchemaError("line " + std::to_string(line_no) + (e.path().empty() ? "" : "." + e.path()), e.what());
    }
  }
  return out;
}

std::vector<EpisodeRecord> load_records(const std::filesystem::path & path)
{
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto & entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl" && entry.path().filename().string().rfind("records", 0) == 0) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<EpisodeRecord> out;
  for (const auto & f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto part = parse_records(ss.str());
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

Json to_json(const CrashRateEstimate & e)
{
  return {
    {"r_hat", e.r_hat},
    {"ci_low", e.ci_low},
    {"ci_high", e.ci_high},
    {"n_episodes", e.n_episodes},
    {"n_crashes_raw", e.n_crashes_raw},
    {"effective_sample_size", e.effective_sample_size},
    {"nominal_miles", e.nominal_miles},
    {"std_error", e.std_error},
    {"n_aborted", e.n_aborted},
  };
}

namespace
{
constexpr double kZ95 = 1.959963984540054;

// Seed-ordered copy of the usable records, so the result does not depend on merge order.
std::vector<const EpisodeRecord *> usable(std::span<const EpisodeRecord> records, std::size_t & aborted)
{
  std::vector<const EpisodeRecord *> out;
  aborted = 0;
  for (const auto & r : records) {
    if (r.aborted) {
      ++aborted;
    } else {
      out.push_back(&r);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const EpisodeRecord * a, const EpisodeRecord * b) { return a->seed < b->seed; });
  return out;
}

struct Moments
{
  double n;
  double mean;
  double var;
};

Moments weighted_indicator_moments(const std::vector<const EpisodeRecord *> & rs)
{
  double sum = 0.0;
  for (const auto * r : rs) sum += r->crash ? r->weight() : 0.0;
  const double n = static_cast<double>(rs.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto * r : rs) {
    const double d = (r->crash ? r->weight() : 0.0) - mean;
    ss += d * d;
  }
  const double var = rs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {n, mean, var};
}
}  // namespace

CrashRateEstimate estimate_crash_rate(std::span<const EpisodeRecord> records)
{
  CrashRateEstimate e;
  const auto rs = usable(records, e.n_aborted);
  if (rs.empty()) throw std::invalid_argument("estimate_crash_rate: no usable records");
  const double L = rs.front()->nominal_miles;
  for (const auto * r : rs) {
    if (r->nominal_miles != L) throw std::invalid_argument("estimate_crash_rate: mixed nominal episode lengths");
  }
  double sum_w_crash = 0.0;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (const auto * r : rs) {
    const double w = r->weight();
    sum_w += w;
    sum_w2 += w * w;
    if (r->crash) {
      sum_w_crash += w;
      ++e.n_crashes_raw;
    }
  }
  const auto m = weighted_indicator_moments(rs);
  e.n_episodes = rs.size();
  e.nominal_miles = L;
  e.r_hat = sum_w_crash / (m.n * L);
  e.std_error = std::sqrt(m.var / m.n) / L;
  const double half = kZ95 * e.std_error;
  e.ci_low = std::max(0.0, e.r_hat - half);
  e.ci_high = e.r_hat + half;
  e.effective_sample_size = sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;
  return e;
}

double episodes_to_target(std::span<const EpisodeRecord> records, double target_relative_error)
{
  if (!(target_relative_error > 0.0)) throw std::invalid_argument("target relative error must be > 0");
  std::size_t aborted = 0;
  const auto rs = usable(records, aborted);
  const bool any_crash = std::any_of(rs.begin(), rs.end(), [](const EpisodeRecord * r) { return r->crash; });
  if (rs.size() < 2 || !any_crash) throw InsufficientEvents("no crashes observed; episodes-to-target is undefined");
  const auto m = weighted_indicator_moments(rs);
  const double k = kZ95 / target_relative_error;
  return k * k * m.var / (m.mean * m.mean);
}

double acceleration_factor(std::span<const EpisodeRecord> nde, std::span<const EpisodeRecord> nade, double target_relative_error)
{
  const double n_nde = episodes_to_target(nde, target_relative_error);
  const double n_nade = episodes_to_target(nade, target_relative_error);
  if (!(n_nade > 0.0)) throw InsufficientEvents("NADE estimator has zero variance; acceleration factor is undefined");
  return n_nde / n_nade;
}

}  // namespace terasim
