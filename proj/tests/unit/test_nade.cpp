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


#include "terasim/error.hpp"
#include "terasim/nade.hpp"
#include "terasim/rng.hpp"
#include "terasim/trajectory_log.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace terasim;

namespace
{

EpisodeRecord rec(std::uint64_t seed, bool crash, double log_w = 0.0, double miles = 0.5)
{
  EpisodeRecord r;
  r.seed = seed;
  r.mode = SimMode::kNade;
  r.miles = miles;
  r.nominal_miles = 0.5;
  r.crash = crash;
  if (crash) {
    r.crash_time = 3.0;
    r.crash_partners = {"av", "veh_000001"};
  }
  r.log_weight = log_w;
  r.digest = "d" + std::to_string(seed);
  return r;
}

std::vector<EpisodeRecord> synthetic(std::size_t n)
{
  std::vector<EpisodeRecord> out;
  CounterRng rng(17, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool crash = rng.uniform() < 0.2;
    out.push_back(rec(i, crash, crash ? std::log(0.01 + 0.1 * rng.uniform()) : std::log(1.1)));
  }
  return out;
}

}  // namespace

TEST(RecordRoll, WeightFactors)
{
  LikelihoodLedger l;
  record_roll(l, 0.01, 0.3, true);
  EXPECT_NEAR(l.log_weight, std::log(0.01 / 0.3), 1e-15);
  record_roll(l, 0.01, 0.3, false);
  EXPECT_NEAR(l.log_weight, std::log(0.01 / 0.3) + std::log(0.99 / 0.7), 1e-14);
  EXPECT_EQ(l.roll_count, 2u);
}

TEST(RecordRoll, EqualProbabilitiesLeaveWeightUntouched)
{
  LikelihoodLedger l;
  for (int i = 0; i < 1000; ++i) record_roll(l, 0.123, 0.123, i % 7 == 0);
  // Activation adds log(1) = 0 and non-activation is skipped, so this is exact.
  EXPECT_EQ(l.log_weight, 0.0);
  EXPECT_EQ(l.roll_count, 1000u);
}

TEST(RecordRoll, RejectsBadProbabilities)
{
  LikelihoodLedger l;
  EXPECT_THROW(record_roll(l, 0.5, 0.4, false), ConfigError);
  EXPECT_THROW(record_roll(l, 0.5, 1.0, false), ConfigError);
  EXPECT_NO_THROW(record_roll(l, 1.0, 1.0, true));
  EXPECT_THROW(record_roll(l, 0.0, 0.5, true), ConfigError);
}

TEST(RecordRoll, ExpectedWeightIsOne)
{
  // Property: E_q[w] = q * p/q + (1-q) * (1-p)/(1-q) = 1.
  for (double p : {1e-4, 0.01, 0.2}) {
    for (double q : {p, 0.3, 0.9}) {
      if (q < p) continue;
      LikelihoodLedger hit, miss;
      record_roll(hit, p, q, true);
      record_roll(miss, p, q, false);
      EXPECT_NEAR(q * std::exp(hit.log_weight) + (1 - q) * std::exp(miss.log_weight), 1.0, 1e-12);
    }
  }
}

TEST(Estimator, MatchesHandComputation)
{
  auto rs = synthetic(500);
  const auto e = estimate_crash_rate(rs);
  // Independent recomputation.
  double sum = 0.0;
  std::vector<double> x;
  for (const auto & r : rs) x.push_back(r.crash ? std::exp(r.log_weight) : 0.0);
  sum = std::accumulate(x.begin(), x.end(), 0.0);
  const double n = static_cast<double>(x.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1) / n) / 0.5;
  EXPECT_NEAR(e.r_hat, mean / 0.5, 1e-15);
  EXPECT_NEAR(e.std_error, se, 1e-15);
  EXPECT_NEAR(e.ci_high - e.r_hat, 1.959963984540054 * se, 1e-15);
  double sw = 0.0, sw2 = 0.0;
  for (const auto & r : rs) {
    sw += r.weight();
    sw2 += r.weight() * r.weight();
  }
  EXPECT_NEAR(e.effective_sample_size, sw * sw / sw2, 1e-9);
  EXPECT_EQ(e.n_episodes, 500u);
}

TEST(Estimator, OrderInvariant)
{
  auto rs = synthetic(300);
  const auto a = estimate_crash_rate(rs);
  std::mt19937 g(3);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(rs.begin(), rs.end(), g);
    const auto b = estimate_crash_rate(rs);
    EXPECT_EQ(a.r_hat, b.r_hat);
    EXPECT_EQ(a.ci_low, b.ci_low);
    EXPECT_EQ(a.ci_high, b.ci_high);
    EXPECT_EQ(a.effective_sample_size, b.effective_sample_size);
  }
}

TEST(Estimator, AbortedExcluded)
{
  auto rs = synthetic(100);
  const auto base = estimate_crash_rate(rs);
  auto extra = rec(1000, true, 5.0);
  extra.aborted = true;
  rs.push_back(extra);
  const auto e = estimate_crash_rate(rs);
  EXPECT_EQ(e.r_hat, base.r_hat);
  EXPECT_EQ(e.n_aborted, 1u);
  EXPECT_EQ(e.n_episodes, 100u);
}

TEST(Estimator, ErrorsOnUnusableInput)
{
  std::vector<EpisodeRecord> none;
  EXPECT_THROW(estimate_crash_rate(none), std::invalid_argument);
  std::vector<EpisodeRecord> mixed{rec(0, false), rec(1, false)};
  mixed[1].nominal_miles = 1.0;
  EXPECT_THROW(estimate_crash_rate(mixed), std::invalid_argument);
  std::vector<EpisodeRecord> calm{rec(0, false), rec(1, false)};
  EXPECT_THROW(episodes_to_target(calm, 0.2), InsufficientEvents);
}

TEST(Estimator, EpisodesToTargetFormula)
{
  // Unweighted Bernoulli with 10 crashes in 100: var/mean^2 = (1-p)/p * n/(n-1).
  std::vector<EpisodeRecord> rs;
  for (int i = 0; i < 100; ++i) rs.push_back(rec(i, i < 10));
  const double p = 0.1;
  const double var = p * (1 - p) * 100.0 / 99.0;
  const double k = 1.959963984540054 / 0.2;
  EXPECT_NEAR(episodes_to_target(rs, 0.2), k * k * var / (p * p), 1e-9);
  EXPECT_NEAR(acceleration_factor(rs, rs), 1.0, 1e-12);
}

TEST(Records, JsonlRoundTrip)
{
  auto rs = synthetic(20);
  rs[3].activations.push_back({"cut_in", "veh_000004", 1.5, 2.5});
  rs[3].activations.push_back({"hard_brake", "veh_000007", 2.0, std::nullopt});
  rs[4].aborted = true;
  rs[5].rolls = 42;
  const auto text = serialize_records(rs);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 20);
  const auto back = parse_records(text);
  ASSERT_EQ(back.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) EXPECT_EQ(back[i], rs[i]) << i;
  EXPECT_EQ(serialize_records(back), text);
}

TEST(Records, MalformedLineNamesLine)
{
  EXPECT_THROW(parse_records("{\"seed\": 1}\nnot json\n"), SchemaError);
}

TEST(Sha256, KnownVectors)
{
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  Sha256 h;
  h.update("a");
  h.update("bc");
  EXPECT_EQ(h.hex_digest(), sha256_hex("abc"));
  EXPECT_EQ(h.hex_digest(), sha256_hex("abc"));
}

TEST(TrajectoryLog, DigestIndependentOfRetention)
{
  TrajectoryLog full(LogRetention::kFull);
  TrajectoryLog digest(LogRetention::kDigest);
  for (int i = 0; i < 10; ++i) {
    const Json snap = {{"step", i}, {"t", 0.1 * i}, {"actors", Json::array()}};
    full.append(snap);
    digest.append(snap);
  }
  EXPECT_EQ(full.digest(), digest.digest());
  EXPECT_EQ(full.lines().size(), 10u);
  EXPECT_TRUE(digest.lines().empty());
  const auto parsed = TrajectoryLog::parse(full.text());
  EXPECT_EQ(parsed.digest(), full.digest());
  EXPECT_EQ(parsed.snapshots().size(), 10u);
}
