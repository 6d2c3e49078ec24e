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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero if any fails.
// Usage: acceptance [criterion-number ...]

#include "terasim/batch.hpp"
#include "terasim/cosim/client.hpp"
#include "terasim/cosim/messages.hpp"
#include "terasim/cosim/server.hpp"
#include "terasim/engine.hpp"
#include "terasim/perception.hpp"
#include "terasim/reporting.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace terasim;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string scenario_path(const std::string & name) { return std::string(TERASIM_SOURCE_DIR) + "/scenarios/" + name; }

struct Outcome
{
  bool pass{false};
  std::string detail;
};

std::string fmt(const char * f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Crash-rate formula identity.
Outcome crash_rate_identity()
{
  const auto t0 = Clock::now();
  std::vector<EpisodeRecord> records(1000);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].seed = i;
    records[i].mode = SimMode::kNde;
    records[i].nominal_miles = 1.0;
    records[i].miles = 1.0;
    records[i].crash = i == 17 || i == 500 || i == 999;
  }
  const auto e = estimate_crash_rate(records);
  const double wall = seconds_since(t0);
  const bool ok = e.r_hat == 3.000e-3 && e.n_crashes_raw == 3 && wall < 1.0;
  return {ok, fmt("r_hat=%.17g (expected 3.000e-3), runtime %.4f s", e.r_hat, wall)};
}

// ---------------------------------------------------------------------------
// Toy scenario shared by criteria 2-4: an ALWAYS-triggered cut-in that crashes on activation.

ScenarioConfig toy_config(double p, double q, SimMode mode)
{
  ScenarioConfig c = load_scenario(scenario_path("toy_cutin.json"));
  c.adversities.at(0).natural_prob = p;
  c.adversities.at(0).proposal_prob = q;
  c.mode = mode;
  return c;
}

// Enumeration oracle: walk the step schedule counting eligible roll steps, then sum the
// probability that the first activation happens at each of them.
double toy_oracle_rate(const ScenarioConfig & c)
{
  const double p = c.adversities.at(0).natural_prob;
  int k = 0;
  for (int step = 0;; ++step) {
    const double t = step * c.episode.dt;
    if (t >= c.episode.max_duration - 1e-9) break;
    ++k;
  }
  double crash_prob = 0.0;
  double survive = 1.0;
  for (int j = 0; j < k; ++j) {
    crash_prob += survive * p;
    survive *= 1.0 - p;
  }
  return crash_prob / c.episode.nominal_miles;
}

Outcome estimator_unbiasedness()
{
  const auto t0 = Clock::now();
  ScenarioConfig c = toy_config(1e-2, 0.3, SimMode::kNade);
  const double oracle = toy_oracle_rate(c);
  int covered = 0;
  constexpr int kBatches = 100;
  constexpr int kEpisodes = 2000;
  for (int b = 0; b < kBatches; ++b) {
    c.seed = 1'000'000ULL + static_cast<std::uint64_t>(b) * kEpisodes;
    BatchOptions bo;
    bo.log = LogRetention::kNone;
    const auto r = run_batch(c, kEpisodes, bo);
    if (r.estimate && r.estimate->ci_low <= oracle && oracle <= r.estimate->ci_high) ++covered;
  }
  const double wall = seconds_since(t0);
  return {covered >= 90 && wall < 300.0, fmt("oracle %.6f /mi, CI covered in %d/%d batches (need >= 90), runtime %.1f s", oracle, covered, kBatches, wall)};
}

// ---------------------------------------------------------------------------
Outcome nade_acceleration()
{
  const auto t0 = Clock::now();
  BatchOptions bo;
  bo.log = LogRetention::kNone;
  ScenarioConfig nde = toy_config(1e-3, 1e-3, SimMode::kNde);
  nde.seed = 5'000'000;
  ScenarioConfig nade = toy_config(1e-3, 0.3, SimMode::kNade);
  nade.seed = 9'000'000;
  const auto a = run_batch(nde, 40000, bo);
  const auto b = run_batch(nade, 4000, bo);
  const double factor = acceleration_factor(a.records, b.records, 0.2);
  const double wall = seconds_since(t0);
  return {factor >= 20.0 && wall < 600.0,
    fmt("NDE needs %.0f episodes, NADE %.0f; acceleration %.1fx (need >= 20), runtime %.1f s", episodes_to_target(a.records, 0.2),
      episodes_to_target(b.records, 0.2), factor, wall)};
}

// ---------------------------------------------------------------------------
Outcome identity_reduction()
{
  BatchOptions bo;
  bo.log = LogRetention::kDigest;
  ScenarioConfig nde = toy_config(1e-2, 1e-2, SimMode::kNde);
  ScenarioConfig nade = toy_config(1e-2, 1e-2, SimMode::kNade);
  nde.seed = nade.seed = 77;
  constexpr std::size_t kEpisodes = 3000;
  const auto a = run_batch(nde, kEpisodes, bo);
  const auto b = run_batch(nade, kEpisodes, bo);
  bool weights_one = true;
  bool same_digests = true;
  std::size_t crashes = 0;
  for (std::size_t i = 0; i < kEpisodes; ++i) {
    weights_one = weights_one && b.records[i].log_weight == 0.0 && b.records[i].weight() == 1.0;
    same_digests = same_digests && a.records[i].digest == b.records[i].digest && a.records[i].crash == b.records[i].crash;
    crashes += b.records[i].crash;
  }
  const auto & ea = *a.estimate;
  const auto & eb = *b.estimate;
  const bool same_estimate = std::bit_cast<std::uint64_t>(ea.r_hat) == std::bit_cast<std::uint64_t>(eb.r_hat) &&
                             std::bit_cast<std::uint64_t>(ea.ci_low) == std::bit_cast<std::uint64_t>(eb.ci_low) &&
                             std::bit_cast<std::uint64_t>(ea.ci_high) == std::bit_cast<std::uint64_t>(eb.ci_high) &&
                             to_json(ea).dump() == to_json(eb).dump();
  return {weights_one && same_digests && same_estimate && crashes > 0,
    fmt("w==1 for all: %s; digests equal: %s; estimate bits equal: %s (r_hat %.10g, %zu crashes)", weights_one ? "yes" : "no",
      same_digests ? "yes" : "no", same_estimate ? "yes" : "no", eb.r_hat, crashes)};
}

// ---------------------------------------------------------------------------
Outcome trigger_semantics()
{
  const RoadNetwork net = make_highway(1, 1000.0, 30.0);
  AdversitySpec spec;
  spec.id = "rear_end";
  spec.trigger.kind = TriggerKind::kLeadGapAndSpeedDiff;
  spec.behavior.kind = BehaviorKind::kFailToYield;
  spec.natural_prob = 1e-3;
  spec.proposal_prob = 1e-3;
  std::string detail;
  bool ok = true;
  for (double gap : {19.0, 21.0}) {
    for (double diff : {4.0, 6.0}) {
      std::vector<VehicleState> agents(2);
      const double lead_speed = 15.0;
      auto & lead = agents[0];
      lead.id = "lead";
      lead.lane = 0;
      lead.s = 300.0;
      lead.speed = lead_speed;
      auto & sub = agents[1];
      sub.id = "subject";
      sub.lane = 0;
      sub.s = lead.s - lead.length / 2.0 - gap - sub.length / 2.0;
      sub.speed = lead_speed + diff;
      for (auto & a : agents) update_pose(a, net);
      const PerceptionIndex index(net, agents);
      const WorldView world{0.0, net, agents, index, std::nullopt};
      const bool fired = evaluate_trigger(spec, 1, world);
      const bool expected = gap <= 20.0 && diff >= 5.0;
      ok = ok && fired == expected;
      detail += fmt("(%g m, %g m/s)->%s ", gap, diff, fired ? "fire" : "hold");
    }
  }
  return {ok, detail + "expected fire only at (19 m, 6 m/s)"};
}

// ---------------------------------------------------------------------------
Outcome vd_sequence()
{
  const auto t0 = Clock::now();
  const ScenarioConfig c = load_scenario(scenario_path("vd_sequence.json"));
  std::set<std::string> cut_in_specs;
  for (const auto & s : c.adversities) {
    if (s.behavior.kind == BehaviorKind::kCutIn) cut_in_specs.insert(s.id);
  }
  int reproduced = 0;
  int stopped = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const EpisodeResult r = run_episode(c, seed, {LogRetention::kFull, nullptr});
    const auto crash = find_crash(r.log);
    if (!crash || !crash->involves_av) continue;
    const EventTimeline tl = event_timeline(r.log, *crash);
    bool cut_in_first = false;
    for (const auto & e : tl.events) {
      if (e.type == "activation" && cut_in_specs.count(e.spec) && e.time < crash->time) cut_in_first = true;
    }
    if (cut_in_first && tl.ego == "av" && tl.impact == ImpactKind::kRear) ++reproduced;
    if (tl.ego_min_speed == 0.0) ++stopped;
  }
  const double wall = seconds_since(t0);
  return {reproduced >= 95 && wall < 120.0,
    fmt("cut-in then rear impact into the AV in %d/100 seeds (need >= 95); AV stopped before impact in %d; runtime %.1f s", reproduced, stopped, wall)};
}

// ---------------------------------------------------------------------------
ScenarioConfig determinism_config()
{
  ScenarioConfig c = load_scenario(scenario_path("grid50.json"));
  c.mode = SimMode::kNade;
  c.episode.max_duration = 30.0;
  AdversitySpec brake;
  brake.id = "hard_brake";
  brake.eligible_kinds = {AgentKind::kCar};
  brake.trigger.kind = TriggerKind::kApproachingIntersection;
  brake.behavior.kind = BehaviorKind::kHardBrake;
  brake.natural_prob = 1e-4;
  brake.proposal_prob = 0.05;
  c.adversities.push_back(brake);
  AdversitySpec fty;
  fty.id = "run_red";
  fty.eligible_kinds = {AgentKind::kCar};
  fty.trigger.kind = TriggerKind::kApproachingIntersection;
  fty.behavior.kind = BehaviorKind::kFailToYield;
  fty.natural_prob = 1e-4;
  fty.proposal_prob = 0.02;
  c.adversities.push_back(fty);
  c.validate();
  return c;
}

Outcome determinism()
{
  const ScenarioConfig c = determinism_config();
  constexpr std::uint64_t kSeed = 4242;
  std::set<std::string> digests;
  std::set<std::string> single_estimates;
  std::set<std::string> batch_estimates;
  std::size_t runs = 0;
  for (std::size_t workers : {1, 4, 8}) {
    std::vector<EpisodeRecord> out(20);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < out.size();) out[i] = run_episode(c, kSeed, {LogRetention::kDigest, nullptr}).record;
      });
    }
    for (auto & t : pool) t.join();
    for (const auto & r : out) {
      digests.insert(r.digest);
      single_estimates.insert(to_json(estimate_crash_rate(std::span(&r, 1))).dump());
      ++runs;
    }
    BatchOptions bo;
    bo.workers = workers;
    ScenarioConfig bc = c;
    bc.seed = kSeed;
    const auto b = run_batch(bc, 20, bo);
    batch_estimates.insert(to_json(*b.estimate).dump() + serialize_records(b.records));
  }
  const bool ok = digests.size() == 1 && single_estimates.size() == 1 && batch_estimates.size() == 1;
  return {ok, fmt("%zu runs over workers {1,4,8}: %zu unique digest(s), %zu unique estimate(s), %zu unique batch result(s)", runs,
                digests.size(), single_estimates.size(), batch_estimates.size())};
}

// ---------------------------------------------------------------------------
// Point-sampling oracle: a box is sampled on a regular grid in its own frame.
struct Rect
{
  double cx, cy, heading, length, width;
};

bool inside(const Rect & r, double x, double y)
{
  const double c = std::cos(r.heading);
  const double s = std::sin(r.heading);
  const double dx = x - r.cx;
  const double dy = y - r.cy;
  const double u = dx * c + dy * s;
  const double v = -dx * s + dy * c;
  return std::abs(u) <= r.length / 2.0 && std::abs(v) <= r.width / 2.0;
}

bool sampled_overlap(const Rect & a, const Rect & b, double h)
{
  const double c = std::cos(a.heading);
  const double s = std::sin(a.heading);
  const int nu = static_cast<int>(std::ceil(a.length / h));
  const int nv = static_cast<int>(std::ceil(a.width / h));
  for (int i = 0; i <= nu; ++i) {
    const double u = -a.length / 2.0 + a.length * i / nu;
    for (int j = 0; j <= nv; ++j) {
      const double v = -a.width / 2.0 + a.width * j / nv;
      if (inside(b, a.cx + u * c - v * s, a.cy + u * s + v * c)) return true;
    }
  }
  return false;
}

Rect grown(Rect r, double d)
{
  r.length += 2.0 * d;
  r.width += 2.0 * d;
  return r;
}

Outcome collision_oracle()
{
  constexpr double kTol = 0.05;
  constexpr double kStep = 0.01;
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), ang(-M_PI, M_PI), len(1.0, 5.0), wid(0.5, 2.5);
  int compared = 0;
  int disagreements = 0;
  int overlaps = 0;
  for (int n = 0; n < 1000; ++n) {
    const Rect a{pos(gen), pos(gen), ang(gen), len(gen), wid(gen)};
    const Rect b{pos(gen), pos(gen), ang(gen), len(gen), wid(gen)};
    const bool clearly_overlapping = sampled_overlap(grown(a, -kTol), grown(b, -kTol), kStep);
    const bool clearly_separated = !sampled_overlap(grown(a, kTol), grown(b, kTol), kStep) && !sampled_overlap(grown(b, kTol), grown(a, kTol), kStep);
    if (clearly_overlapping == clearly_separated) continue;
    const OrientedBox<double> ba{Vec2d(a.cx, a.cy), a.heading, a.length, a.width};
    const OrientedBox<double> bb{Vec2d(b.cx, b.cy), b.heading, b.length, b.width};
    const bool sat = separating_axis_test(ba, bb).overlap;
    ++compared;
    overlaps += clearly_overlapping;
    if (sat != clearly_overlapping) ++disagreements;
  }
  return {disagreements == 0 && compared >= 900,
    fmt("%d/1000 pairs outside the %.2f m tolerance band (%d overlapping), %d disagreements", compared, kTol, overlaps, disagreements)};
}

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
double ks_pvalue(std::vector<double> x, std::vector<double> y, double * stat)
{
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  *stat = d;
  const double ne = n * m / (n + m);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

Outcome nde_realism()
{
  const ScenarioConfig c = load_scenario(scenario_path("ring.json"));
  const auto & tn = *c.nde.distribution(AgentKind::kCar).desired_speed;
  std::vector<double> sim;
  for (std::uint64_t seed = c.seed; sim.size() < 2000; ++seed) {
    const EpisodeResult r = run_episode(c, seed, {LogRetention::kNone, nullptr});
    for (const auto & a : r.final_agents) {
      if (sim.size() < 2000) sim.push_back(a.speed);
    }
  }
  // Reference sample drawn by rejection from the configured truncated normal.
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal(tn.mean, tn.sd);
  std::vector<double> ref;
  while (ref.size() < 2000) {
    const double v = normal(gen);
    if (v >= tn.min && v <= tn.max) ref.push_back(v);
  }
  double d = 0.0;
  const double p = ks_pvalue(sim, ref, &d);
  return {p > 0.01, fmt("n=%zu, KS D=%.4f, p=%.4f (need > 0.01)", sim.size(), d, p)};
}

// ---------------------------------------------------------------------------
int dial(std::uint16_t port)
{
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  if (::connect(fd, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  return fd;
}

void send_all(int fd, const std::string & bytes)
{
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n <= 0) return;
    off += static_cast<std::size_t>(n);
  }
}

// Reads until `expected` bytes arrived, EOF, or the timeout.
std::string recv_bytes(int fd, std::size_t expected, int timeout_ms = 2000)
{
  std::string out;
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  char buf[4096];
  while (out.size() < expected && Clock::now() < deadline) {
    pollfd p{fd, POLLIN, 0};
    const int left = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count());
    if (::poll(&p, 1, std::max(left, 1)) <= 0) break;
    const auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

std::string exchange(int fd, const std::string & request, const std::string & expected)
{
  send_all(fd, request);
  return recv_bytes(fd, expected.size());
}

std::string bulk(const std::string & s) { return "$" + std::to_string(s.size()) + "\r\n" + s + "\r\n"; }

std::string frame(std::initializer_list<std::string> args)
{
  std::string out = "*" + std::to_string(args.size()) + "\r\n";
  for (const auto & a : args) out += bulk(a);
  return out;
}

std::vector<std::string> fuzz_corpus(std::size_t n)
{
  std::mt19937_64 gen(7);
  const std::vector<std::string> seeds = {
    frame({"PING"}),
    frame({"SET", "fuzz:k", "v"}),
    frame({"GET", "fuzz:k"}),
    frame({"SUBSCRIBE", "fuzz:ch"}),
    frame({"PUBLISH", "fuzz:ch", "hello"}),
    frame({"SET", "terasim-actor-info", "{}"}),
    frame({"AUTH", "av-stack", "x"}),
    "PING\r\n",
  };
  const std::vector<std::string> nasty = {
    "*-5\r\n", "$-7\r\n", "*99999999999\r\n", "$99999999999\r\n", "*1\r\n$3\r\nab", "*1\r\n$2\r\nabcd\r\n", ":abc\r\n", "*2\r\n*2\r\n*2\r\n",
    "\r\n\r\n", "*1\r\n$x\r\n", "%3\r\n", "*3\r\n$3\r\nSET\r\n$-1\r\n$1\r\nx\r\n", std::string(70000, 'A') + "\r\n",
    "*9\r\n" + std::string(9, '*') + "\r\n", "$4\r\nPING\n\n", std::string("\0\0\0\r\n", 5),
  };
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    const int kind = static_cast<int>(gen() % 5);
    std::string f = seeds[gen() % seeds.size()];
    switch (kind) {
      case 0:  // truncation
        f.resize(gen() % f.size());
        f += "\r\n";
        break;
      case 1:  // random byte flips
        for (int k = 0; k < 1 + static_cast<int>(gen() % 4); ++k) f[gen() % f.size()] = static_cast<char>(byte(gen));
        break;
      case 2:  // length header corruption
        for (auto & ch : f) {
          if (ch >= '0' && ch <= '9' && gen() % 3 == 0) ch = static_cast<char>('0' + gen() % 10);
        }
        if (gen() % 2) f.insert(1, "-");
        break;
      case 3:
        f = nasty[gen() % nasty.size()];
        break;
      default: {  // random garbage with a plausible prefix
        f = std::string(1, "*$+-:"[gen() % 5]);
        const int len = 1 + static_cast<int>(gen() % 64);
        for (int k = 0; k < len; ++k) f += static_cast<char>(byte(gen));
        break;
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

Outcome protocol_conformance()
{
  cosim::ServerOptions so;
  so.listen = {"127.0.0.1", 0};
  cosim::CosimServer server(so);
  server.start();
  const auto port = server.port();
  std::vector<std::string> failures;
  auto expect = [&](const std::string & name, const std::string & got, const std::string & want) {
    if (got != want) failures.push_back(name);
  };

  {
    const int fd = dial(port);
    expect("PING", exchange(fd, frame({"PING"}), "+PONG\r\n"), "+PONG\r\n");
    expect("PING msg", exchange(fd, frame({"PING", "hi"}), bulk("hi")), bulk("hi"));
    expect("inline PING", exchange(fd, "PING\r\n", "+PONG\r\n"), "+PONG\r\n");
    expect("SET", exchange(fd, frame({"SET", "scratch", "v1"}), "+OK\r\n"), "+OK\r\n");
    expect("GET", exchange(fd, frame({"GET", "scratch"}), bulk("v1")), bulk("v1"));
    expect("GET missing", exchange(fd, frame({"GET", "nope"}), "$-1\r\n"), "$-1\r\n");
    const std::string unknown = "-ERR unknown command 'FLY'\r\n";
    expect("unknown", exchange(fd, frame({"FLY"}), unknown), unknown);
    ::close(fd);
  }
  {
    const int sub = dial(port);
    const std::string ack = "*3\r\n" + bulk("subscribe") + bulk("news") + ":1\r\n";
    expect("SUBSCRIBE", exchange(sub, frame({"SUBSCRIBE", "news"}), ack), ack);
    const int pub = dial(port);
    expect("PUBLISH", exchange(pub, frame({"PUBLISH", "news", "hello"}), ":1\r\n"), ":1\r\n");
    const std::string msg = "*3\r\n" + bulk("message") + bulk("news") + bulk("hello");
    expect("message push", recv_bytes(sub, msg.size()), msg);
    ::close(pub);
    ::close(sub);
  }

  // Ownership: the AV stack may not write the simulator's world key.
  {
    cosim::RespClient av({"127.0.0.1", port});
    av.auth(std::string(cosim::kAvPlatform), "");
    std::string err;
    cosim::ActorStateMessage world;
    world.header = {1.0, std::string(cosim::kAvPlatform), std::string(cosim::kSchemaVersion)};
    const bool cross = av.set(std::string(cosim::kActorInfoKey), cosim::serialize(world), &err);
    if (cross || err.find("ownership") == std::string::npos) failures.push_back("ownership cross-write");
    cosim::ControlMessage ctl;
    ctl.header = {1.0, std::string(cosim::kAvPlatform), std::string(cosim::kSchemaVersion)};
    if (!av.set(std::string(cosim::kControlKey), cosim::serialize(ctl), &err)) failures.push_back("owner write: " + err);
    cosim::RespClient anon({"127.0.0.1", port});
    if (anon.set(std::string(cosim::kControlKey), cosim::serialize(ctl), &err)) failures.push_back("anonymous write to owned key");
  }

  // Keys that must survive the fuzzing untouched.
  std::map<std::string, std::string> sentinels;
  {
    cosim::ActorStateMessage world;
    world.header = {2.0, std::string(cosim::kSimulatorPlatform), std::string(cosim::kSchemaVersion)};
    world.actors.push_back({"av", cosim::ActorType::kAv, 1.0, 2.0, 0.0, 10.0, 0.0, 4.8, 1.9});
    sentinels[std::string(cosim::kActorInfoKey)] = cosim::serialize(world);
    if (!server.set(cosim::kSimulatorPlatform, std::string(cosim::kActorInfoKey), sentinels.begin()->second).ok) failures.push_back("seed key");
    for (int i = 0; i < 8; ++i) {
      const std::string key = "sentinel-" + std::to_string(i);
      sentinels[key] = "value-" + std::to_string(i * 7919);
      server.set("", key, sentinels[key]);
    }
    sentinels[std::string(cosim::kControlKey)] = *server.get(std::string(cosim::kControlKey));
  }

  const auto corpus = fuzz_corpus(10000);
  std::size_t delivered = 0;
  for (const auto & f : corpus) {
    const int fd = dial(port);
    if (fd < 0) {
      failures.push_back("connect refused during fuzz");
      break;
    }
    send_all(fd, f);
    ::shutdown(fd, SHUT_WR);
    recv_bytes(fd, std::string::npos, 500);
    ::close(fd);
    ++delivered;
  }
  std::size_t intact = 0;
  for (const auto & [k, v] : sentinels) intact += server.get(k) == v;
  {
    const int fd = dial(port);
    expect("PING after fuzz", fd >= 0 ? exchange(fd, frame({"PING"}), "+PONG\r\n") : "", "+PONG\r\n");
    if (fd >= 0) ::close(fd);
  }
  const auto stats = server.stats();
  server.stop();
  if (intact != sentinels.size()) failures.push_back("key corruption");
  std::string detail = fmt("%zu fuzz frames delivered, %llu protocol errors answered, %zu/%zu keys intact", delivered,
    static_cast<unsigned long long>(stats.protocol_errors), intact, sentinels.size());
  for (const auto & f : failures) detail += "; failed: " + f;
  return {failures.empty() && delivered >= 10000, detail};
}

// ---------------------------------------------------------------------------
Outcome performance_floor()
{
  const ScenarioConfig c = load_scenario(scenario_path("grid50.json"));
  double best = 1e9;
  std::size_t steps = 0;
  double mean_agents = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    const EpisodeResult r = run_episode(c, c.seed, {LogRetention::kDigest, nullptr});
    best = std::min(best, seconds_since(t0));
    steps = r.stats.steps;
  }
  {
    const EpisodeResult r = run_episode(c, c.seed, {LogRetention::kFull, nullptr});
    double total = 0.0;
    for (const auto & snap : r.log.snapshots()) total += static_cast<double>(snap.at("actors").size());
    mean_agents = total / static_cast<double>(r.log.steps());
  }
  const double simulated = static_cast<double>(steps) * c.episode.dt;
  const double speedup = simulated / best;
  return {simulated >= 60.0 - 1e-9 && best <= 0.6 && mean_agents >= 45.0,
    fmt("%.0f simulated s with %.1f agents on average in %.3f s wall (%.0fx real time; need 60 s in <= 0.6 s)", simulated, mean_agents, best,
      speedup)};
}

}  // namespace

int main(int argc, char ** argv)
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
    {"crash-rate formula identity", crash_rate_identity},
    {"estimator unbiasedness (toy oracle)", estimator_unbiasedness},
    {"NADE acceleration >= 20x", nade_acceleration},
    {"identity reduction q = p", identity_reduction},
    {"rear-end trigger boundary grid", trigger_semantics},
    {"cut-in + rear-end sequence", vd_sequence},
    {"determinism across worker counts", determinism},
    {"collision oracle", collision_oracle},
    {"NDE speed distribution (KS)", nde_realism},
    {"protocol conformance + fuzz", protocol_conformance},
    {"performance floor", performance_floor},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %2d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
