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

#include "terasim/batch.hpp"
#include "terasim/cosim/bridge.hpp"
#include "terasim/cosim/messages.hpp"
#include "terasim/cosim/server.hpp"
#include "terasim/engine.hpp"
#include "terasim/error.hpp"
#include "terasim/reporting.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

namespace fs = std::filesystem;
using namespace terasim;

namespace
{
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitInsufficient = 4;

void write_file(const fs::path & path, const std::string & text)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string seed_name(std::uint64_t seed)
{
  return "episode_" + std::to_string(seed) + ".jsonl";
}

struct RunArgs
{
  std::string config;
  std::size_t episodes{1};
  std::size_t workers{1};
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string out{"out"};
  std::string logs{"crash"};
};

int run_cosim(const ScenarioConfig & config, const RunArgs & args)
{
  std::unique_ptr<cosim::CosimServer> server;
  std::unique_ptr<cosim::CosimBridge> bridge;
  if (config.cosim.external.empty()) {
    cosim::ServerOptions so;
    so.listen = cosim::parse_endpoint(config.cosim.listen);
    so.password = config.cosim.password;
    server = std::make_unique<cosim::CosimServer>(so);
    server->start();
    std::cerr << "co-sim server listening on " << so.listen.host << ":" << server->port() << "\n";
    bridge = std::make_unique<cosim::CosimBridge>(*server);
  } else {
    bridge = std::make_unique<cosim::CosimBridge>(cosim::parse_endpoint(config.cosim.external), config.cosim.password);
  }
  std::vector<EpisodeRecord> records;
  const fs::path out(args.out);
  for (std::size_t i = 0; i < args.episodes; ++i) {
    EpisodeOptions eo;
    eo.bridge = bridge.get();
    eo.log = args.logs == "none" ? LogRetention::kDigest : LogRetention::kFull;
    EpisodeResult r = run_episode(config, config.seed + i, eo);
    if (args.logs == "all" || (args.logs == "crash" && r.record.crash)) write_file(out / "logs" / seed_name(r.record.seed), r.log.text());
    records.push_back(r.record);
  }
  write_file(out / "records.jsonl", serialize_records(records));
  const auto e = estimate_crash_rate(records);
  Json run = {{"scenario", config.name}, {"mode", to_string(config.mode)}, {"episodes", records.size()}, {"estimate", to_json(e)},
    {"bridge", {{"published", bridge->stats().published}, {"fresh", bridge->stats().fresh}, {"stale", bridge->stats().stale},
                 {"timeouts", bridge->stats().timeouts}}}};
  write_file(out / "run.json", run.dump(2) + "\n");
  std::cout << run.dump(2) << std::endl;
  // Clients may still be reading the final world after the "ended" heartbeat.
  if (server) std::this_thread::sleep_for(std::chrono::seconds(1));
  return kExitOk;
}

int cmd_run(const RunArgs & args)
{
  ScenarioConfig config = load_scenario(args.config);
  if (!args.mode.empty()) config.mode = parse_mode(args.mode);
  if (args.seed) config.seed = *args.seed;
  if (args.logs != "crash" && args.logs != "all" && args.logs != "none") throw ConfigError("--logs", "expected crash, all or none");
  config.validate();
  if (config.av.enabled && config.av.control == ControlSource::kCosim) return run_cosim(config, args);

  const fs::path out(args.out);
  BatchOptions bo;
  bo.workers = args.workers;
  bo.log = args.logs == "none" ? LogRetention::kDigest : LogRetention::kFull;
  if (args.logs != "none") {
    bo.on_episode = [&](const EpisodeResult & r) {
      if (args.logs == "all" || r.record.crash) write_file(out / "logs" / seed_name(r.record.seed), r.log.text());
    };
  }
  const BatchResult result = run_batch(config, args.episodes, bo);
  write_file(out / "records.jsonl", serialize_records(result.records));
  Json run = {
    {"scenario", config.name},
    {"mode", to_string(config.mode)},
    {"seed", config.seed},
    {"episodes", result.records.size()},
    {"aborted", result.aborted},
    {"retried", result.retried},
    {"workers", args.workers},
    {"wall_seconds", result.wall_seconds},
  };
  run["estimate"] = result.estimate ? to_json(*result.estimate) : Json(nullptr);
  write_file(out / "run.json", run.dump(2) + "\n");
  std::cout << run.dump(2) << "\n";
  return kExitOk;
}

int cmd_estimate(const std::string & path, const std::string & nde_path)
{
  const auto records = load_records(path);
  if (records.empty()) throw ConfigError("--records", "no records found in " + path);
  const auto e = estimate_crash_rate(records);
  Json j = to_json(e);
  int code = e.n_crashes_raw == 0 ? kExitInsufficient : kExitOk;
  if (!nde_path.empty()) {
    const auto nde = load_records(nde_path);
    try {
      j["acceleration_factor"] = acceleration_factor(nde, records);
    } catch (const InsufficientEvents & ex) {
      std::cerr << "insufficient events: " << ex.what() << "\n";
      code = kExitInsufficient;
    }
  }
  std::cout << j.dump(2) << "\n";
  return code;
}

int cmd_report(const std::string & path, const std::string & nde_path, std::optional<double> baseline, bool no_baseline, double window,
  const std::string & log_path, bool json)
{
  const auto records = load_records(path);
  if (records.empty()) throw ConfigError("--records", "no records found in " + path);
  std::vector<EpisodeRecord> nde;
  if (!nde_path.empty()) nde = load_records(nde_path);
  ReportOptions ro;
  ro.attribution_window = window;
  if (no_baseline) {
    ro.human_baseline.reset();
  } else if (baseline) {
    ro.human_baseline = baseline;
  }
  ro.nde_records = nde;
  const fs::path run_json = fs::path(path).has_extension() ? fs::path(path).parent_path() / "run.json" : fs::path(path) / "run.json";
  if (fs::exists(run_json)) {
    std::ifstream in(run_json);
    const Json run = Json::parse(in, nullptr, false);
    if (run.is_object()) ro.wall_seconds = run.value("wall_seconds", 0.0);
  }
  const SafetyReport report = build_report(records, ro);
  Json j = to_json(report);
  if (!log_path.empty()) {
    const auto log = TrajectoryLog::load(log_path);
    const auto crash = find_crash(log);
    if (!crash) throw ConfigError("--log", "log contains no crash");
    j["timeline"] = to_json(event_timeline(log, *crash));
  }
  if (json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << format_report(report);
    if (j.contains("timeline")) {
      const auto & t = j["timeline"];
      char line[256];
      std::snprintf(line, sizeof line, "\ntimeline [%.1f, %.1f] s, impact %s, ego min speed %.2f m/s\n", t["window"][0].get<double>(),
        t["window"][1].get<double>(), t["impact"].get<std::string>().c_str(), t["ego_min_speed"].get<double>());
      std::cout << line;
      for (const auto & e : t["events"]) {
        std::snprintf(line, sizeof line, "  %7.1f  %-10s %-12s %s\n", e["t"].get<double>(), e["type"].get<std::string>().c_str(),
          e["spec"].get<std::string>().c_str(), e["subject"].get<std::string>().c_str());
        std::cout << line;
      }
    }
  }
  return report.insufficient_events ? kExitInsufficient : kExitOk;
}

int cmd_genmap(const std::string & name, const std::string & out)
{
  const RoadNetwork net = make_template(name);
  const std::string text = serialize_network(net) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kExitOk;
}

Json replay_message(const Json & snap)
{
  Json actors = Json::array();
  for (const auto & a : snap.at("actors")) {
    actors.push_back({{"id", a.at("id")}, {"type", a.at("kind")}, {"x", a.at("x")}, {"y", a.at("y")}, {"heading", a.at("heading")},
      {"speed", a.at("speed")}, {"accel", a.at("accel")}, {"length", a.at("length")}, {"width", a.at("width")}});
  }
  for (const auto & s : snap.value("statics", Json::array())) {
    actors.push_back({{"id", s.at("id")}, {"type", s.at("type")}, {"x", s.at("x")}, {"y", s.at("y")}, {"heading", 0.0}, {"speed", 0.0},
      {"accel", 0.0}, {"length", 0.5}, {"width", 0.5}});
  }
  Json msg = {{"header", {{"timestamp", snap.at("t")}, {"platform", cosim::kSimulatorPlatform}, {"schema_version", cosim::kSchemaVersion}}},
    {"actors", std::move(actors)}};
  if (snap.contains("signals")) msg["signals"] = snap.at("signals");
  return msg;
}

int cmd_replay(const std::string & path, bool publish, const std::string & listen, const std::string & external, const std::string & password,
  double rate)
{
  const TrajectoryLog log = TrajectoryLog::load(path);
  const auto snaps = log.snapshots();
  if (!publish) {
    Json j = {{"steps", log.steps()}, {"digest", log.digest()}};
    if (const auto crash = find_crash(log)) j["crash"] = to_json(*crash);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::unique_ptr<cosim::CosimServer> server;
  std::unique_ptr<cosim::CosimBridge> bridge;
  if (external.empty()) {
    cosim::ServerOptions so;
    so.listen = cosim::parse_endpoint(listen);
    so.password = password;
    server = std::make_unique<cosim::CosimServer>(so);
    server->start();
    std::cerr << "co-sim server listening on " << so.listen.host << ":" << server->port() << "\n";
    bridge = std::make_unique<cosim::CosimBridge>(*server);
  } else {
    bridge = std::make_unique<cosim::CosimBridge>(cosim::parse_endpoint(external), password);
  }
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t step = 0;
  double last_t = 0.0;
  for (const auto & snap : snaps) {
    const double t = snap.at("t").get<double>();
    if (rate > 0.0) std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(t / rate)));
    bridge->publish_world(cosim::parse_actor_state(replay_message(snap)));
    bridge->publish_heartbeat(t, step++, "running");
    last_t = t;
  }
  bridge->publish_heartbeat(last_t, step, "ended");
  std::cout << "published " << snaps.size() << " snapshots\n";
  return kExitOk;
}
}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"terasim: generative traffic simulation for AV safety evaluation"};
  app.require_subcommand(1);

  RunArgs run;
  auto * run_cmd = app.add_subcommand("run", "Run episodes of a scenario");
  run_cmd->add_option("--config", run.config, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--episodes", run.episodes, "Number of episodes")->check(CLI::PositiveNumber);
  run_cmd->add_option("--workers", run.workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--mode", run.mode, "nde or nade (overrides the scenario)");
  run_cmd->add_option("--seed", run.seed, "Base seed (overrides the scenario)");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--logs", run.logs, "Trajectory logs to keep: crash, all or none");

  std::string records;
  std::string nde_records;
  auto * est_cmd = app.add_subcommand("estimate", "Crash-rate estimate from episode records");
  est_cmd->add_option("--records", records, "Records file or directory")->required();
  est_cmd->add_option("--nde-records", nde_records, "NDE records for the acceleration factor");

  std::optional<double> baseline;
  bool no_baseline = false;
  double window = 10.0;
  std::string report_log;
  bool report_json = false;
  auto * rep_cmd = app.add_subcommand("report", "Safety report from episode records");
  rep_cmd->add_option("--records", records, "Records file or directory")->required();
  rep_cmd->add_option("--nde-records", nde_records, "NDE records for the acceleration factor");
  rep_cmd->add_option("--baseline", baseline, "Human crash rate per mile");
  rep_cmd->add_flag("--no-baseline", no_baseline, "Omit the baseline comparison");
  rep_cmd->add_option("--window", window, "Attribution window in seconds");
  rep_cmd->add_option("--log", report_log, "Crash log to build an event timeline from");
  rep_cmd->add_flag("--json", report_json, "Emit JSON instead of the table");

  std::string tmpl;
  std::string map_out;
  auto * map_cmd = app.add_subcommand("genmap", "Write a template map");
  map_cmd->add_option("--template", tmpl, "grid3x3, highway2 or ring")->required();
  map_cmd->add_option("--out", map_out, "Output path (stdout when omitted)");

  std::string log_path;
  bool publish = false;
  std::string listen = "127.0.0.1:6380";
  std::string external;
  std::string password;
  double rate = 0.0;
  auto * replay_cmd = app.add_subcommand("replay", "Inspect or re-publish a trajectory log");
  replay_cmd->add_option("--log", log_path, "Trajectory log")->required()->check(CLI::ExistingFile);
  replay_cmd->add_flag("--publish", publish, "Publish snapshots over co-sim");
  replay_cmd->add_option("--listen", listen, "Embedded server address");
  replay_cmd->add_option("--external", external, "External RESP server instead of the embedded one");
  replay_cmd->add_option("--password", password, "Server password");
  replay_cmd->add_option("--rate", rate, "Playback speed relative to sim time; 0 publishes as fast as possible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    // Usage errors share the configuration exit code; --help still exits 0.
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*est_cmd) return cmd_estimate(records, nde_records);
    if (*rep_cmd) return cmd_report(records, nde_records, baseline, no_baseline, window, report_log, report_json);
    if (*map_cmd) return cmd_genmap(tmpl, map_out);
    if (*replay_cmd) return cmd_replay(log_path, publish, listen, external, password, rate);
  } catch (const SchemaError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CosimTimeout & e) {
    std::cerr << "co-sim timeout: " << e.what() << "\n";
    return kExitTimeout;
  } catch (const InsufficientEvents & e) {
    std::cerr << "insufficient events: " << e.what() << "\n";
    return kExitInsufficient;
  } catch (const std::invalid_argument & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
