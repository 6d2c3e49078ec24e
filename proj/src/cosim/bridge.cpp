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

#include "terasim/cosim/bridge.hpp"

#include <stdexcept>
#include <thread>

namespace terasim::cosim
{

std::string_view to_string(ControlStatus s)
{
  switch (s) {
    case ControlStatus::kFresh:
      return "fresh";
    case ControlStatus::kStale:
      return "stale";
    case ControlStatus::kTimeout:
      break;
  }
  return "timeout";
}

CosimBridge::CosimBridge(CosimServer & server) : server_(&server) {}

CosimBridge::CosimBridge(const Endpoint & external, const std::string & password) : client_(std::make_unique<RespClient>(external))
{
  if (!client_->auth(std::string(kSimulatorPlatform), password)) {
    throw std::runtime_error("external co-sim server rejected authentication as '" + std::string(kSimulatorPlatform) + "'");
  }
}

CosimBridge::~CosimBridge() = default;

bool CosimBridge::put(std::string_view key, const std::string & payload)
{
  const std::string k(key);
  if (server_) {
    const bool ok = server_->set(kSimulatorPlatform, k, payload).ok;
    if (ok) server_->publish(k, payload);
    return ok;
  }
  std::string error;
  if (!client_->set(k, payload, &error)) return false;
  client_->publish(k, payload);
  return true;
}

std::optional<std::string> CosimBridge::fetch(std::string_view key)
{
  const std::string k(key);
  if (server_) return server_->get(k);
  return client_->get(k);
}

void CosimBridge::publish_world(const ActorStateMessage & message)
{
  {
    std::lock_guard lk(mu_);
    if (message.header.timestamp < last_published_) throw std::logic_error("world timestamps must be non-decreasing");
    last_published_ = message.header.timestamp;
  }
  if (!put(kActorInfoKey, serialize(message))) throw std::runtime_error("co-sim server rejected world snapshot");
  std::lock_guard lk(mu_);
  ++stats_.published;
}

void CosimBridge::publish_heartbeat(double timestamp, std::uint64_t step, const std::string & status)
{
  HeartbeatMessage hb;
  hb.header = {timestamp, std::string(kSimulatorPlatform), std::string(kSchemaVersion)};
  hb.status = status;
  hb.step = step;
  put(kHeartbeatKey, serialize(hb));
}

ControlPoll CosimBridge::await_control(double world_timestamp, std::chrono::duration<double> deadline)
{
  const auto start = std::chrono::steady_clock::now();
  const auto until = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(deadline);
  const std::string key(kControlKey);
  ControlPoll result;
  std::uint64_t seen = 0;
  for (;;) {
    const std::uint64_t version = server_ ? server_->version(key) : seen + 1;
    if (version != seen) {
      seen = version;
      if (auto payload = fetch(kControlKey)) {
        try {
          const Message m = validate_message(kControlKey, *payload);
          const auto & ctl = std::get<ControlMessage>(m);
          result.message = ctl;
          if (ctl.header.timestamp >= world_timestamp) {
            result.status = ControlStatus::kFresh;
            break;
          }
          result.status = ControlStatus::kStale;
        } catch (const ValidationError &) {
          std::lock_guard lk(mu_);
          ++stats_.invalid;
        }
      }
    }
    if (std::chrono::steady_clock::now() >= until) break;
    if (server_) {
      server_->wait_for_version(key, seen, until);
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }
  const double waited = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::lock_guard lk(mu_);
  stats_.max_wait = std::max(stats_.max_wait, waited);
  switch (result.status) {
    case ControlStatus::kFresh:
      ++stats_.fresh;
      break;
    case ControlStatus::kStale:
      ++stats_.stale;
      break;
    case ControlStatus::kTimeout:
      ++stats_.timeouts;
      break;
  }
  return result;
}

std::optional<ActorStateMessage> CosimBridge::av_state()
{
  auto payload = fetch(kAvStateKey);
  if (!payload) return std::nullopt;
  try {
    return std::get<ActorStateMessage>(validate_message(kAvStateKey, *payload));
  } catch (const ValidationError &) {
    return std::nullopt;
  }
}

BridgeStats CosimBridge::stats() const
{
  std::lock_guard lk(mu_);
  return stats_;
}

}  // namespace terasim::cosim
