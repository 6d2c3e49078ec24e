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

#ifndef TERASIM_COSIM_BRIDGE_HPP
#define TERASIM_COSIM_BRIDGE_HPP

#include "terasim/cosim/client.hpp"
#include "terasim/cosim/messages.hpp"
#include "terasim/cosim/server.hpp"

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace terasim::cosim
{

enum class ControlStatus { kFresh, kStale, kTimeout };
std::string_view to_string(ControlStatus s);

struct ControlPoll
{
  ControlStatus status{ControlStatus::kTimeout};
  std::optional<ControlMessage> message;
};

struct BridgeStats
{
  std::uint64_t published{0};
  std::uint64_t fresh{0};
  std::uint64_t stale{0};
  std::uint64_t timeouts{0};
  std::uint64_t invalid{0};
  double max_wait{0.0};
};

/// The engine's side of the co-simulation mailbox. Publishes world snapshots as the
/// simulator platform and waits, up to a deadline, for the AV stack's control.
class CosimBridge
{
public:
  /// Talks to an in-process server.
  explicit CosimBridge(CosimServer & server);
  /// Talks to an external RESP server, authenticating as the simulator platform.
  CosimBridge(const Endpoint & external, const std::string & password);
  ~CosimBridge();

  /// Throws std::logic_error if timestamps would go backwards.
  void publish_world(const ActorStateMessage & message);
  void publish_heartbeat(double timestamp, std::uint64_t step, const std::string & status);
  ControlPoll await_control(double world_timestamp, std::chrono::duration<double> deadline);
  /// Latest state a physics simulator published for the AV, if any.
  std::optional<ActorStateMessage> av_state();

  double last_published() const { return last_published_; }
  BridgeStats stats() const;

private:
  bool put(std::string_view key, const std::string & payload);
  std::optional<std::string> fetch(std::string_view key);

  CosimServer * server_{nullptr};
  std::unique_ptr<RespClient> client_;
  mutable std::mutex mu_;
  double last_published_{-1.0};
  BridgeStats stats_;
};

}  // namespace terasim::cosim

#endif  // TERASIM_COSIM_BRIDGE_HPP
