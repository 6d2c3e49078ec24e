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

#ifndef TERASIM_COSIM_SERVER_HPP
#define TERASIM_COSIM_SERVER_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

namespace terasim::cosim
{

struct Endpoint
{
  std::string host{"127.0.0.1"};
  std::uint16_t port{0};
};

/// Parses "host:port" (port 0 picks an ephemeral port when listening).
Endpoint parse_endpoint(std::string_view text);

struct ServerOptions
{
  Endpoint listen;
  std::string password;
  std::size_t subscriber_queue{1024};
};

struct ServerStats
{
  std::uint64_t connections{0};
  std::uint64_t commands{0};
  std::uint64_t protocol_errors{0};
  std::uint64_t rejected_writes{0};
  std::uint64_t invalid_payloads{0};
  std::uint64_t dropped_notifications{0};
};

/// Embedded RESP2 key-value and pub/sub server with per-key ownership and
/// payload validation for the registered co-simulation keys.
class CosimServer
{
public:
  explicit CosimServer(ServerOptions options = {});
  ~CosimServer();
  CosimServer(const CosimServer &) = delete;
  CosimServer & operator=(const CosimServer &) = delete;

  /// Binds and starts accepting; throws std::system_error when the address is unavailable.
  void start();
  void stop();
  bool running() const { return running_.load(); }
  std::uint16_t port() const { return port_; }

  struct SetOutcome
  {
    bool ok{false};
    std::string error;
  };

  /// Write as `platform`; enforces ownership and validation like a network SET.
  SetOutcome set(std::string_view platform, const std::string & key, std::string value);
  std::optional<std::string> get(const std::string & key) const;
  bool del(std::string_view platform, const std::string & key, std::string * error = nullptr);
  std::uint64_t version(const std::string & key) const;
  /// Blocks until the key's version exceeds `after` or the deadline passes.
  bool wait_for_version(const std::string & key, std::uint64_t after, std::chrono::steady_clock::time_point deadline) const;
  std::size_t publish(const std::string & channel, const std::string & message);

  std::size_t connection_count() const;
  bool platform_connected(std::string_view platform) const;
  ServerStats stats() const;

private:
  struct Connection;

  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  std::string handle(Connection & conn, const std::vector<std::string> & args, bool & close);
  void unsubscribe_all(Connection & conn);
  void reap(bool all);

  ServerOptions options_;
  std::atomic<bool> running_{false};
  int listen_fd_{-1};
  int wake_[2]{-1, -1};
  std::uint16_t port_{0};
  std::thread acceptor_;

  struct Entry
  {
    std::string value;
    std::uint64_t version{0};
    bool present{false};
  };
  mutable std::mutex store_mu_;
  mutable std::condition_variable store_cv_;
  std::unordered_map<std::string, Entry> store_;

  mutable std::mutex conn_mu_;
  std::list<std::pair<std::shared_ptr<Connection>, std::thread>> connections_;
  std::map<std::string, std::set<Connection *>> channels_;

  mutable std::mutex stats_mu_;
  ServerStats stats_;
};

}  // namespace terasim::cosim

#endif  // TERASIM_COSIM_SERVER_HPP
