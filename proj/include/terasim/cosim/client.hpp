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

#ifndef TERASIM_COSIM_CLIENT_HPP
#define TERASIM_COSIM_CLIENT_HPP

#include "terasim/cosim/resp.hpp"
#include "terasim/cosim/server.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace terasim::cosim
{

/// Minimal blocking RESP2 client over TCP.
class RespClient
{
public:
  RespClient(const Endpoint & endpoint, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));
  ~RespClient();
  RespClient(const RespClient &) = delete;
  RespClient & operator=(const RespClient &) = delete;

  resp::Value command(const std::vector<std::string> & args);
  /// Sends raw bytes without waiting for a reply.
  void send_raw(std::string_view bytes);
  /// Next frame from the wire (replies or pushed messages); empty on timeout.
  std::optional<resp::Value> read(std::chrono::milliseconds timeout);

  bool auth(const std::string & platform, const std::string & password);
  bool set(const std::string & key, const std::string & value, std::string * error = nullptr);
  std::optional<std::string> get(const std::string & key);
  std::int64_t publish(const std::string & channel, const std::string & message);

private:
  int fd_{-1};
  std::chrono::milliseconds timeout_;
  resp::Parser parser_;
};

}  // namespace terasim::cosim

#endif  // TERASIM_COSIM_CLIENT_HPP
