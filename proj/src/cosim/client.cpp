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

#include "terasim/cosim/client.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <stdexcept>
#include <system_error>

namespace terasim::cosim
{

RespClient::RespClient(const Endpoint & endpoint, std::chrono::milliseconds timeout) : timeout_(timeout)
{
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo * res = nullptr;
  const std::string port = std::to_string(endpoint.port);
  if (const int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw std::system_error(EINVAL, std::generic_category(), "resolve " + endpoint.host + ": " + gai_strerror(rc));
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    const int err = errno;
    ::freeaddrinfo(res);
    if (fd_ >= 0) ::close(fd_);
    throw std::system_error(err, std::generic_category(), "connect " + endpoint.host + ":" + port);
  }
  ::freeaddrinfo(res);
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

RespClient::~RespClient()
{
  if (fd_ >= 0) ::close(fd_);
}

void RespClient::send_raw(std::string_view bytes)
{
  while (!bytes.empty()) {
    const auto n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "send");
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::optional<resp::Value> RespClient::read(std::chrono::milliseconds timeout)
{
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[16384];
  for (;;) {
    resp::Value v;
    std::string error;
    const auto status = parser_.next(v, error);
    if (status == resp::Parser::Status::kFrame) return v;
    if (status == resp::Parser::Status::kError) throw std::runtime_error("malformed reply: " + error);
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) return std::nullopt;
    const auto n = ::recv(fd_, buf, sizeof buf, 0);
    if (n == 0) throw std::runtime_error("connection closed by peer");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "recv");
    }
    parser_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
  }
}

resp::Value RespClient::command(const std::vector<std::string> & args)
{
  send_raw(resp::encode_command(args));
  auto v = read(timeout_);
  if (!v) throw std::runtime_error("timed out waiting for reply to " + (args.empty() ? std::string() : args[0]));
  return *v;
}

bool RespClient::auth(const std::string & platform, const std::string & password)
{
  return !command({"AUTH", platform, password}).is_error();
}

bool RespClient::set(const std::string & key, const std::string & value, std::string * error)
{
  const auto r = command({"SET", key, value});
  if (r.is_error() && error) *error = r.str;
  return !r.is_error();
}

std::optional<std::string> RespClient::get(const std::string & key)
{
  const auto r = command({"GET", key});
  if (r.type == resp::Value::Type::kBulk) return r.str;
  if (r.is_error()) throw std::runtime_error(r.str);
  return std::nullopt;
}

std::int64_t RespClient::publish(const std::string & channel, const std::string & message)
{
  const auto r = command({"PUBLISH", channel, message});
  if (r.is_error()) throw std::runtime_error(r.str);
  return r.integer;
}

}  // namespace terasim::cosim
