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

#include "terasim/cosim/server.hpp"

#include "terasim/cosim/messages.hpp"
#include "terasim/cosim/resp.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <deque>
#include <stdexcept>
#include <system_error>

namespace terasim::cosim
{

Endpoint parse_endpoint(std::string_view text)
{
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("expected host:port, got '" + std::string(text) + "'");
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  if (e.host.empty()) e.host = "127.0.0.1";
  const std::string port(text.substr(colon + 1));
  std::size_t used = 0;
  unsigned long p = 0;
  try {
    p = std::stoul(port, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (port.empty() || used != port.size() || p > 65535) throw std::invalid_argument("invalid port in '" + std::string(text) + "'");
  e.port = static_cast<std::uint16_t>(p);
  return e;
}

struct CosimServer::Connection
{
  int fd{-1};
  int wake[2]{-1, -1};
  std::mutex mu;
  std::deque<std::string> pending;
  std::atomic<bool> done{false};
  std::string platform;
  std::string name;
  bool authenticated{false};
  std::set<std::string> subscriptions;

  ~Connection()
  {
    if (fd >= 0) ::close(fd);
    if (wake[0] >= 0) ::close(wake[0]);
    if (wake[1] >= 0) ::close(wake[1]);
  }

  void notify() const
  {
    const char b = 1;
    [[maybe_unused]] const auto n = ::write(wake[1], &b, 1);
  }
};

namespace
{
std::string upper(std::string s)
{
  for (auto & c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool send_all(int fd, std::string_view data)
{
  while (!data.empty()) {
    const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

void make_pipe(int fds[2])
{
  if (::pipe(fds) != 0) throw std::system_error(errno, std::generic_category(), "pipe");
  for (int i = 0; i < 2; ++i) ::fcntl(fds[i], F_SETFL, ::fcntl(fds[i], F_GETFL) | O_NONBLOCK);
}

void drain(int fd)
{
  char buf[256];
  while (::read(fd, buf, sizeof buf) > 0) {
  }
}

std::string wrong_args(const std::string & cmd) { return resp::encode_error("ERR wrong number of arguments for '" + cmd + "' command"); }
}  // namespace

CosimServer::CosimServer(ServerOptions options) : options_(std::move(options)) {}

CosimServer::~CosimServer() { stop(); }

void CosimServer::start()
{
  if (running_) return;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo * res = nullptr;
  const std::string port = std::to_string(options_.listen.port);
  if (const int rc = ::getaddrinfo(options_.listen.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw std::system_error(EINVAL, std::generic_category(), "resolve " + options_.listen.host + ": " + gai_strerror(rc));
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw std::system_error(errno, std::generic_category(), "socket");
  }
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd, 128) != 0) {
    const int err = errno;
    ::freeaddrinfo(res);
    ::close(fd);
    throw std::system_error(err, std::generic_category(), "bind " + options_.listen.host + ":" + port);
  }
  ::freeaddrinfo(res);
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr *>(&bound), &len);
  port_ = ntohs(bound.sin_port);
  listen_fd_ = fd;
  make_pipe(wake_);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void CosimServer::stop()
{
  if (!running_.exchange(false)) return;
  const char b = 1;
  [[maybe_unused]] const auto n = ::write(wake_[1], &b, 1);
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lk(conn_mu_);
    for (auto & [conn, th] : connections_) {
      ::shutdown(conn->fd, SHUT_RDWR);
      conn->notify();
    }
  }
  reap(true);
  ::close(listen_fd_);
  ::close(wake_[0]);
  ::close(wake_[1]);
  listen_fd_ = wake_[0] = wake_[1] = -1;
}

void CosimServer::reap(bool all)
{
  std::list<std::pair<std::shared_ptr<Connection>, std::thread>> finished;
  {
    std::lock_guard lk(conn_mu_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (all || it->first->done) {
        auto next = std::next(it);
        finished.splice(finished.end(), connections_, it);
        it = next;
      } else {
        ++it;
      }
    }
  }
  for (auto & [conn, th] : finished) {
    if (th.joinable()) th.join();
  }
}

void CosimServer::accept_loop()
{
  while (running_) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_[0], POLLIN, 0}};
    const int rc = ::poll(fds, 2, 500);
    reap(false);
    if (rc <= 0) continue;
    if (fds[1].revents) {
      drain(wake_[0]);
      continue;
    }
    if (!(fds[0].revents & POLLIN)) continue;
    const int cfd = ::accept(listen_fd_, nullptr, nullptr);
    if (cfd < 0) continue;
    const int one = 1;
    ::setsockopt(cfd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Connection>();
    conn->fd = cfd;
    try {
      make_pipe(conn->wake);
    } catch (const std::system_error &) {
      continue;
    }
    conn->authenticated = options_.password.empty();
    {
      std::lock_guard lk(stats_mu_);
      ++stats_.connections;
    }
    std::lock_guard lk(conn_mu_);
    connections_.emplace_back(conn, std::thread([this, conn] { serve(conn); }));
  }
}

void CosimServer::serve(std::shared_ptr<Connection> conn)
{
  resp::Parser parser;
  char buf[16384];
  bool close = false;
  while (!close && running_) {
    pollfd fds[2] = {{conn->fd, POLLIN, 0}, {conn->wake[0], POLLIN, 0}};
    if (::poll(fds, 2, 1000) < 0 && errno != EINTR) break;
    std::string out;
    if (fds[1].revents) {
      drain(conn->wake[0]);
      std::lock_guard lk(conn->mu);
      while (!conn->pending.empty()) {
        out += conn->pending.front();
        conn->pending.pop_front();
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const auto n = ::recv(conn->fd, buf, sizeof buf, 0);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        send_all(conn->fd, out);
        break;
      }
      parser.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      while (!close) {
        resp::Value frame;
        std::string error;
        const auto status = parser.next(frame, error);
        if (status == resp::Parser::Status::kIncomplete) break;
        if (status == resp::Parser::Status::kError) {
          {
            std::lock_guard lk(stats_mu_);
            ++stats_.protocol_errors;
          }
          out += resp::encode_error("ERR " + error);
          break;
        }
        std::vector<std::string> args;
        bool ok = frame.type == resp::Value::Type::kArray;
        for (const auto & e : frame.elements) {
          if (e.type != resp::Value::Type::kBulk) ok = false;
          args.push_back(e.str);
        }
        if (!ok) {
          std::lock_guard lk(stats_mu_);
          ++stats_.protocol_errors;
          out += resp::encode_error("ERR Protocol error: expected an array of bulk strings");
          continue;
        }
        if (args.empty()) continue;
        out += handle(*conn, args, close);
      }
    }
    if (!out.empty() && !send_all(conn->fd, out)) break;
  }
  unsubscribe_all(*conn);
  ::shutdown(conn->fd, SHUT_RDWR);
  conn->done = true;
  if (running_) {
    const char b = 1;
    [[maybe_unused]] const auto n = ::write(wake_[1], &b, 1);
  }
}

void CosimServer::unsubscribe_all(Connection & conn)
{
  std::lock_guard lk(conn_mu_);
  for (const auto & ch : conn.subscriptions) {
    auto it = channels_.find(ch);
    if (it == channels_.end()) continue;
    it->second.erase(&conn);
    if (it->second.empty()) channels_.erase(it);
  }
  conn.subscriptions.clear();
}

std::string CosimServer::handle(Connection & conn, const std::vector<std::string> & args, bool & close)
{
  {
    std::lock_guard lk(stats_mu_);
    ++stats_.commands;
  }
  const std::string cmd = upper(args[0]);
  const std::size_t argc = args.size();

  if (cmd == "QUIT") {
    close = true;
    return resp::encode_simple("OK");
  }
  if (cmd == "AUTH") {
    if (argc != 2 && argc != 3) return wrong_args("auth");
    const std::string & pass = args.back();
    if (options_.password.empty() && argc == 2) {
      return resp::encode_error("ERR AUTH <password> called without any password configured for the default user. Are you sure your configuration is correct?");
    }
    if (!options_.password.empty() && pass != options_.password) {
      return resp::encode_error("WRONGPASS invalid username-password pair or user is disabled.");
    }
    conn.authenticated = true;
    if (argc == 3 && args[1] != "default") {
      std::lock_guard lk(conn_mu_);
      conn.platform = args[1];
    }
    return resp::encode_simple("OK");
  }
  if (cmd == "HELLO") {
    // Only RESP2 is spoken; HELLO 2 [AUTH user pass] [SETNAME name] behaves like Redis.
    std::size_t i = 1;
    if (argc > 1) {
      if (args[1] != "2") return resp::encode_error("NOPROTO sorry, this protocol version is not supported");
      i = 2;
    }
    std::string platform;
    bool auth = false;
    for (; i < argc; ++i) {
      const std::string opt = upper(args[i]);
      if (opt == "AUTH" && i + 2 < argc) {
        if (!options_.password.empty() && args[i + 2] != options_.password) {
          return resp::encode_error("WRONGPASS invalid username-password pair or user is disabled.");
        }
        auth = true;
        platform = args[i + 1];
        i += 2;
      } else if (opt == "SETNAME" && i + 1 < argc) {
        ++i;
      } else {
        return resp::encode_error("ERR Syntax error in HELLO option '" + args[i] + "'");
      }
    }
    if (!conn.authenticated && !auth) return resp::encode_error("NOAUTH HELLO must be called with the client already authenticated, otherwise the HELLO <proto> AUTH <user> <pass> option can be used to authenticate the client and select the RESP protocol version at the same time");
    if (auth) {
      conn.authenticated = true;
      if (platform != "default") {
        std::lock_guard lk(conn_mu_);
        conn.platform = platform;
      }
    }
    return resp::encode(resp::Value::array({resp::Value::bulk("server"), resp::Value::bulk("terasim"), resp::Value::bulk("version"),
      resp::Value::bulk("1.0"), resp::Value::bulk("proto"), resp::Value::number(2), resp::Value::bulk("mode"), resp::Value::bulk("standalone"),
      resp::Value::bulk("role"), resp::Value::bulk("master"), resp::Value::bulk("modules"), resp::Value::array({})}));
  }
  if (!conn.authenticated) return resp::encode_error("NOAUTH Authentication required.");

  if (!conn.subscriptions.empty() && cmd != "SUBSCRIBE" && cmd != "UNSUBSCRIBE" && cmd != "PING") {
    return resp::encode_error("ERR Can't execute '" + args[0] + "': only SUBSCRIBE / UNSUBSCRIBE / PING / QUIT are allowed in this context");
  }

  if (cmd == "PING") {
    if (argc > 2) return wrong_args("ping");
    if (!conn.subscriptions.empty()) {
      return resp::encode(resp::Value::array({resp::Value::bulk("pong"), resp::Value::bulk(argc == 2 ? args[1] : "")}));
    }
    return argc == 2 ? resp::encode_bulk(args[1]) : resp::encode_simple("PONG");
  }
  if (cmd == "ECHO") {
    if (argc != 2) return wrong_args("echo");
    return resp::encode_bulk(args[1]);
  }
  if (cmd == "SET") {
    if (argc != 3) return argc < 3 ? wrong_args("set") : resp::encode_error("ERR syntax error");
    const auto r = set(conn.platform, args[1], args[2]);
    return r.ok ? resp::encode_simple("OK") : resp::encode_error(r.error);
  }
  if (cmd == "GET") {
    if (argc != 2) return wrong_args("get");
    const auto v = get(args[1]);
    return v ? resp::encode_bulk(*v) : resp::encode_null();
  }
  if (cmd == "DEL") {
    if (argc < 2) return wrong_args("del");
    std::int64_t removed = 0;
    for (std::size_t i = 1; i < argc; ++i) {
      std::string error;
      if (!key_owner(args[i]).empty() && key_owner(args[i]) != conn.platform) {
        return resp::encode_error("ERR ownership: key '" + args[i] + "' is owned by platform '" + std::string(key_owner(args[i])) + "'");
      }
      if (del(conn.platform, args[i], &error)) ++removed;
    }
    return resp::encode_integer(removed);
  }
  if (cmd == "EXISTS") {
    if (argc < 2) return wrong_args("exists");
    std::int64_t n = 0;
    for (std::size_t i = 1; i < argc; ++i) n += get(args[i]) ? 1 : 0;
    return resp::encode_integer(n);
  }
  if (cmd == "PUBLISH") {
    if (argc != 3) return wrong_args("publish");
    return resp::encode_integer(static_cast<std::int64_t>(publish(args[1], args[2])));
  }
  if (cmd == "SUBSCRIBE") {
    if (argc < 2) return wrong_args("subscribe");
    std::string out;
    std::lock_guard lk(conn_mu_);
    for (std::size_t i = 1; i < argc; ++i) {
      conn.subscriptions.insert(args[i]);
      channels_[args[i]].insert(&conn);
      out += resp::encode(resp::Value::array({resp::Value::bulk("subscribe"), resp::Value::bulk(args[i]),
        resp::Value::number(static_cast<std::int64_t>(conn.subscriptions.size()))}));
    }
    return out;
  }
  if (cmd == "UNSUBSCRIBE") {
    std::vector<std::string> chans(args.begin() + 1, args.end());
    if (chans.empty()) chans.assign(conn.subscriptions.begin(), conn.subscriptions.end());
    std::string out;
    std::lock_guard lk(conn_mu_);
    if (chans.empty()) {
      return resp::encode(resp::Value::array({resp::Value::bulk("unsubscribe"), resp::Value::null(), resp::Value::number(0)}));
    }
    for (const auto & ch : chans) {
      conn.subscriptions.erase(ch);
      if (auto it = channels_.find(ch); it != channels_.end()) {
        it->second.erase(&conn);
        if (it->second.empty()) channels_.erase(it);
      }
      out += resp::encode(resp::Value::array({resp::Value::bulk("unsubscribe"), resp::Value::bulk(ch),
        resp::Value::number(static_cast<std::int64_t>(conn.subscriptions.size()))}));
    }
    return out;
  }
  if (cmd == "CLIENT") {
    if (argc < 2) return wrong_args("client");
    const std::string sub = upper(args[1]);
    if (sub == "SETNAME" && argc == 3) {
      conn.name = args[2];
      return resp::encode_simple("OK");
    }
    if (sub == "GETNAME" && argc == 2) return conn.name.empty() ? resp::encode_null() : resp::encode_bulk(conn.name);
    if (sub == "SETINFO" && argc == 4) return resp::encode_simple("OK");
    return resp::encode_error("ERR unknown subcommand '" + args[1] + "'");
  }
  if (cmd == "SELECT") {
    if (argc != 2) return wrong_args("select");
    return args[1] == "0" ? resp::encode_simple("OK") : resp::encode_error("ERR DB index is out of range");
  }
  if (cmd == "COMMAND") return "*0\r\n";

  std::string shown = args[0].substr(0, 128);
  return resp::encode_error("ERR unknown command '" + shown + "'");
}

CosimServer::SetOutcome CosimServer::set(std::string_view platform, const std::string & key, std::string value)
{
  const auto owner = key_owner(key);
  auto reject = [&](std::string error, bool invalid) {
    std::lock_guard lk(stats_mu_);
    ++(invalid ? stats_.invalid_payloads : stats_.rejected_writes);
    return SetOutcome{false, std::move(error)};
  };
  if (!owner.empty()) {
    if (platform != owner) {
      return reject("ERR ownership: key '" + key + "' is owned by platform '" + std::string(owner) + "'", false);
    }
    try {
      const Message m = validate_message(key, value);
      const auto & header = std::visit([](const auto & msg) -> const MessageHeader & { return msg.header; }, m);
      if (header.platform != owner) return reject("ERR invalid payload at header.platform: expected '" + std::string(owner) + "'", true);
    } catch (const ValidationError & e) {
      return reject(std::string("ERR invalid payload: ") + e.what(), true);
    }
  }
  {
    std::lock_guard lk(store_mu_);
    auto & entry = store_[key];
    entry.value = std::move(value);
    entry.present = true;
    ++entry.version;
  }
  store_cv_.notify_all();
  return {true, {}};
}

std::optional<std::string> CosimServer::get(const std::string & key) const
{
  std::lock_guard lk(store_mu_);
  auto it = store_.find(key);
  if (it == store_.end() || !it->second.present) return std::nullopt;
  return it->second.value;
}

bool CosimServer::del(std::string_view platform, const std::string & key, std::string * error)
{
  const auto owner = key_owner(key);
  if (!owner.empty() && owner != platform) {
    if (error) *error = "ownership";
    return false;
  }
  std::lock_guard lk(store_mu_);
  auto it = store_.find(key);
  if (it == store_.end() || !it->second.present) return false;
  it->second.present = false;
  it->second.value.clear();
  ++it->second.version;
  return true;
}

std::uint64_t CosimServer::version(const std::string & key) const
{
  std::lock_guard lk(store_mu_);
  auto it = store_.find(key);
  return it == store_.end() ? 0 : it->second.version;
}

bool CosimServer::wait_for_version(const std::string & key, std::uint64_t after, std::chrono::steady_clock::time_point deadline) const
{
  std::unique_lock lk(store_mu_);
  return store_cv_.wait_until(lk, deadline, [&] {
    auto it = store_.find(key);
    return it != store_.end() && it->second.version > after;
  });
}

std::size_t CosimServer::publish(const std::string & channel, const std::string & message)
{
  const std::string frame = resp::encode(resp::Value::array({resp::Value::bulk("message"), resp::Value::bulk(channel), resp::Value::bulk(message)}));
  std::size_t receivers = 0;
  std::uint64_t dropped = 0;
  {
    std::lock_guard lk(conn_mu_);
    auto it = channels_.find(channel);
    if (it == channels_.end()) return 0;
    for (Connection * c : it->second) {
      {
        std::lock_guard ck(c->mu);
        c->pending.push_back(frame);
        while (c->pending.size() > options_.subscriber_queue) {
          c->pending.pop_front();
          ++dropped;
        }
      }
      c->notify();
      ++receivers;
    }
  }
  if (dropped) {
    std::lock_guard lk(stats_mu_);
    stats_.dropped_notifications += dropped;
  }
  return receivers;
}

std::size_t CosimServer::connection_count() const
{
  std::lock_guard lk(conn_mu_);
  return static_cast<std::size_t>(std::count_if(connections_.begin(), connections_.end(), [](const auto & p) { return !p.first->done; }));
}

bool CosimServer::platform_connected(std::string_view platform) const
{
  std::lock_guard lk(conn_mu_);
  return std::any_of(connections_.begin(), connections_.end(), [&](const auto & p) { return !p.first->done && p.first->platform == platform; });
}

ServerStats CosimServer::stats() const
{
  std::lock_guard lk(stats_mu_);
  return stats_;
}

}  // namespace terasim::cosim
