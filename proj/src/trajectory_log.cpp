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

#include "terasim/trajectory_log.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace terasim
{

struct Sha256::Impl
{
  EVP_MD_CTX * ctx{EVP_MD_CTX_new()};
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>())
{
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256 &&) noexcept = default;
Sha256 & Sha256::operator=(Sha256 &&) noexcept = default;

Sha256::Sha256(const Sha256 & other) : impl_(std::make_unique<Impl>())
{
  if (EVP_MD_CTX_copy_ex(impl_->ctx, other.impl_->ctx) != 1) throw std::runtime_error("SHA-256 copy failed");
}

Sha256 & Sha256::operator=(const Sha256 & other)
{
  if (this != &other) {
    Sha256 tmp(other);
    std::swap(impl_, tmp.impl_);
  }
  return *this;
}

void Sha256::update(std::string_view data)
{
  if (EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) throw std::runtime_error("SHA-256 update failed");
}

std::string Sha256::hex_digest() const
{
  Sha256 copy(*this);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(copy.impl_->ctx, md.data(), &len) != 1) throw std::runtime_error("SHA-256 final failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

std::string sha256_hex(std::string_view data)
{
  Sha256 h;
  h.update(data);
  return h.hex_digest();
}

void TrajectoryLog::append(const Json & snapshot)
{
  ++steps_;
  if (retention_ == LogRetention::kNone) return;
  std::string line = snapshot.dump();
  line += '\n';
  hash_.update(line);
  if (retention_ == LogRetention::kFull) {
    line.pop_back();
    lines_.push_back(std::move(line));
  }
}

std::string TrajectoryLog::digest() const
{
  if (retention_ == LogRetention::kNone) return {};
  return hash_.hex_digest();
}

std::string TrajectoryLog::text() const
{
  std::string out;
  for (const auto & l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<Json> TrajectoryLog::snapshots() const
{
  std::vector<Json> out;
  out.reserve(lines_.size());
  for (const auto & l : lines_) out.push_back(Json::parse(l));
  return out;
}

TrajectoryLog TrajectoryLog::parse(std::string_view text)
{
  TrajectoryLog log(LogRetention::kFull);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    log.append(Json::parse(line));
  }
  return log;
}

TrajectoryLog TrajectoryLog::load(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace terasim
