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

#ifndef TERASIM_TRAJECTORY_LOG_HPP
#define TERASIM_TRAJECTORY_LOG_HPP

#include "terasim/json_util.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace terasim
{

std::string sha256_hex(std::string_view data);

/// Incremental SHA-256 (OpenSSL EVP).
class Sha256
{
public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256 & other);
  Sha256 & operator=(const Sha256 & other);
  Sha256(Sha256 &&) noexcept;
  Sha256 & operator=(Sha256 &&) noexcept;

  void update(std::string_view data);
  /// Digest of everything fed so far; the running state is left untouched.
  std::string hex_digest() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class LogRetention { kNone, kDigest, kFull };

/// Line-delimited world snapshots (canonical JSON, one per step) with a running digest.
class TrajectoryLog
{
public:
  explicit TrajectoryLog(LogRetention retention = LogRetention::kFull) : retention_(retention) {}

  LogRetention retention() const { return retention_; }
  bool enabled() const { return retention_ != LogRetention::kNone; }

  void append(const Json & snapshot);
  std::size_t steps() const { return steps_; }
  const std::vector<std::string> & lines() const { return lines_; }
  std::string digest() const;
  std::string text() const;

  std::vector<Json> snapshots() const;

  static TrajectoryLog parse(std::string_view text);
  static TrajectoryLog load(const std::string & path);

private:
  LogRetention retention_;
  std::size_t steps_{0};
  std::vector<std::string> lines_;
  Sha256 hash_;
};

}  // namespace terasim

#endif  // TERASIM_TRAJECTORY_LOG_HPP
