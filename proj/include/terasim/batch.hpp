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

#ifndef TERASIM_BATCH_HPP
#define TERASIM_BATCH_HPP

#include "terasim/engine.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace terasim
{

struct BatchOptions
{
  std::size_t workers{1};
  LogRetention log{LogRetention::kDigest};
  /// Called once per finished episode, serialized under a lock.
  std::function<void(const EpisodeResult &)> on_episode;
};

struct BatchResult
{
  /// Sorted by seed; aborted episodes stay in with `aborted` set.
  std::vector<EpisodeRecord> records;
  std::optional<CrashRateEstimate> estimate;
  std::size_t aborted{0};
  std::size_t retried{0};
  double wall_seconds{0.0};
};

/// Runs seeds config.seed .. config.seed + n - 1. A failing episode is retried once
/// and then recorded as aborted. Config errors propagate.
BatchResult run_batch(const ScenarioConfig & config, std::size_t n, const BatchOptions & options = {});

}  // namespace terasim

#endif  // TERASIM_BATCH_HPP
