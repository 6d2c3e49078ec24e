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

#include "terasim/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace terasim
{

BatchResult run_batch(const ScenarioConfig & config, std::size_t n, const BatchOptions & options)
{
  if (config.av.enabled && config.av.control == ControlSource::kCosim) {
    throw ConfigError("av.control", "batch runs need the built-in AV controller");
  }
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  BatchResult out;
  out.records.resize(n);
  std::atomic<std::size_t> cursor{0};
  std::mutex mu;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard lock(mu);
        if (fatal) return;
      }
      const std::uint64_t seed = config.seed + i;
      EpisodeOptions eo;
      eo.log = options.log;
      bool done = false;
      for (int attempt = 0; attempt < 2 && !done; ++attempt) {
        try {
          EpisodeResult r = run_episode(config, seed, eo);
          std::lock_guard lock(mu);
          if (attempt > 0) ++out.retried;
          out.records[i] = r.record;
          if (options.on_episode) options.on_episode(r);
          done = true;
        } catch (const ConfigError &) {
          std::lock_guard lock(mu);
          if (!fatal) fatal = std::current_exception();
          return;
        } catch (const std::exception &) {
          if (attempt == 1) {
            std::lock_guard lock(mu);
            ++out.retried;
          }
        }
      }
      if (!done) {
        std::lock_guard lock(mu);
        EpisodeRecord & r = out.records[i];
        r = EpisodeRecord{};
        r.seed = seed;
        r.mode = config.mode;
        r.nominal_miles = config.episode.nominal_miles;
        r.aborted = true;
        ++out.aborted;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto & t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  std::sort(out.records.begin(), out.records.end(), [](const auto & a, const auto & b) { return a.seed < b.seed; });
  if (n > out.aborted) out.estimate = estimate_crash_rate(out.records);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace terasim
