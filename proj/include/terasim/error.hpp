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

#ifndef TERASIM_ERROR_HPP
#define TERASIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace terasim
{

/// Structured-document violation, carrying the field path (e.g. `lanes[2].width`).
class SchemaError : public std::runtime_error
{
public:
  SchemaError(std::string path, const std::string & what)
  : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path))
  {
  }
  const std::string & path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Invalid scenario, map or adversity configuration detected before a run starts.
class ConfigError : public SchemaError
{
public:
  using SchemaError::SchemaError;
};

/// Co-simulation peer did not complete the handshake in time.
class CosimTimeout : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An estimator input carries no crash events, so the requested ratio is undefined.
class InsufficientEvents : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace terasim

#endif  // TERASIM_ERROR_HPP
