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

#ifndef TERASIM_JSON_UTIL_HPP
#define TERASIM_JSON_UTIL_HPP

#include "terasim/error.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace terasim
{

using Json = nlohmann::json;

/// Cursor over a JSON value that remembers its path for error messages.
/// Throws `Error` (a SchemaError subclass) on any violation.
template <typename Error = SchemaError>
class JsonCursor
{
public:
  JsonCursor(const Json & value, std::string path) : value_(&value), path_(std::move(path)) {}

  const Json & value() const { return *value_; }
  const std::string & path() const { return path_; }

  [[noreturn]] void fail(const std::string & what) const { throw Error(path_, what); }

  std::string child_path(const std::string & key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string index_path(std::size_t i) const { return path_ + "[" + std::to_string(i) + "]"; }

  void expect_object() const
  {
    if (!value_->is_object()) fail("expected an object");
  }

  bool has(const std::string & key) const { return value_->is_object() && value_->contains(key) && !(*value_)[key].is_null(); }

  JsonCursor at(const std::string & key) const
  {
    expect_object();
    auto it = value_->find(key);
    if (it == value_->end()) throw Error(child_path(key), "missing required field");
    return JsonCursor(*it, child_path(key));
  }

  std::optional<JsonCursor> maybe(const std::string & key) const
  {
    expect_object();
    auto it = value_->find(key);
    if (it == value_->end() || it->is_null()) return std::nullopt;
    return JsonCursor(*it, child_path(key));
  }

  std::vector<JsonCursor> elements() const
  {
    if (!value_->is_array()) fail("expected an array");
    std::vector<JsonCursor> out;
    out.reserve(value_->size());
    for (std::size_t i = 0; i < value_->size(); ++i) out.emplace_back((*value_)[i], index_path(i));
    return out;
  }

  double number() const
  {
    if (!value_->is_number()) fail("expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("number must be finite");
    return v;
  }

  double positive() const
  {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }

  double non_negative() const
  {
    const double v = number();
    if (v < 0.0) fail("must be >= 0");
    return v;
  }

  std::int64_t integer() const
  {
    if (!value_->is_number_integer()) fail("expected an integer");
    return value_->get<std::int64_t>();
  }

  bool boolean() const
  {
    if (!value_->is_boolean()) fail("expected a boolean");
    return value_->get<bool>();
  }

  std::string string() const
  {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  std::vector<std::string> strings() const
  {
    std::vector<std::string> out;
    for (const auto & e : elements()) out.push_back(e.string());
    return out;
  }

  /// Rejects keys outside `allowed`.
  void only_keys(std::initializer_list<const char *> allowed) const
  {
    expect_object();
    for (auto it = value_->begin(); it != value_->end(); ++it) {
      bool ok = false;
      for (const char * a : allowed) ok = ok || it.key() == a;
      if (!ok) throw Error(child_path(it.key()), "unknown field");
    }
  }

private:
  const Json * value_;
  std::string path_;
};

}  // namespace terasim

#endif  // TERASIM_JSON_UTIL_HPP
