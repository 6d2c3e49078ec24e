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

#ifndef TERASIM_COSIM_RESP_HPP
#define TERASIM_COSIM_RESP_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace terasim::resp
{

struct Value
{
  enum class Type { kSimple, kError, kInteger, kBulk, kNull, kArray, kNullArray };
  Type type{Type::kNull};
  std::string str;
  std::int64_t integer{0};
  std::vector<Value> elements;

  static Value simple(std::string s) { return {Type::kSimple, std::move(s), 0, {}}; }
  static Value error(std::string s) { return {Type::kError, std::move(s), 0, {}}; }
  static Value bulk(std::string s) { return {Type::kBulk, std::move(s), 0, {}}; }
  static Value number(std::int64_t n) { return {Type::kInteger, {}, n, {}}; }
  static Value null() { return {}; }
  static Value array(std::vector<Value> v) { return {Type::kArray, {}, 0, std::move(v)}; }

  bool is_error() const { return type == Type::kError; }
  bool operator==(const Value &) const = default;
};

std::string encode(const Value & v);
std::string encode_simple(std::string_view s);
std::string encode_error(std::string_view s);
std::string encode_integer(std::int64_t n);
std::string encode_bulk(std::string_view s);
std::string encode_null();
/// A command as an array of bulk strings.
std::string encode_command(std::span<const std::string> args);

struct Limits
{
  std::size_t max_bulk{64u << 20};
  std::size_t max_elements{1u << 16};
  std::size_t max_depth{8};
  std::size_t max_inline{64u << 10};
};

/// Incremental RESP2 decoder. Accepts multibulk frames and inline commands.
class Parser
{
public:
  enum class Status { kFrame, kIncomplete, kError };

  explicit Parser(Limits limits = {}) : limits_(limits) {}

  void feed(std::string_view bytes) { buffer_.append(bytes.data(), bytes.size()); }
  /// On kError the offending bytes are discarded so the stream can resume.
  Status next(Value & out, std::string & error);
  std::size_t buffered() const { return buffer_.size() - pos_; }

private:
  Status parse_value(std::size_t & pos, Value & out, std::size_t depth, std::string & error) const;
  Status parse_inline(std::size_t & pos, Value & out, std::string & error) const;
  bool read_line(std::size_t & pos, std::string_view & line) const;
  void compact();

  Limits limits_;
  std::string buffer_;
  std::size_t pos_{0};
};

}  // namespace terasim::resp

#endif  // TERASIM_COSIM_RESP_HPP
