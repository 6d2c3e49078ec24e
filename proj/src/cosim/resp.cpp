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

#include "terasim/cosim/resp.hpp"

#include <algorithm>
#include <charconv>

namespace terasim::resp
{

std::string encode_simple(std::string_view s) { return "+" + std::string(s) + "\r\n"; }
std::string encode_error(std::string_view s) { return "-" + std::string(s) + "\r\n"; }
std::string encode_integer(std::int64_t n) { return ":" + std::to_string(n) + "\r\n"; }
std::string encode_null() { return "$-1\r\n"; }

std::string encode_bulk(std::string_view s)
{
  std::string out = "$" + std::to_string(s.size()) + "\r\n";
  out.append(s.data(), s.size());
  out += "\r\n";
  return out;
}

std::string encode_command(std::span<const std::string> args)
{
  std::string out = "*" + std::to_string(args.size()) + "\r\n";
  for (const auto & a : args) out += encode_bulk(a);
  return out;
}

std::string encode(const Value & v)
{
  switch (v.type) {
    case Value::Type::kSimple:
      return encode_simple(v.str);
    case Value::Type::kError:
      return encode_error(v.str);
    case Value::Type::kInteger:
      return encode_integer(v.integer);
    case Value::Type::kBulk:
      return encode_bulk(v.str);
    case Value::Type::kNull:
      return encode_null();
    case Value::Type::kNullArray:
      return "*-1\r\n";
    case Value::Type::kArray: {
      std::string out = "*" + std::to_string(v.elements.size()) + "\r\n";
      for (const auto & e : v.elements) out += encode(e);
      return out;
    }
  }
  return encode_null();
}

namespace
{
bool parse_int(std::string_view s, std::int64_t & out)
{
  if (s.empty()) return false;
  const char * first = s.data();
  const char * last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}
}  // namespace

bool Parser::read_line(std::size_t & pos, std::string_view & line) const
{
  const std::size_t end = buffer_.find("\r\n", pos);
  if (end == std::string::npos) return false;
  line = std::string_view(buffer_).substr(pos, end - pos);
  pos = end + 2;
  return true;
}

Parser::Status Parser::parse_inline(std::size_t & pos, Value & out, std::string & error) const
{
  const std::size_t nl = buffer_.find('\n', pos);
  if (nl == std::string::npos) {
    if (buffer_.size() - pos > limits_.max_inline) {
      error = "Protocol error: too big inline request";
      return Status::kError;
    }
    return Status::kIncomplete;
  }
  std::string_view line = std::string_view(buffer_).substr(pos, nl - pos);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  pos = nl + 1;
  out = Value::array({});
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.elements.push_back(Value::bulk(std::string(line.substr(i, j - i))));
    i = j;
  }
  return Status::kFrame;
}

Parser::Status Parser::parse_value(std::size_t & pos, Value & out, std::size_t depth, std::string & error) const
{
  if (pos >= buffer_.size()) return Status::kIncomplete;
  if (depth > limits_.max_depth) {
    error = "Protocol error: nesting too deep";
    return Status::kError;
  }
  const char tag = buffer_[pos];
  if (tag != '+' && tag != '-' && tag != ':' && tag != '$' && tag != '*') {
    if (depth == 0) return parse_inline(pos, out, error);
    error = "Protocol error: expected '$', got '" + std::string(1, tag) + "'";
    return Status::kError;
  }
  std::size_t p = pos + 1;
  std::string_view line;
  if (!read_line(p, line)) {
    if (buffer_.size() - pos > limits_.max_inline) {
      error = "Protocol error: header line too long";
      return Status::kError;
    }
    return Status::kIncomplete;
  }
  switch (tag) {
    case '+':
      out = Value::simple(std::string(line));
      break;
    case '-':
      out = Value::error(std::string(line));
      break;
    case ':': {
      std::int64_t n = 0;
      if (!parse_int(line, n)) {
        error = "Protocol error: invalid integer";
        return Status::kError;
      }
      out = Value::number(n);
      break;
    }
    case '$': {
      std::int64_t n = 0;
      if (!parse_int(line, n) || n < -1 || static_cast<std::uint64_t>(std::max<std::int64_t>(n, 0)) > limits_.max_bulk) {
        error = "Protocol error: invalid bulk length";
        return Status::kError;
      }
      if (n == -1) {
        out = Value::null();
        break;
      }
      const auto len = static_cast<std::size_t>(n);
      if (buffer_.size() - p < len + 2) return Status::kIncomplete;
      if (buffer_[p + len] != '\r' || buffer_[p + len + 1] != '\n') {
        error = "Protocol error: bulk string not terminated by CRLF";
        return Status::kError;
      }
      out = Value::bulk(buffer_.substr(p, len));
      p += len + 2;
      break;
    }
    case '*': {
      std::int64_t n = 0;
      if (!parse_int(line, n) || n < -1 || static_cast<std::uint64_t>(std::max<std::int64_t>(n, 0)) > limits_.max_elements) {
        error = "Protocol error: invalid multibulk length";
        return Status::kError;
      }
      if (n == -1) {
        out = Value{Value::Type::kNullArray, {}, 0, {}};
        break;
      }
      Value arr = Value::array({});
      arr.elements.reserve(static_cast<std::size_t>(std::min<std::int64_t>(n, 1024)));
      for (std::int64_t i = 0; i < n; ++i) {
        Value e;
        const Status s = parse_value(p, e, depth + 1, error);
        if (s != Status::kFrame) return s;
        arr.elements.push_back(std::move(e));
      }
      out = std::move(arr);
      break;
    }
  }
  pos = p;
  return Status::kFrame;
}

void Parser::compact()
{
  if (pos_ > 4096 && pos_ * 2 > buffer_.size()) {
    buffer_.erase(0, pos_);
    pos_ = 0;
  }
}

Parser::Status Parser::next(Value & out, std::string & error)
{
  // Skip blank separators between inline commands.
  while (pos_ < buffer_.size() && (buffer_[pos_] == '\r' || buffer_[pos_] == '\n')) ++pos_;
  std::size_t p = pos_;
  const Status s = parse_value(p, out, 0, error);
  if (s == Status::kFrame) {
    pos_ = p;
    compact();
  } else if (s == Status::kError) {
    buffer_.clear();
    pos_ = 0;
  }
  return s;
}

}  // namespace terasim::resp
