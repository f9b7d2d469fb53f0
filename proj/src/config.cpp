// Copyright 2026 The vsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vsum/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vsum/error.hpp"

namespace vsum {
namespace {

std::string Trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(const std::string& value, int line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kParseError,
                "config line " + std::to_string(line_no) + ": bad number '" + value + "'");
  }
  return v;
}

}  // namespace

ServiceConfig ParseServiceConfig(const std::string& text, ServiceConfig base) {
  ServiceConfig c = std::move(base);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    auto positive = [&](auto v) {
      if (v <= 0) {
        throw Error(ErrorCode::kParseError,
                    "config line " + std::to_string(line_no) + ": " + key + " must be > 0");
      }
      return v;
    };
    if (key == "listen_addr") {
      ParseListenAddr(value);
      c.listen_addr = value;
    } else if (key == "data_dir") {
      c.data_dir = value;
    } else if (key == "workers") {
      c.workers = positive(ParseNumber<int>(value, line_no));
    } else if (key == "ttl_hours") {
      c.ttl_hours = positive(ParseNumber<double>(value, line_no));
    } else if (key == "max_upload_bytes") {
      c.max_upload_bytes = positive(ParseNumber<int64_t>(value, line_no));
    } else if (key == "presets_file") {
      c.presets_file = value;
    } else if (key == "static_dir") {
      c.static_dir = value;
    } else if (key == "transcoder_path") {
      c.transcoder.transcoder_path = value;
    } else if (key == "probe_template") {
      c.transcoder.probe_template = value;
    } else if (key == "decode_template") {
      c.transcoder.decode_template = value;
    } else if (key == "encode_template") {
      c.transcoder.encode_template = value;
    } else if (key == "output_extension") {
      c.transcoder.output_extension = value;
    } else if (key == "work_dir") {
      c.transcoder.work_dir = value;
    } else if (key == "fetch_timeout_sec") {
      c.transcoder.fetch_timeout_sec = positive(ParseNumber<int>(value, line_no));
    } else if (key == "max_output_width") {
      c.limits.max_output_width = positive(ParseNumber<int>(value, line_no));
    } else if (key == "max_output_height") {
      c.limits.max_output_height = positive(ParseNumber<int>(value, line_no));
    } else {
      throw Error(ErrorCode::kParseError,
                  "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

ServiceConfig LoadServiceConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ServiceConfig c = ParseServiceConfig(ss.str());
  // Relative paths are taken from the config file's directory.
  const auto base = path.parent_path();
  auto resolve = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  resolve(c.data_dir);
  resolve(c.presets_file);
  resolve(c.static_dir);
  const std::string& tool = c.transcoder.transcoder_path;
  if (tool.find('/') != std::string::npos && std::filesystem::path(tool).is_relative()) {
    c.transcoder.transcoder_path = (base / tool).string();
  }
  return c;
}

HostPort ParseListenAddr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::kParseError, "listen_addr must be host:port, got '" + addr + "'");
  }
  HostPort hp;
  hp.host = addr.substr(0, colon);
  if (hp.host.size() > 2 && hp.host.front() == '[' && hp.host.back() == ']') {
    hp.host = hp.host.substr(1, hp.host.size() - 2);
  }
  const std::string port = addr.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), hp.port);
  if (ec != std::errc() || ptr != port.data() + port.size() || hp.port < 0 ||
      hp.port > 65535) {
    throw Error(ErrorCode::kParseError, "bad port in listen_addr '" + addr + "'");
  }
  return hp;
}

}  // namespace vsum
