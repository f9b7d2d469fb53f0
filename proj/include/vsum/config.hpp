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

#ifndef VSUM_CONFIG_HPP_
#define VSUM_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "vsum/media_io.hpp"

namespace vsum {

struct PipelineLimits {
  int max_output_width = 1920;
  int max_output_height = 1920;
};

struct ServiceConfig {
  std::string listen_addr = "127.0.0.1:8080";
  std::filesystem::path data_dir = "vsum-data";
  int workers = 2;
  double ttl_hours = 24.0;
  int64_t max_upload_bytes = int64_t{2} << 30;
  std::filesystem::path presets_file;  // empty: built-in presets
  std::filesystem::path static_dir;    // empty: no UI bundle served
  TranscoderConfig transcoder;
  PipelineLimits limits;
};

// Plain "key = value" lines; '#' starts a comment. Unknown keys and bad
// values throw Error(kParseError) naming the line.
ServiceConfig ParseServiceConfig(const std::string& text,
                                 ServiceConfig base = ServiceConfig());
ServiceConfig LoadServiceConfig(const std::filesystem::path& path);

struct HostPort {
  std::string host;
  int port = 0;
};
HostPort ParseListenAddr(const std::string& addr);

}  // namespace vsum

#endif  // VSUM_CONFIG_HPP_
