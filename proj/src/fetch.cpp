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

#include <fstream>
#include <string>

#include "vsum/error.hpp"
#include "vsum/internal/httplib.hpp"
#include "vsum/media_io.hpp"

namespace vsum {

bool IsRemoteSource(const std::string& source) {
  return source.find("://") != std::string::npos;
}

void FetchUrl(const std::string& url, const std::filesystem::path& destination,
              int timeout_sec) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kUnsupportedSource, "not a URL: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kUnsupportedSource, "unsupported scheme: " + scheme);
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (origin.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kSourceUnreachable, "URL has no host: " + url);
  }

  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(timeout_sec, 0);
  client.set_read_timeout(timeout_sec, 0);
  client.enable_server_certificate_verification(true);

  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + destination.string());
  }
  int status = 0;
  auto result = client.Get(
      path,
      [&](const httplib::Response& response) {
        status = response.status;
        return status >= 200 && status < 300;
      },
      [&](const char* data, size_t n) {
        out.write(data, static_cast<std::streamsize>(n));
        return static_cast<bool>(out);
      });
  out.close();
  if (!result || status < 200 || status >= 300) {
    std::error_code ec;
    std::filesystem::remove(destination, ec);
    std::string why = result ? "HTTP " + std::to_string(status)
                             : httplib::to_string(result.error());
    throw Error(ErrorCode::kSourceUnreachable, url + ": " + why);
  }
}

}  // namespace vsum
