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

#ifndef VSUM_HTTP_API_HPP_
#define VSUM_HTTP_API_HPP_

#include <memory>
#include <string>
#include <thread>

#include "vsum/service.hpp"

namespace httplib {
class Server;
}

namespace vsum {

// REST front of a SummaryService.
//
//   POST   /api/v1/jobs                 multipart or JSON -> 202 {"job_id"}
//   GET    /api/v1/jobs                 all jobs
//   GET    /api/v1/jobs/{id}            status
//   GET    /api/v1/jobs/{id}/result     result document (404/409/410)
//   GET    /api/v1/jobs/{id}/download   rendered summary
//   DELETE /api/v1/jobs/{id}            cancel and purge
//   GET    /api/v1/presets              preset list
class HttpApi {
 public:
  explicit HttpApi(SummaryService& service);
  ~HttpApi();

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Serve();
  // Bind + Serve on a background thread.
  int StartInBackground(const std::string& host, int port);
  void Stop();

  int port() const { return port_; }

 private:
  void Register();

  SummaryService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace vsum

#endif  // VSUM_HTTP_API_HPP_
