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

#ifndef VSUM_SERVICE_HPP_
#define VSUM_SERVICE_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vsum/config.hpp"
#include "vsum/job.hpp"
#include "vsum/job_store.hpp"
#include "vsum/pipeline.hpp"
#include "vsum/presets.hpp"

namespace vsum {

struct CustomSpecRequest {
  double duration_sec = 0.0;
  std::string aspect;
};

struct JobRequest {
  std::string source;  // http(s) URL or local path
  std::string source_name;
  std::optional<std::string> preset;
  std::optional<CustomSpecRequest> custom;
  Sidecars sidecars;
  // Local files (source or sidecars) the service takes over: they move into
  // the job's inputs directory and the request paths are rewritten.
  bool take_ownership = false;
};

// Job registry, FIFO worker pool and retention. All public methods are
// thread-safe.
class SummaryService {
 public:
  explicit SummaryService(ServiceConfig config, PipelineOptions options = {});
  ~SummaryService();

  SummaryService(const SummaryService&) = delete;
  SummaryService& operator=(const SummaryService&) = delete;

  // Starts workers and the retention sweeper. Jobs left mid-run by a previous
  // process were re-queued at construction.
  void Start();
  // Stops accepting work; running jobs are cancelled and re-queued on disk so
  // the next process picks them up.
  void Stop();

  // Throws UnknownPreset, InvalidSpec, UnsupportedSource, InvalidArgument.
  std::string Submit(JobRequest request);

  // Throws NotFound.
  SummaryJob Get(const std::string& id) const;
  std::vector<SummaryJob> List() const;

  // Throws NotFound, NotReady (not done), Gone (purged).
  nlohmann::json Result(const std::string& id) const;
  std::filesystem::path DownloadPath(const std::string& id) const;

  // Queued or running jobs fail as "cancelled"; artifacts are purged. The
  // job record stays. Throws NotFound.
  SummaryJob Delete(const std::string& id);

  // Purges artifacts of terminal jobs older than the TTL. Returns the count.
  int PurgeExpired(double now);

  // Blocks until the job is terminal or the timeout passes.
  std::optional<SummaryJob> WaitForTerminal(const std::string& id,
                                            std::chrono::milliseconds timeout) const;

  const PresetRegistry& presets() const { return presets_; }
  const ServiceConfig& config() const { return config_; }
  JobStore& store() { return store_; }

 private:
  struct Running {
    std::atomic<bool> cancel{false};
  };

  void WorkerLoop();
  void SweeperLoop();
  void RunJob(const std::string& id, const std::shared_ptr<Running>& running);
  // Applies `mutate` to the job under the lock, stamps it, persists it and
  // wakes waiters.
  template <typename Fn>
  SummaryJob Update(const std::string& id, Fn&& mutate);
  SummarySpec ResolveSpec(const JobRequest& request) const;

  ServiceConfig config_;
  PipelineOptions options_;
  PresetRegistry presets_;
  JobStore store_;

  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::map<std::string, SummaryJob> jobs_;
  std::deque<std::string> queue_;
  std::map<std::string, std::shared_ptr<Running>> running_;
  bool stopping_ = false;
  bool started_ = false;
  std::vector<std::thread> workers_;
  std::thread sweeper_;
};

}  // namespace vsum

#endif  // VSUM_SERVICE_HPP_
