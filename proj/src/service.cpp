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

#include "vsum/service.hpp"

#include <algorithm>
#include <iostream>

#include "vsum/error.hpp"

namespace vsum {

namespace fs = std::filesystem;

namespace {

void CheckSourceScheme(const std::string& source, const char* what) {
  if (source.empty()) return;
  if (IsRemoteSource(source)) {
    if (!source.starts_with("http://") && !source.starts_with("https://")) {
      throw Error(ErrorCode::kUnsupportedSource,
                  std::string(what) + ": only http(s) URLs are supported");
    }
  } else if (!fs::exists(source)) {
    throw Error(ErrorCode::kSourceUnreachable, std::string(what) + ": no such file " + source);
  }
}

// Moves a local file into `dir`, falling back to copy across filesystems.
std::string Adopt(const std::string& path, const fs::path& dir, const std::string& stem) {
  if (path.empty() || IsRemoteSource(path)) return path;
  const fs::path from(path);
  const fs::path to = dir / (stem + from.extension().string());
  std::error_code ec;
  fs::rename(from, to, ec);
  if (ec) {
    fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    fs::remove_all(from, ec);
  }
  return to.string();
}

void ResetToQueued(SummaryJob& job) {
  job.state = JobState::kQueued;
  job.stage = JobState::kQueued;
  job.progress = 0.0;
  job.history = {JobState::kQueued};
  job.error.clear();
  job.result.reset();
  job.output_path.clear();
}

}  // namespace

SummaryService::SummaryService(ServiceConfig config, PipelineOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      presets_(config_.presets_file.empty() ? DefaultPresets()
                                            : LoadPresets(config_.presets_file)),
      store_(config_.data_dir) {
  options_.limits = config_.limits;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(store_.UploadsDir(), ec)) {
    fs::remove_all(entry.path(), ec);
  }
  std::vector<SummaryJob> pending;
  for (SummaryJob& job : store_.LoadAll()) {
    if (!IsTerminal(job.state)) {
      ResetToQueued(job);
      job.updated = UnixNow();
      store_.ResetWorkDir(job.id);
      store_.Save(job);
      pending.push_back(job);
    }
    jobs_.emplace(job.id, std::move(job));
  }
  std::sort(pending.begin(), pending.end(),
            [](const SummaryJob& a, const SummaryJob& b) { return a.created < b.created; });
  for (const SummaryJob& job : pending) queue_.push_back(job.id);
}

SummaryService::~SummaryService() { Stop(); }

void SummaryService::Start() {
  std::lock_guard<std::mutex> lock(mu_);
  if (started_) return;
  started_ = true;
  stopping_ = false;
  for (int i = 0; i < std::max(1, config_.workers); ++i) {
    workers_.emplace_back([this] { WorkerLoop(); });
  }
  sweeper_ = std::thread([this] { SweeperLoop(); });
}

void SummaryService::Stop() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!started_) return;
    stopping_ = true;
    for (auto& [id, running] : running_) running->cancel = true;
  }
  changed_.notify_all();
  for (auto& t : workers_) t.join();
  workers_.clear();
  if (sweeper_.joinable()) sweeper_.join();
  std::lock_guard<std::mutex> lock(mu_);
  started_ = false;
}

SummarySpec SummaryService::ResolveSpec(const JobRequest& request) const {
  if (request.preset && request.custom) {
    throw Error(ErrorCode::kInvalidSpec, "give either a preset or a custom spec, not both");
  }
  if (request.preset) return SpecFromPreset(presets_.Find(*request.preset));
  if (request.custom) return MakeCustomSpec(request.custom->duration_sec, request.custom->aspect);
  throw Error(ErrorCode::kInvalidSpec, "a preset or a custom spec is required");
}

std::string SummaryService::Submit(JobRequest request) {
  if (request.source.empty()) throw Error(ErrorCode::kInvalidArgument, "source is required");
  const SummarySpec spec = ResolveSpec(request);
  CheckSourceScheme(request.source, "source");
  CheckSourceScheme(request.sidecars.scores, "scores");
  CheckSourceScheme(request.sidecars.saliency, "saliency");
  CheckSourceScheme(request.sidecars.shots, "shots");

  SummaryJob job;
  job.id = NewJobId();
  job.spec = spec;
  job.source_name = request.source_name.empty() ? request.source : request.source_name;
  fs::create_directories(store_.InputsDir(job.id));
  fs::create_directories(store_.WorkDir(job.id));
  if (request.take_ownership) {
    const fs::path inputs = store_.InputsDir(job.id);
    request.source = Adopt(request.source, inputs, "source");
    request.sidecars.scores = Adopt(request.sidecars.scores, inputs, "scores");
    request.sidecars.saliency = Adopt(request.sidecars.saliency, inputs, "saliency");
    request.sidecars.shots = Adopt(request.sidecars.shots, inputs, "shots");
  }
  job.source = request.source;
  job.sidecars = request.sidecars;
  job.created = job.updated = UnixNow();
  store_.Save(job);
  const std::string id = job.id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    queue_.push_back(id);
    jobs_.emplace(id, std::move(job));
  }
  changed_.notify_all();
  return id;
}

template <typename Fn>
SummaryJob SummaryService::Update(const std::string& id, Fn&& mutate) {
  SummaryJob snapshot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    SummaryJob& job = jobs_.at(id);
    const bool persist = mutate(job);
    job.updated = UnixNow();
    if (persist) store_.Save(job);
    snapshot = job;
  }
  changed_.notify_all();
  return snapshot;
}

void SummaryService::WorkerLoop() {
  for (;;) {
    std::string id;
    auto running = std::make_shared<Running>();
    {
      std::unique_lock<std::mutex> lock(mu_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
      running_[id] = running;
    }
    RunJob(id, running);
    {
      std::lock_guard<std::mutex> lock(mu_);
      running_.erase(id);
    }
    changed_.notify_all();
  }
}

void SummaryService::RunJob(const std::string& id, const std::shared_ptr<Running>& running) {
  PipelineInput input;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const SummaryJob& job = jobs_.at(id);
    input.source = job.source;
    input.spec = job.spec;
    input.sidecars = job.sidecars;
  }
  store_.ResetWorkDir(id);

  double last_saved = 0.0;
  PipelineHooks hooks;
  hooks.on_stage = [&](JobState state) {
    Update(id, [&](SummaryJob& job) {
      job.state = job.stage = state;
      job.history.push_back(state);
      return true;
    });
  };
  hooks.on_progress = [&](double p) {
    Update(id, [&](SummaryJob& job) {
      job.progress = std::max(job.progress, p);
      if (job.progress - last_saved < 0.01) return false;
      last_saved = job.progress;
      return true;
    });
  };
  hooks.cancelled = [&] { return running->cancel.load(); };

  try {
    const PipelineResult result =
        RunPipeline(config_.transcoder, input, store_.WorkDir(id), options_, hooks);
    nlohmann::json doc = ResultToJson(result, input.spec);
    Update(id, [&](SummaryJob& job) {
      job.state = JobState::kDone;
      job.history.push_back(JobState::kDone);
      job.progress = 1.0;
      job.result = doc;
      job.output_path = result.output.string();
      return true;
    });
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    const bool cancelled = err && err->code() == ErrorCode::kCancelled;
    bool shutting_down = false;
    {
      std::lock_guard<std::mutex> lock(mu_);
      shutting_down = stopping_;
    }
    if (cancelled && shutting_down) {
      // Picked up again by the next process.
      Update(id, [&](SummaryJob& job) {
        ResetToQueued(job);
        return true;
      });
      return;
    }
    Update(id, [&](SummaryJob& job) {
      job.state = JobState::kFailed;
      job.history.push_back(JobState::kFailed);
      job.error = cancelled ? "cancelled" : e.what();
      return true;
    });
    if (cancelled) {
      store_.PurgeArtifacts(id);
      Update(id, [](SummaryJob& job) {
        job.purged = true;
        return true;
      });
    }
  }
}

SummaryJob SummaryService::Get(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "no job " + id);
  return it->second;
}

std::vector<SummaryJob> SummaryService::List() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<SummaryJob> out;
  for (const auto& [id, job] : jobs_) out.push_back(job);
  std::sort(out.begin(), out.end(),
            [](const SummaryJob& a, const SummaryJob& b) { return a.created < b.created; });
  return out;
}

namespace {

void RequireDone(const SummaryJob& job) {
  if (job.purged) throw Error(ErrorCode::kGone, "artifacts of job " + job.id + " were purged");
  if (job.state != JobState::kDone) {
    std::string msg = "job " + job.id + " is " + ToString(job.state);
    if (job.state == JobState::kFailed) msg += ": " + job.error;
    throw Error(ErrorCode::kNotReady, msg);
  }
}

}  // namespace

nlohmann::json SummaryService::Result(const std::string& id) const {
  const SummaryJob job = Get(id);
  RequireDone(job);
  nlohmann::json doc = job.result.value_or(nlohmann::json::object());
  doc["job_id"] = job.id;
  doc["download"] = "/api/v1/jobs/" + job.id + "/download";
  return doc;
}

fs::path SummaryService::DownloadPath(const std::string& id) const {
  const SummaryJob job = Get(id);
  RequireDone(job);
  if (job.output_path.empty() || !fs::is_regular_file(job.output_path)) {
    throw Error(ErrorCode::kGone, "summary file of job " + id + " is missing");
  }
  return job.output_path;
}

SummaryJob SummaryService::Delete(const std::string& id) {
  {
    std::unique_lock<std::mutex> lock(mu_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "no job " + id);
    const auto queued = std::find(queue_.begin(), queue_.end(), id);
    if (queued != queue_.end()) {
      queue_.erase(queued);
      SummaryJob& job = it->second;
      job.state = JobState::kFailed;
      job.history.push_back(JobState::kFailed);
      job.error = "cancelled";
    } else if (const auto run = running_.find(id); run != running_.end()) {
      run->second->cancel = true;
      changed_.wait_for(lock, std::chrono::seconds(60),
                        [&] { return running_.find(id) == running_.end(); });
    }
  }
  store_.PurgeArtifacts(id);
  return Update(id, [](SummaryJob& job) {
    job.purged = true;
    return true;
  });
}

int SummaryService::PurgeExpired(double now) {
  std::vector<std::string> expired;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const double ttl = config_.ttl_hours * 3600.0;
    for (const auto& [id, job] : jobs_) {
      if (IsTerminal(job.state) && !job.purged && job.updated + ttl < now) {
        expired.push_back(id);
      }
    }
  }
  for (const std::string& id : expired) {
    store_.PurgeArtifacts(id);
    Update(id, [](SummaryJob& job) {
      job.purged = true;
      return true;
    });
  }
  return static_cast<int>(expired.size());
}

void SummaryService::SweeperLoop() {
  const auto period = std::chrono::duration<double>(
      std::clamp(config_.ttl_hours * 3600.0 / 10.0, 1.0, 60.0));
  std::unique_lock<std::mutex> lock(mu_);
  while (!stopping_) {
    changed_.wait_for(lock, period, [&] { return stopping_; });
    if (stopping_) break;
    lock.unlock();
    try {
      PurgeExpired(UnixNow());
    } catch (const std::exception& e) {
      std::cerr << "vsum: retention sweep failed: " << e.what() << "\n";
    }
    lock.lock();
  }
}

std::optional<SummaryJob> SummaryService::WaitForTerminal(
    const std::string& id, std::chrono::milliseconds timeout) const {
  std::unique_lock<std::mutex> lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "no job " + id);
  if (!changed_.wait_for(lock, timeout, [&] { return IsTerminal(jobs_.at(id).state); })) {
    return std::nullopt;
  }
  return jobs_.at(id);
}

}  // namespace vsum
