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

#include "vsum/job_store.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "vsum/error.hpp"

namespace vsum {

namespace fs = std::filesystem;

JobStore::JobStore(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  fs::create_directories(data_dir_ / "jobs");
  fs::create_directories(UploadsDir());
}

fs::path JobStore::JobDir(const std::string& id) const { return data_dir_ / "jobs" / id; }
fs::path JobStore::InputsDir(const std::string& id) const { return JobDir(id) / "inputs"; }
fs::path JobStore::WorkDir(const std::string& id) const { return JobDir(id) / "work"; }
fs::path JobStore::UploadsDir() const { return data_dir_ / "uploads"; }

void JobStore::Save(const SummaryJob& job) {
  std::lock_guard<std::mutex> lock(write_mu_);
  const fs::path dir = JobDir(job.id);
  fs::create_directories(dir);
  const fs::path tmp = dir / "job.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << job.ToJson().dump(1) << "\n";
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / "job.json");
}

std::vector<SummaryJob> JobStore::LoadAll() const {
  std::vector<SummaryJob> jobs;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(data_dir_ / "jobs", ec)) {
    const fs::path doc_path = entry.path() / "job.json";
    if (!fs::is_regular_file(doc_path)) continue;
    try {
      std::ifstream in(doc_path);
      std::stringstream ss;
      ss << in.rdbuf();
      jobs.push_back(SummaryJob::FromJson(nlohmann::json::parse(ss.str())));
    } catch (const std::exception& e) {
      std::cerr << "vsum: skipping unreadable job " << doc_path << ": " << e.what() << "\n";
    }
  }
  return jobs;
}

void JobStore::ResetWorkDir(const std::string& id) {
  std::error_code ec;
  fs::remove_all(WorkDir(id), ec);
  fs::create_directories(WorkDir(id));
}

void JobStore::PurgeArtifacts(const std::string& id) {
  std::error_code ec;
  fs::remove_all(WorkDir(id), ec);
  fs::remove_all(InputsDir(id), ec);
}

}  // namespace vsum
