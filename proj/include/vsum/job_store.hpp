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

#ifndef VSUM_JOB_STORE_HPP_
#define VSUM_JOB_STORE_HPP_

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "vsum/job.hpp"

namespace vsum {

// One JSON document per job:
//
//   <data_dir>/jobs/<id>/job.json
//   <data_dir>/jobs/<id>/inputs/   uploaded media and sidecars
//   <data_dir>/jobs/<id>/work/     intermediates and the rendered summary
class JobStore {
 public:
  explicit JobStore(std::filesystem::path data_dir);

  // Atomic replace (write to a temporary file, then rename).
  void Save(const SummaryJob& job);
  // Every readable job document; corrupt ones are skipped and logged.
  std::vector<SummaryJob> LoadAll() const;

  std::filesystem::path JobDir(const std::string& id) const;
  std::filesystem::path InputsDir(const std::string& id) const;
  std::filesystem::path WorkDir(const std::string& id) const;
  std::filesystem::path UploadsDir() const;

  void ResetWorkDir(const std::string& id);
  // Removes inputs and work; the job document stays.
  void PurgeArtifacts(const std::string& id);

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  std::filesystem::path data_dir_;
  std::mutex write_mu_;
};

}  // namespace vsum

#endif  // VSUM_JOB_STORE_HPP_
