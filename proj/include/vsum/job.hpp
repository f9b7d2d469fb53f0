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

#ifndef VSUM_JOB_HPP_
#define VSUM_JOB_HPP_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsum/pipeline.hpp"
#include "vsum/presets.hpp"

namespace vsum {

struct SummaryJob {
  std::string id;
  SummarySpec spec;
  std::string source;       // URL or stored upload path
  std::string source_name;  // what the client called it
  Sidecars sidecars;
  JobState state = JobState::kQueued;
  JobState stage = JobState::kQueued;  // last pipeline stage reached
  double progress = 0.0;
  double created = 0.0;  // unix seconds
  double updated = 0.0;
  std::vector<JobState> history{JobState::kQueued};
  std::string error;
  bool purged = false;
  std::optional<nlohmann::json> result;
  std::string output_path;

  nlohmann::json ToJson() const;
  static SummaryJob FromJson(const nlohmann::json& doc);

  // What GET /api/v1/jobs/{id} returns.
  nlohmann::json StatusJson() const;
};

double UnixNow();
std::string NewJobId();

}  // namespace vsum

#endif  // VSUM_JOB_HPP_
