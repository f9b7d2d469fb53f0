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

#include "vsum/job.hpp"

#include <chrono>
#include <mutex>
#include <random>

#include "vsum/error.hpp"

namespace vsum {

double UnixNow() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

std::string NewJobId() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard<std::mutex> lock(mu);
  static const char* kDigits = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 16; ++i) id += kDigits[rng() & 15];
  return id;
}

nlohmann::json SummaryJob::ToJson() const {
  nlohmann::json history_json = nlohmann::json::array();
  for (JobState s : history) history_json.push_back(ToString(s));
  nlohmann::json doc = {
      {"id", id},
      {"spec", SpecToJson(spec)},
      {"source", source},
      {"source_name", source_name},
      {"sidecars",
       {{"scores", sidecars.scores},
        {"saliency", sidecars.saliency},
        {"shots", sidecars.shots}}},
      {"state", ToString(state)},
      {"stage", ToString(stage)},
      {"progress", progress},
      {"created", created},
      {"updated", updated},
      {"history", history_json},
      {"error", error},
      {"purged", purged},
      {"output_path", output_path},
  };
  if (result) doc["result"] = *result;
  return doc;
}

SummaryJob SummaryJob::FromJson(const nlohmann::json& doc) {
  SummaryJob job;
  try {
    job.id = doc.at("id").get<std::string>();
    job.spec = SpecFromJson(doc.at("spec"));
    job.source = doc.at("source").get<std::string>();
    job.source_name = doc.value("source_name", "");
    if (doc.contains("sidecars")) {
      const auto& s = doc["sidecars"];
      job.sidecars.scores = s.value("scores", "");
      job.sidecars.saliency = s.value("saliency", "");
      job.sidecars.shots = s.value("shots", "");
    }
    job.state = ParseJobState(doc.at("state").get<std::string>());
    job.stage = ParseJobState(doc.value("stage", ToString(job.state)));
    job.progress = doc.value("progress", 0.0);
    job.created = doc.value("created", 0.0);
    job.updated = doc.value("updated", job.created);
    job.history.clear();
    for (const auto& s : doc.value("history", nlohmann::json::array())) {
      job.history.push_back(ParseJobState(s.get<std::string>()));
    }
    job.error = doc.value("error", "");
    job.purged = doc.value("purged", false);
    job.output_path = doc.value("output_path", "");
    if (doc.contains("result") && !doc["result"].is_null()) job.result = doc["result"];
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("job document: ") + e.what());
  }
  return job;
}

nlohmann::json SummaryJob::StatusJson() const {
  nlohmann::json doc = {
      {"job_id", id},
      {"state", ToString(state)},
      {"stage", ToString(stage)},
      {"progress", progress},
      {"spec", SpecToJson(spec)},
      {"source_name", source_name},
      {"created", created},
      {"updated", updated},
      {"purged", purged},
  };
  nlohmann::json history_json = nlohmann::json::array();
  for (JobState s : history) history_json.push_back(ToString(s));
  doc["history"] = history_json;
  if (state == JobState::kFailed) doc["error"] = error;
  return doc;
}

}  // namespace vsum
