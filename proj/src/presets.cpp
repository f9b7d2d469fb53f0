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

#include "vsum/presets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vsum/error.hpp"

namespace vsum {

std::vector<PlatformPreset> DefaultPresets() {
  return {
      {"facebook-feed", "Facebook feed", 120.0, AspectRatio::Make(16, 9)},
      {"instagram-story", "Instagram story", 20.0, AspectRatio::Make(9, 16)},
      {"facebook-story", "Facebook story", 20.0, AspectRatio::Make(9, 16)},
  };
}

std::vector<PlatformPreset> PresetsFromJson(const nlohmann::json& doc) {
  if (!doc.is_array()) throw Error(ErrorCode::kParseError, "presets must be a JSON array");
  std::vector<PlatformPreset> out;
  try {
    for (const auto& row : doc) {
      PlatformPreset p;
      p.id = row.at("id").get<std::string>();
      p.label = row.value("label", p.id);
      p.max_duration = row.at("max_duration_sec").get<double>();
      p.aspect = AspectRatio::Parse(row.at("aspect").get<std::string>());
      if (p.id.empty() || !(p.max_duration > 0.0) || !std::isfinite(p.max_duration)) {
        throw Error(ErrorCode::kParseError, "preset '" + p.id + "' is invalid");
      }
      for (const auto& q : out) {
        if (q.id == p.id) throw Error(ErrorCode::kParseError, "duplicate preset " + p.id);
      }
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("presets: ") + e.what());
  }
  return out;
}

std::vector<PlatformPreset> LoadPresets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return PresetsFromJson(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

nlohmann::json PresetsToJson(const std::vector<PlatformPreset>& presets) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : presets) {
    out.push_back({{"id", p.id},
                   {"label", p.label},
                   {"max_duration_sec", p.max_duration},
                   {"aspect", p.aspect.ToString()}});
  }
  return out;
}

PresetRegistry::PresetRegistry(std::vector<PlatformPreset> presets)
    : presets_(std::move(presets)) {}

const PlatformPreset& PresetRegistry::Find(const std::string& id) const {
  for (const auto& p : presets_) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::kUnknownPreset, "unknown preset '" + id + "'");
}

SummarySpec MakeCustomSpec(double duration_sec, const std::string& aspect) {
  if (!std::isfinite(duration_sec) || duration_sec <= 0.0) {
    throw Error(ErrorCode::kInvalidSpec, "duration must be a positive number of seconds");
  }
  SummarySpec spec;
  spec.target_duration = duration_sec;
  spec.aspect = AspectRatio::Parse(aspect);
  spec.origin = "custom";
  return spec;
}

SummarySpec SpecFromPreset(const PlatformPreset& preset) {
  return {preset.max_duration, preset.aspect, preset.id};
}

nlohmann::json SpecToJson(const SummarySpec& spec) {
  return {{"duration_sec", spec.target_duration},
          {"aspect", spec.aspect.ToString()},
          {"origin", spec.origin}};
}

SummarySpec SpecFromJson(const nlohmann::json& doc) {
  try {
    SummarySpec spec =
        MakeCustomSpec(doc.at("duration_sec").get<double>(), doc.at("aspect").get<std::string>());
    spec.origin = doc.value("origin", "custom");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
}

}  // namespace vsum
