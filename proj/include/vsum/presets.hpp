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

#ifndef VSUM_PRESETS_HPP_
#define VSUM_PRESETS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsum/geometry.hpp"

namespace vsum {

struct PlatformPreset {
  std::string id;
  std::string label;
  double max_duration = 0.0;  // seconds
  AspectRatio aspect;
};

// What a job produces: a target length and frame shape.
struct SummarySpec {
  double target_duration = 0.0;  // seconds
  AspectRatio aspect;
  std::string origin = "custom";  // preset id or "custom"
};

// facebook-feed (120 s, 16:9), instagram-story and facebook-story (20 s, 9:16).
std::vector<PlatformPreset> DefaultPresets();

// [{"id", "label", "max_duration_sec", "aspect": "W:H"}, ...]
std::vector<PlatformPreset> PresetsFromJson(const nlohmann::json& doc);
std::vector<PlatformPreset> LoadPresets(const std::filesystem::path& path);
nlohmann::json PresetsToJson(const std::vector<PlatformPreset>& presets);

class PresetRegistry {
 public:
  PresetRegistry() : presets_(DefaultPresets()) {}
  explicit PresetRegistry(std::vector<PlatformPreset> presets);

  // Throws Error(kUnknownPreset).
  const PlatformPreset& Find(const std::string& id) const;
  const std::vector<PlatformPreset>& all() const { return presets_; }

 private:
  std::vector<PlatformPreset> presets_;
};

// Throws Error(kInvalidSpec) for a non-positive or non-finite duration or a
// malformed aspect.
SummarySpec MakeCustomSpec(double duration_sec, const std::string& aspect);
SummarySpec SpecFromPreset(const PlatformPreset& preset);

nlohmann::json SpecToJson(const SummarySpec& spec);
SummarySpec SpecFromJson(const nlohmann::json& doc);

}  // namespace vsum

#endif  // VSUM_PRESETS_HPP_
