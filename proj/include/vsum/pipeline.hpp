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

#ifndef VSUM_PIPELINE_HPP_
#define VSUM_PIPELINE_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsum/config.hpp"
#include "vsum/media_io.hpp"
#include "vsum/presets.hpp"
#include "vsum/selection.hpp"
#include "vsum/shots.hpp"
#include "vsum/smart_crop.hpp"

namespace vsum {

// Canonical order; a job only ever moves forward through it.
enum class JobState {
  kQueued,
  kFetching,
  kProbing,
  kSegmenting,
  kScoring,
  kSelecting,
  kSaliency,
  kCropping,
  kRendering,
  kDone,
  kFailed,
};

const char* ToString(JobState state);
JobState ParseJobState(const std::string& name);
inline bool IsTerminal(JobState s) { return s == JobState::kDone || s == JobState::kFailed; }

// True when `sequence` is a subsequence of the canonical order with at most
// one terminal state, at the end.
bool IsCanonicalSequence(const std::vector<JobState>& sequence);

// Optional precomputed inputs. Each is a local path or an http(s) URL.
struct Sidecars {
  std::string scores;    // JSON array or one float per line, per frame
  std::string saliency;  // SALM file or a directory of PNG maps, per frame
  std::string shots;     // JSON [[start, end], ...]
};

struct PipelineInput {
  std::string source;  // local path or http(s) URL
  SummarySpec spec;
  Sidecars sidecars;
};

struct PipelineOptions {
  ShotDetectorOptions shots;
  ClusteringOptions clustering;
  SmoothingOptions smoothing;
  int map_width = 64;
  int map_height = 64;
  PipelineLimits limits;
};

struct PipelineHooks {
  std::function<void(JobState)> on_stage;
  // Overall job progress in [0, 1], non-decreasing.
  std::function<void(double)> on_progress;
  // Polled between frames; returning true aborts with Error(kCancelled).
  std::function<bool()> cancelled;
};

struct PipelineResult {
  VideoAsset asset;
  std::vector<Shot> shots;
  std::vector<int> selected_shots;
  std::vector<Fragment> fragments;
  std::vector<TraceEntry> crop_trace;
  std::filesystem::path output;
  int output_width = 0;
  int output_height = 0;
  int64_t budget_frames = 0;
  bool imported_scores = false;
  bool imported_saliency = false;
  bool imported_shots = false;
};

// fetch, probe, segment, score, select, saliency, crop, render. Intermediate
// files (fetched media, shots.json, scores.json, crop_trace.json) and the
// rendered summary land in `work_dir`.
PipelineResult RunPipeline(const TranscoderConfig& transcoder,
                           const PipelineInput& input,
                           const std::filesystem::path& work_dir,
                           const PipelineOptions& options = {},
                           const PipelineHooks& hooks = {});

// Fragments, durations and crop trace for API consumers.
nlohmann::json ResultToJson(const PipelineResult& result, const SummarySpec& spec);

}  // namespace vsum

#endif  // VSUM_PIPELINE_HPP_
