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

#include "vsum/pipeline.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

#include "vsum/error.hpp"
#include "vsum/saliency.hpp"
#include "vsum/scoring.hpp"

namespace vsum {
namespace {

constexpr std::array<const char*, 11> kStateNames = {
    "queued",  "fetching", "probing",   "segmenting", "scoring", "selecting",
    "saliency", "cropping", "rendering", "done",       "failed"};

// Share of overall progress per stage, fetching through rendering.
constexpr std::array<double, 8> kStageWeights = {0.03, 0.02, 0.25, 0.05,
                                                 0.02, 0.20, 0.03, 0.40};

class StageTracker {
 public:
  explicit StageTracker(const PipelineHooks& hooks) : hooks_(hooks) {}

  void Enter(JobState state) {
    if (stage_ >= 0) base_ += kStageWeights[static_cast<size_t>(stage_)];
    stage_ = static_cast<int>(state) - static_cast<int>(JobState::kFetching);
    if (hooks_.on_stage) hooks_.on_stage(state);
    Report(0.0);
  }

  void Report(double within) {
    CheckCancelled();
    const double p = std::min(
        1.0, base_ + kStageWeights[static_cast<size_t>(stage_)] * std::clamp(within, 0.0, 1.0));
    if (p > last_ + 1e-4 || within >= 1.0) {
      last_ = std::max(last_, p);
      if (hooks_.on_progress) hooks_.on_progress(last_);
    }
  }

  void CheckCancelled() const {
    if (hooks_.cancelled && hooks_.cancelled()) {
      throw Error(ErrorCode::kCancelled, "cancelled");
    }
  }

 private:
  const PipelineHooks& hooks_;
  int stage_ = -1;
  double base_ = 0.0;
  double last_ = 0.0;
};

std::string ExtensionOf(const std::string& source) {
  std::string path = source.substr(0, source.find_first_of("?#"));
  const auto slash = path.rfind('/');
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return "";
  const std::string ext = path.substr(dot);
  return ext.size() <= 8 ? ext : "";
}

// Local path for a source or sidecar, downloading remote ones into work_dir.
std::filesystem::path Materialize(const std::string& source, const std::string& stem,
                                  const std::filesystem::path& work_dir, int timeout) {
  if (!IsRemoteSource(source)) return source;
  const auto dest = work_dir / (stem + ExtensionOf(source));
  FetchUrl(source, dest, timeout);
  return dest;
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  out << doc.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

int64_t DecodeStep(int64_t frame_count) { return std::max<int64_t>(1, frame_count / 200); }

}  // namespace

const char* ToString(JobState state) { return kStateNames[static_cast<size_t>(state)]; }

JobState ParseJobState(const std::string& name) {
  for (size_t i = 0; i < kStateNames.size(); ++i) {
    if (name == kStateNames[i]) return static_cast<JobState>(i);
  }
  throw Error(ErrorCode::kParseError, "unknown job state '" + name + "'");
}

bool IsCanonicalSequence(const std::vector<JobState>& sequence) {
  int prev = -1;
  for (size_t i = 0; i < sequence.size(); ++i) {
    const JobState s = sequence[i];
    if (IsTerminal(s) && i + 1 != sequence.size()) return false;
    const int rank = static_cast<int>(s);
    if (rank <= prev) return false;
    if (!IsTerminal(s)) prev = rank;
  }
  return true;
}

PipelineResult RunPipeline(const TranscoderConfig& transcoder, const PipelineInput& input,
                           const std::filesystem::path& work_dir,
                           const PipelineOptions& options, const PipelineHooks& hooks) {
  std::filesystem::create_directories(work_dir);
  StageTracker tracker(hooks);
  PipelineResult result;
  const int timeout = transcoder.fetch_timeout_sec;

  tracker.Enter(JobState::kFetching);
  const auto media = Materialize(input.source, "source", work_dir, timeout);
  std::filesystem::path scores_path, saliency_path, shots_path;
  if (!input.sidecars.scores.empty()) {
    scores_path = Materialize(input.sidecars.scores, "scores-input", work_dir, timeout);
  }
  if (!input.sidecars.saliency.empty()) {
    saliency_path = Materialize(input.sidecars.saliency, "saliency-input", work_dir, timeout);
  }
  if (!input.sidecars.shots.empty()) {
    shots_path = Materialize(input.sidecars.shots, "shots-input", work_dir, timeout);
  }
  tracker.Report(1.0);

  tracker.Enter(JobState::kProbing);
  VideoAsset& asset = result.asset;
  asset = Probe(transcoder, media.string());
  asset.source = input.source;
  const CropWindow window_size = WindowSize(asset.width, asset.height, input.spec.aspect);
  tracker.Report(1.0);

  // One decode pass feeds both the cut detector and, unless scores were
  // supplied, the motion baseline.
  tracker.Enter(JobState::kSegmenting);
  const int64_t n = asset.frame_count;
  const int64_t step = DecodeStep(n);
  std::unique_ptr<MotionScorer> motion;
  auto decode_pass = [&](ShotDetector* detector, MotionScorer* scorer) {
    FrameReader reader(transcoder, asset);
    while (auto frame = reader.Next()) {
      if (detector) detector->Push(*frame);
      if (scorer) scorer->Push(*frame);
      if (frame->index % step == 0) tracker.Report(double(frame->index + 1) / double(n));
    }
  };
  if (!shots_path.empty()) {
    result.shots = ImportShots(shots_path, n);
    result.imported_shots = true;
  } else {
    ShotDetector detector(options.shots);
    if (scores_path.empty()) motion = std::make_unique<MotionScorer>();
    decode_pass(&detector, motion.get());
    result.shots = detector.Finish();
  }
  WriteJson(work_dir / "shots.json", ShotsToJson(result.shots));
  tracker.Report(1.0);

  tracker.Enter(JobState::kScoring);
  ImportanceSeries series;
  if (!scores_path.empty()) {
    series = ImportScores(scores_path, n);
    result.imported_scores = true;
  } else {
    if (!motion) {
      motion = std::make_unique<MotionScorer>();
      decode_pass(nullptr, motion.get());
    }
    series = motion->Finish();
    motion.reset();
  }
  WriteJson(work_dir / "scores.json", series.scores);
  tracker.Report(1.0);

  tracker.Enter(JobState::kSelecting);
  result.budget_frames = BudgetFrames(input.spec.target_duration, asset.fps());
  const auto values = AggregateShotValues(series, result.shots);
  const FragmentSelection selection = SelectFragments(values, result.budget_frames);
  result.selected_shots = selection.selected;
  result.fragments = Assemble(selection, result.shots);
  if (result.fragments.empty()) {
    throw Error(ErrorCode::kEmptySelection,
                "no shot fits the " + std::to_string(result.budget_frames) + "-frame budget");
  }
  tracker.Report(1.0);

  tracker.Enter(JobState::kSaliency);
  const int64_t total = TotalFrames(result.fragments);
  std::vector<FocusPoint> focus;
  focus.reserve(static_cast<size_t>(total));
  auto add_focus = [&](const SaliencyMap& map) {
    focus.push_back(FocusFromSaliency(map, asset.width, asset.height,
                                                options.clustering));
    tracker.Report(double(focus.size()) / double(total));
  };
  if (!saliency_path.empty()) {
    SaliencySource maps(saliency_path, n);
    for (const Fragment& f : result.fragments) {
      for (int64_t i = f.start_frame; i <= f.end_frame; ++i) add_focus(maps.Read(i));
    }
    result.imported_saliency = true;
  } else {
    FrameReader reader(transcoder, asset);
    size_t frag = 0;
    while (frag < result.fragments.size()) {
      auto frame = reader.Next();
      if (!frame) throw Error(ErrorCode::kDecodeFailure, "video ended inside a fragment");
      if (frame->index < result.fragments[frag].start_frame) continue;
      add_focus(SpectralResidual(*frame, options.map_width, options.map_height));
      if (frame->index == result.fragments[frag].end_frame) ++frag;
    }
    reader.Close();
  }

  tracker.Enter(JobState::kCropping);
  std::vector<int64_t> segments;
  for (const Fragment& f : result.fragments) segments.push_back(f.length());
  const auto centers = SmoothCenters(focus, segments, options.smoothing);
  std::vector<CropWindow> windows;
  windows.reserve(centers.size());
  size_t k = 0;
  for (const Fragment& f : result.fragments) {
    for (int64_t i = f.start_frame; i <= f.end_frame; ++i, ++k) {
      windows.push_back(PlaceWindow(centers[k], window_size, asset.width, asset.height));
      result.crop_trace.push_back({i, windows.back()});
    }
  }
  WriteJson(work_dir / "crop_trace.json", CropTraceToJson(result.crop_trace));
  tracker.Report(1.0);

  tracker.Enter(JobState::kRendering);
  OutputSpec spec;
  spec.output = work_dir / ("summary." + transcoder.output_extension);
  spec.max_width = options.limits.max_output_width;
  spec.max_height = options.limits.max_output_height;
  const CropWindow dims =
      OutputDimensions(window_size.w, window_size.h, spec.max_width, spec.max_height);
  result.output_width = dims.w;
  result.output_height = dims.h;
  result.output = RenderSummary(transcoder, asset, result.fragments, windows, spec,
                                [&](double f) { tracker.Report(f); });
  tracker.Report(1.0);
  return result;
}

nlohmann::json ResultToJson(const PipelineResult& r, const SummarySpec& spec) {
  const double fps = r.asset.fps();
  nlohmann::json shots = nlohmann::json::array();
  for (const Shot& s : r.shots) shots.push_back({s.start_frame, s.end_frame});
  nlohmann::json fragments = nlohmann::json::array();
  for (const Fragment& f : r.fragments) {
    fragments.push_back({{"start_frame", f.start_frame},
                         {"end_frame", f.end_frame},
                         {"start_sec", f.start_frame / fps},
                         {"duration_sec", f.length() / fps}});
  }
  const int64_t summary_frames = TotalFrames(r.fragments);
  return {
      {"spec", SpecToJson(spec)},
      {"source",
       {{"width", r.asset.width},
        {"height", r.asset.height},
        {"frame_rate", r.asset.frame_rate.ToString()},
        {"frame_count", r.asset.frame_count},
        {"duration_sec", r.asset.duration}}},
      {"budget_frames", r.budget_frames},
      {"shots", shots},
      {"selected_shots", r.selected_shots},
      {"fragments", fragments},
      {"summary_frames", summary_frames},
      {"summary_duration_sec", summary_frames / fps},
      {"output",
       {{"width", r.output_width},
        {"height", r.output_height},
        {"file", r.output.filename().string()}}},
      {"inputs",
       {{"scores", r.imported_scores ? "imported" : "baseline"},
        {"saliency", r.imported_saliency ? "imported" : "spectral_residual"},
        {"shots", r.imported_shots ? "imported" : "detected"}}},
      {"crop_trace", CropTraceToJson(r.crop_trace)},
  };
}

}  // namespace vsum
