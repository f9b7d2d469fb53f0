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

#include <pthread.h>
#include <signal.h>
#include <stdlib.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vsum/config.hpp"
#include "vsum/error.hpp"
#include "vsum/evaluation.hpp"
#include "vsum/http_api.hpp"
#include "vsum/pipeline.hpp"
#include "vsum/presets.hpp"
#include "vsum/service.hpp"

namespace fs = std::filesystem;

namespace vsum {
namespace {

nlohmann::json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  out << doc.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

ServiceConfig LoadConfigOrDefault(const std::string& path) {
  return path.empty() ? ServiceConfig() : LoadServiceConfig(path);
}

// Machine summary: per-frame 0/1 array, [[start, end], ...] fragments, or a
// result document with a "fragments" list.
std::vector<uint8_t> MachineMask(const nlohmann::json& doc, int64_t frame_count) {
  const nlohmann::json& list = doc.is_object() ? doc.at("fragments") : doc;
  if (!list.is_array()) throw Error(ErrorCode::kParseError, "summary must be a JSON array");
  const bool fragments =
      doc.is_object() || (!list.empty() && (list[0].is_array() || list[0].is_object()));
  if (!fragments) {
    std::vector<uint8_t> mask;
    for (const auto& v : list) mask.push_back(v.get<double>() != 0.0 ? 1 : 0);
    return mask;
  }
  std::vector<Fragment> frags;
  for (const auto& f : list) {
    if (f.is_array()) {
      frags.push_back({f.at(0).get<int64_t>(), f.at(1).get<int64_t>()});
    } else {
      frags.push_back({f.at("start_frame").get<int64_t>(), f.at("end_frame").get<int64_t>()});
    }
  }
  return FragmentMask(frags, frame_count);
}

std::vector<CropWindow> MachineWindows(const nlohmann::json& doc) {
  const auto trace = CropTraceFromJson(doc.is_object() ? doc.at("crop_trace") : doc);
  std::vector<CropWindow> windows;
  for (const auto& e : trace) windows.push_back(e.window);
  return windows;
}

int RunServe(const std::string& config_path, const std::string& listen,
             const std::string& data_dir, int workers) {
  ServiceConfig config = LoadConfigOrDefault(config_path);
  if (!listen.empty()) config.listen_addr = listen;
  if (!data_dir.empty()) config.data_dir = data_dir;
  if (workers > 0) config.workers = workers;
  const HostPort hp = ParseListenAddr(config.listen_addr);

  // Signals are taken synchronously by a watcher thread; every other thread
  // inherits the blocked mask.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  SummaryService service(config);
  service.Start();
  HttpApi api(service);
  const int port = api.Bind(hp.host, hp.port);
  std::cerr << "vsum: serving on " << hp.host << ":" << port << " (data in "
            << config.data_dir.string() << ", " << config.workers << " workers)\n";
  std::atomic<bool> signalled{false};
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    signalled = true;
    api.Stop();
  });
  api.Serve();
  if (!signalled) ::kill(::getpid(), SIGTERM);
  watcher.join();
  std::cerr << "vsum: shutting down\n";
  service.Stop();
  return 0;
}

struct SummarizeArgs {
  std::string input;
  std::string preset;
  double duration = 0.0;
  std::string aspect;
  std::string scores, saliency, shots;
  std::string output;
  std::string trace;
  std::string result;
  std::string config;
  bool keep_work = false;
  bool quiet = false;
};

int RunSummarize(const SummarizeArgs& a) {
  const ServiceConfig config = LoadConfigOrDefault(a.config);
  const PresetRegistry presets = config.presets_file.empty()
                                     ? PresetRegistry()
                                     : PresetRegistry(LoadPresets(config.presets_file));
  PipelineInput input;
  input.source = a.input;
  if (!a.preset.empty()) {
    if (a.duration > 0.0 || !a.aspect.empty()) {
      throw Error(ErrorCode::kInvalidSpec, "--preset excludes --duration/--aspect");
    }
    input.spec = SpecFromPreset(presets.Find(a.preset));
  } else {
    if (a.aspect.empty()) throw Error(ErrorCode::kInvalidSpec, "need --preset or --duration and --aspect");
    input.spec = MakeCustomSpec(a.duration, a.aspect);
  }
  input.sidecars = {a.scores, a.saliency, a.shots};

  fs::create_directories(config.transcoder.work_dir);
  std::string tmpl = (config.transcoder.work_dir / "summarize-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw Error(ErrorCode::kIoError, "cannot create work dir");
  const fs::path work_dir = tmpl;

  PipelineOptions options;
  options.limits = config.limits;
  PipelineHooks hooks;
  if (!a.quiet) {
    hooks.on_stage = [](JobState s) { std::cerr << "vsum: " << ToString(s) << "\n"; };
  }
  int status = 0;
  try {
    const PipelineResult result =
        RunPipeline(config.transcoder, input, work_dir, options, hooks);
    fs::copy_file(result.output, a.output, fs::copy_options::overwrite_existing);
    const nlohmann::json doc = ResultToJson(result, input.spec);
    if (!a.trace.empty()) WriteJsonFile(a.trace, doc.at("crop_trace"));
    if (!a.result.empty()) WriteJsonFile(a.result, doc);
    if (!a.quiet) {
      std::cerr << "vsum: wrote " << a.output << " (" << doc["summary_duration_sec"].get<double>()
                << " s of " << result.asset.duration << " s, " << result.output_width << "x"
                << result.output_height << ", " << result.fragments.size() << " fragments)\n";
    }
  } catch (...) {
    if (!a.keep_work) {
      std::error_code ec;
      fs::remove_all(work_dir, ec);
    }
    throw;
  }
  if (a.keep_work) {
    std::cerr << "vsum: intermediates kept in " << work_dir << "\n";
  } else {
    std::error_code ec;
    fs::remove_all(work_dir, ec);
  }
  return status;
}

int RunFScore(const std::vector<std::string>& annotations,
              const std::vector<std::string>& summaries, const std::string& mode_name,
              bool json) {
  if (annotations.size() != summaries.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "give one --summary per --annotations file, in the same order");
  }
  const Aggregation mode = ParseAggregation(mode_name);
  std::vector<FScoreRow> rows;
  for (size_t i = 0; i < annotations.size(); ++i) {
    const UserSummarySet users = UserSummariesFromJson(ReadJsonFile(annotations[i]));
    const auto machine = MachineMask(ReadJsonFile(summaries[i]), users.frame_count);
    rows.push_back({fs::path(summaries[i]).stem().string(),
                    FScoreProtocol(machine, users, mode)});
  }
  std::cout << (json ? FScoreTableJson(rows, mode).dump(1) + "\n"
                     : FScoreTableText(rows, mode));
  return 0;
}

int RunIou(const std::string& annotations, const std::string& trace, std::string label,
           bool json) {
  const CropAnnotationSet set = CropAnnotationsFromJson(ReadJsonFile(annotations));
  const auto machine = MachineWindows(ReadJsonFile(trace));
  if (label.empty()) label = fs::path(trace).stem().string();
  const IouReport report = MakeIouReport(machine, set);
  std::cout << (json ? IouTableJson(label, report).dump(1) + "\n" : IouTableText(label, report));
  return 0;
}

}  // namespace
}  // namespace vsum

int main(int argc, char** argv) {
  using namespace vsum;
  CLI::App app{"Video summarization and smart cropping"};
  app.require_subcommand(1);

  std::string config_path, listen, data_dir;
  int workers = 0;
  auto* serve = app.add_subcommand("serve", "Run the REST service");
  serve->add_option("-c,--config", config_path, "Config file (key = value)");
  serve->add_option("--listen", listen, "host:port, overrides listen_addr");
  serve->add_option("--data-dir", data_dir, "Overrides data_dir");
  serve->add_option("--workers", workers, "Overrides workers")->check(CLI::PositiveNumber);

  SummarizeArgs sa;
  auto* summarize = app.add_subcommand("summarize", "Summarize and crop one video");
  summarize->add_option("input", sa.input, "Video path or http(s) URL")->required();
  auto* preset_opt = summarize->add_option("--preset", sa.preset, "Platform preset id");
  auto* duration_opt =
      summarize->add_option("--duration", sa.duration, "Target duration in seconds");
  auto* aspect_opt = summarize->add_option("--aspect", sa.aspect, "Target aspect W:H");
  preset_opt->excludes(duration_opt)->excludes(aspect_opt);
  duration_opt->needs(aspect_opt);
  aspect_opt->needs(duration_opt);
  summarize->add_option("--scores", sa.scores, "Frame importance scores");
  summarize->add_option("--saliency", sa.saliency, "SALM file or PNG directory");
  summarize->add_option("--shots", sa.shots, "Shot list JSON");
  summarize->add_option("-o,--output", sa.output, "Output video")->required();
  summarize->add_option("--trace", sa.trace, "Write the crop trace JSON here");
  summarize->add_option("--result", sa.result, "Write the result document here");
  summarize->add_option("-c,--config", sa.config, "Config file with transcoder settings");
  summarize->add_flag("--keep-work", sa.keep_work, "Keep intermediate files");
  summarize->add_flag("-q,--quiet", sa.quiet, "No progress output");

  auto* evaluate = app.add_subcommand("evaluate", "Score summaries or crops against annotations");
  evaluate->require_subcommand(1);
  std::vector<std::string> f_annotations, f_summaries;
  std::string mode = "max";
  bool f_json = false;
  auto* fscore = evaluate->add_subcommand("fscore", "Keyframe F-score");
  fscore->add_option("-a,--annotations", f_annotations, "User summaries JSON")->required();
  fscore->add_option("-s,--summary", f_summaries, "Machine summary JSON")->required();
  fscore->add_option("--mode", mode, "max or mean")->check(CLI::IsMember({"max", "mean"}));
  fscore->add_flag("--json", f_json, "JSON report");

  std::string i_annotations, i_trace, i_label;
  bool i_json = false;
  auto* iou = evaluate->add_subcommand("iou", "Crop window IoU");
  iou->add_option("-a,--annotations", i_annotations, "Crop annotations JSON")->required();
  iou->add_option("-t,--trace", i_trace, "Crop trace or result JSON")->required();
  iou->add_option("--label", i_label, "Method name in the report");
  iou->add_flag("--json", i_json, "JSON report");

  std::string presets_config;
  auto* presets = app.add_subcommand("presets", "List platform presets");
  presets->add_option("-c,--config", presets_config, "Config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return RunServe(config_path, listen, data_dir, workers);
    if (*summarize) return RunSummarize(sa);
    if (*fscore) return RunFScore(f_annotations, f_summaries, mode, f_json);
    if (*iou) return RunIou(i_annotations, i_trace, i_label, i_json);
    if (*presets) {
      const ServiceConfig config = LoadConfigOrDefault(presets_config);
      const auto list =
          config.presets_file.empty() ? DefaultPresets() : LoadPresets(config.presets_file);
      for (const auto& p : list) {
        std::printf("%-18s %6.1f s  %-7s %s\n", p.id.c_str(), p.max_duration,
                    p.aspect.ToString().c_str(), p.label.c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "vsum: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
