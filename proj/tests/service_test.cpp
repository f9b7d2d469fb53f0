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

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "clips.hpp"
#include "vsum/error.hpp"
#include "vsum/service.hpp"

namespace vsum {
namespace {

using ::vsum::testing::TempDir;
using namespace std::chrono_literals;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_.data_dir = dir_ / "data";
    config_.workers = 2;
    config_.transcoder = testing::TestTranscoder(dir_ / "tmp");
  }

  std::filesystem::path Clip(int clip_id, std::vector<int64_t> shots = {40, 35, 45}) {
    const auto path = dir_ / ("clip" + std::to_string(clip_id) + ".y4m");
    testing::WriteShotClip(config_.transcoder, path, 128, 72, {25, 1}, shots, clip_id);
    return path;
  }

  static JobRequest Request(const std::filesystem::path& source, std::string preset) {
    JobRequest r;
    r.source = source.string();
    r.preset = std::move(preset);
    return r;
  }

  TempDir dir_;
  ServiceConfig config_;
};

TEST_F(ServiceTest, SubmitValidatesSpecAndSource) {
  SummaryService service(config_);
  const auto clip = Clip(1);
  EXPECT_EQ(CodeOf([&] { service.Submit(Request(clip, "nonexistent")); }),
            ErrorCode::kUnknownPreset);
  JobRequest negative;
  negative.source = clip.string();
  negative.custom = CustomSpecRequest{-5.0, "9:16"};
  EXPECT_EQ(CodeOf([&] { service.Submit(negative); }), ErrorCode::kInvalidSpec);
  negative.custom = CustomSpecRequest{5.0, "abc"};
  EXPECT_EQ(CodeOf([&] { service.Submit(negative); }), ErrorCode::kInvalidSpec);
  JobRequest none;
  none.source = clip.string();
  EXPECT_EQ(CodeOf([&] { service.Submit(none); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(CodeOf([&] { service.Submit(Request("ftp://host/a.mp4", "facebook-feed")); }),
            ErrorCode::kUnsupportedSource);
  EXPECT_EQ(CodeOf([&] { service.Get("deadbeef"); }), ErrorCode::kNotFound);
  EXPECT_TRUE(service.List().empty());
}

TEST_F(ServiceTest, StoryPresetResolvesToTwentySecondsPortrait) {
  SummaryService service(config_);
  const std::string id = service.Submit(Request(Clip(1), "instagram-story"));
  const SummaryJob job = service.Get(id);
  EXPECT_EQ(job.state, JobState::kQueued);
  EXPECT_DOUBLE_EQ(job.progress, 0.0);
  EXPECT_DOUBLE_EQ(job.spec.target_duration, 20.0);
  EXPECT_EQ(job.spec.aspect, AspectRatio::Make(9, 16));
  EXPECT_EQ(job.spec.origin, "instagram-story");
  EXPECT_EQ(CodeOf([&] { service.Result(id); }), ErrorCode::kNotReady);
}

TEST_F(ServiceTest, ConcurrentJobsAreIsolated) {
  std::vector<std::filesystem::path> clips;
  for (int c = 1; c <= 4; ++c) clips.push_back(Clip(c, {30 + 5 * c, 40, 30}));
  SummaryService service(config_);
  service.Start();
  std::map<std::string, int> owner;
  for (int c = 1; c <= 4; ++c) {
    JobRequest r;
    r.source = clips[c - 1].string();
    r.custom = CustomSpecRequest{3.0, "16:9"};
    owner[service.Submit(r)] = c;
  }

  // Poll while they run: progress never goes backwards.
  std::map<std::string, double> last;
  bool all_terminal = false;
  const auto deadline = std::chrono::steady_clock::now() + 120s;
  while (!all_terminal && std::chrono::steady_clock::now() < deadline) {
    all_terminal = true;
    for (const auto& [id, c] : owner) {
      const SummaryJob job = service.Get(id);
      EXPECT_GE(job.progress, last[id]);
      last[id] = job.progress;
      all_terminal = all_terminal && IsTerminal(job.state);
    }
    std::this_thread::sleep_for(20ms);
  }
  ASSERT_TRUE(all_terminal);

  for (const auto& [id, c] : owner) {
    const SummaryJob job = service.Get(id);
    ASSERT_EQ(job.state, JobState::kDone) << job.error;
    EXPECT_DOUBLE_EQ(job.progress, 1.0);
    EXPECT_TRUE(IsCanonicalSequence(job.history));
    EXPECT_EQ(job.history.back(), JobState::kDone);
    const nlohmann::json result = service.Result(id);
    EXPECT_LE(result["summary_duration_sec"].get<double>(), 3.0);

    const VideoAsset out = Probe(config_.transcoder, service.DownloadPath(id).string());
    FrameReader reader(config_.transcoder, out);
    int64_t frames = 0;
    while (auto f = reader.Next()) {
      const uint32_t wm =
          testing::ReadWatermark(*f, testing::kClipWmBits, 0, 0, testing::kClipWmCell);
      EXPECT_EQ(static_cast<int>(wm >> 11), c) << "job " << id << " frame " << frames;
      ++frames;
    }
    EXPECT_EQ(frames, result["summary_frames"].get<int64_t>());
  }
}

TEST_F(ServiceTest, DoneJobsSurviveRestart) {
  std::string id;
  {
    SummaryService service(config_);
    service.Start();
    id = service.Submit(Request(Clip(2), "facebook-story"));
    const auto job = service.WaitForTerminal(id, 60s);
    ASSERT_TRUE(job);
    ASSERT_EQ(job->state, JobState::kDone) << job->error;
  }
  SummaryService restarted(config_);
  const SummaryJob job = restarted.Get(id);
  EXPECT_EQ(job.state, JobState::kDone);
  EXPECT_DOUBLE_EQ(job.progress, 1.0);
  EXPECT_TRUE(IsCanonicalSequence(job.history));
  EXPECT_NO_THROW(restarted.Result(id));
  EXPECT_TRUE(std::filesystem::exists(restarted.DownloadPath(id)));
}

TEST_F(ServiceTest, JobsCaughtMidRunRestartFromQueued) {
  std::string id;
  {
    SummaryService service(config_);
    id = service.Submit(Request(Clip(3), "facebook-feed"));
  }
  // Simulate a crash while the job was rendering.
  const auto doc_path = config_.data_dir / "jobs" / id / "job.json";
  nlohmann::json doc;
  {
    std::ifstream in(doc_path);
    in >> doc;
  }
  doc["state"] = doc["stage"] = "rendering";
  doc["progress"] = 0.8;
  doc["history"] = {"queued", "fetching", "probing", "segmenting", "scoring",
                    "selecting", "saliency", "cropping", "rendering"};
  std::ofstream(doc_path) << doc.dump();
  std::ofstream(config_.data_dir / "jobs" / id / "work" / "partial.bin") << "junk";

  SummaryService restarted(config_);
  SummaryJob job = restarted.Get(id);
  EXPECT_EQ(job.state, JobState::kQueued);
  EXPECT_DOUBLE_EQ(job.progress, 0.0);
  EXPECT_FALSE(std::filesystem::exists(config_.data_dir / "jobs" / id / "work" / "partial.bin"));
  restarted.Start();
  const auto done = restarted.WaitForTerminal(id, 60s);
  ASSERT_TRUE(done);
  EXPECT_EQ(done->state, JobState::kDone) << done->error;
  EXPECT_TRUE(IsCanonicalSequence(done->history));
}

TEST_F(ServiceTest, StopRequeuesRunningJobs) {
  const auto clip = Clip(4, {200, 200, 200});
  std::string id;
  {
    SummaryService service(config_);
    service.Start();
    id = service.Submit(Request(clip, "facebook-feed"));
    const auto deadline = std::chrono::steady_clock::now() + 30s;
    while (service.Get(id).state == JobState::kQueued &&
           std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(1ms);
    }
    service.Stop();
    const SummaryJob job = service.Get(id);
    EXPECT_TRUE(job.state == JobState::kQueued || job.state == JobState::kDone);
  }
  SummaryService restarted(config_);
  const SummaryJob job = restarted.Get(id);
  EXPECT_TRUE(job.state == JobState::kQueued || job.state == JobState::kDone);
  EXPECT_TRUE(IsCanonicalSequence(job.history));
}

TEST_F(ServiceTest, FailedJobRecordsStageAndError) {
  SummaryService service(config_);
  service.Start();
  JobRequest r;
  r.source = Clip(5).string();
  r.custom = CustomSpecRequest{0.2, "9:16"};
  const std::string id = service.Submit(r);
  const auto job = service.WaitForTerminal(id, 60s);
  ASSERT_TRUE(job);
  EXPECT_EQ(job->state, JobState::kFailed);
  EXPECT_EQ(job->stage, JobState::kSelecting);
  EXPECT_NE(job->error.find("EmptySelection"), std::string::npos) << job->error;
  EXPECT_TRUE(IsCanonicalSequence(job->history));
  EXPECT_EQ(CodeOf([&] { service.Result(id); }), ErrorCode::kNotReady);
  const nlohmann::json status = job->StatusJson();
  EXPECT_EQ(status["state"], "failed");
  EXPECT_EQ(status["stage"], "selecting");
}

TEST_F(ServiceTest, DeleteCancelsQueuedJobAndPurges) {
  SummaryService service(config_);
  const std::string id = service.Submit(Request(Clip(6), "facebook-feed"));
  const SummaryJob job = service.Delete(id);
  EXPECT_EQ(job.state, JobState::kFailed);
  EXPECT_EQ(job.error, "cancelled");
  EXPECT_TRUE(job.purged);
  EXPECT_FALSE(std::filesystem::exists(config_.data_dir / "jobs" / id / "work"));
  EXPECT_EQ(service.Get(id).state, JobState::kFailed);
  EXPECT_EQ(CodeOf([&] { service.Delete("nope"); }), ErrorCode::kNotFound);
}

TEST_F(ServiceTest, DeleteCancelsRunningJob) {
  const auto clip = Clip(7, {300, 300});
  SummaryService service(config_);
  service.Start();
  const std::string id = service.Submit(Request(clip, "facebook-feed"));
  while (service.Get(id).state == JobState::kQueued) std::this_thread::sleep_for(1ms);
  const SummaryJob job = service.Delete(id);
  EXPECT_TRUE(IsTerminal(job.state));
  EXPECT_TRUE(job.purged);
  EXPECT_TRUE(IsCanonicalSequence(job.history));
}

TEST_F(ServiceTest, TtlPurgeKeepsRecordButGoesGone) {
  SummaryService service(config_);
  service.Start();
  const std::string id = service.Submit(Request(Clip(8), "facebook-feed"));
  ASSERT_EQ(service.WaitForTerminal(id, 60s)->state, JobState::kDone);
  EXPECT_EQ(service.PurgeExpired(UnixNow()), 0);
  EXPECT_EQ(service.PurgeExpired(UnixNow() + 25 * 3600.0), 1);
  const SummaryJob job = service.Get(id);
  EXPECT_EQ(job.state, JobState::kDone);
  EXPECT_TRUE(job.purged);
  EXPECT_EQ(CodeOf([&] { service.Result(id); }), ErrorCode::kGone);
  EXPECT_EQ(CodeOf([&] { service.DownloadPath(id); }), ErrorCode::kGone);
  EXPECT_FALSE(std::filesystem::exists(config_.data_dir / "jobs" / id / "work"));
}

TEST_F(ServiceTest, WorkersServeFifo) {
  config_.workers = 1;
  std::vector<std::filesystem::path> clips{Clip(9), Clip(10), Clip(11)};
  SummaryService service(config_);
  std::vector<std::string> ids;
  for (const auto& c : clips) ids.push_back(service.Submit(Request(c, "facebook-feed")));
  service.Start();
  for (const auto& id : ids) ASSERT_EQ(service.WaitForTerminal(id, 60s)->state, JobState::kDone);
  // With one worker, each job finishes before the next one starts.
  for (size_t i = 1; i < ids.size(); ++i) {
    EXPECT_LE(service.Get(ids[i - 1]).updated, service.Get(ids[i]).updated);
  }
}

TEST(ServiceConfigTest, ParsesKeyValueFile) {
  const ServiceConfig c = ParseServiceConfig(
      "# comment\n"
      "listen_addr = 0.0.0.0:9000\n"
      "data_dir=/var/lib/vsum\n"
      "workers = 4\n"
      "ttl_hours = 12.5\n"
      "max_upload_bytes = 1048576\n"
      "transcoder_path = /usr/bin/ffmpeg\n"
      "encode_template = {transcoder} -f rawvideo -i - {output}\n"
      "fetch_timeout_sec = 5\n");
  EXPECT_EQ(c.listen_addr, "0.0.0.0:9000");
  EXPECT_EQ(c.data_dir, "/var/lib/vsum");
  EXPECT_EQ(c.workers, 4);
  EXPECT_DOUBLE_EQ(c.ttl_hours, 12.5);
  EXPECT_EQ(c.max_upload_bytes, 1048576);
  EXPECT_EQ(c.transcoder.transcoder_path, "/usr/bin/ffmpeg");
  EXPECT_EQ(c.transcoder.encode_template, "{transcoder} -f rawvideo -i - {output}");
  EXPECT_EQ(c.transcoder.fetch_timeout_sec, 5);

  const ServiceConfig d = ParseServiceConfig("");
  EXPECT_EQ(d.workers, 2);
  EXPECT_DOUBLE_EQ(d.ttl_hours, 24.0);

  EXPECT_THROW(ParseServiceConfig("colour = blue\n"), Error);
  EXPECT_THROW(ParseServiceConfig("workers = many\n"), Error);
  EXPECT_THROW(ParseServiceConfig("workers = 0\n"), Error);
  EXPECT_THROW(ParseServiceConfig("listen_addr = nohost\n"), Error);
  EXPECT_THROW(ParseServiceConfig("just words\n"), Error);
}

TEST(ServiceConfigTest, ListenAddr) {
  EXPECT_EQ(ParseListenAddr("127.0.0.1:8080").port, 8080);
  EXPECT_EQ(ParseListenAddr("[::1]:80").host, "::1");
  EXPECT_THROW(ParseListenAddr("host:99999"), Error);
}

TEST(PresetsTest, DefaultsAndJson) {
  const PresetRegistry reg;
  EXPECT_DOUBLE_EQ(reg.Find("facebook-feed").max_duration, 120.0);
  EXPECT_EQ(reg.Find("facebook-feed").aspect, AspectRatio::Make(16, 9));
  EXPECT_DOUBLE_EQ(reg.Find("instagram-story").max_duration, 20.0);
  EXPECT_EQ(reg.Find("instagram-story").aspect, AspectRatio::Make(9, 16));
  EXPECT_DOUBLE_EQ(reg.Find("facebook-story").max_duration, 20.0);
  EXPECT_EQ(reg.Find("facebook-story").aspect, AspectRatio::Make(9, 16));
  EXPECT_THROW(reg.Find("nonexistent"), Error);

  const auto round = PresetsFromJson(PresetsToJson(DefaultPresets()));
  ASSERT_EQ(round.size(), 3u);
  EXPECT_EQ(round[1].id, "instagram-story");
  EXPECT_THROW(PresetsFromJson(nlohmann::json::parse(
                   R"([{"id":"x","max_duration_sec":0,"aspect":"1:1"}])")),
               Error);
  EXPECT_THROW(PresetsFromJson(nlohmann::json::parse(
                   R"([{"id":"x","max_duration_sec":5,"aspect":"1:1"},
                       {"id":"x","max_duration_sec":6,"aspect":"1:1"}])")),
               Error);
}

TEST(JobDocumentTest, RoundTrips) {
  SummaryJob job;
  job.id = "abc";
  job.spec = MakeCustomSpec(7.5, "4:5");
  job.source = "/tmp/a.mp4";
  job.state = job.stage = JobState::kScoring;
  job.history = {JobState::kQueued, JobState::kFetching, JobState::kScoring};
  job.progress = 0.4;
  job.result = nlohmann::json{{"k", 1}};
  const SummaryJob back = SummaryJob::FromJson(job.ToJson());
  EXPECT_EQ(back.ToJson(), job.ToJson());
}

}  // namespace
}  // namespace vsum
