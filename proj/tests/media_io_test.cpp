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

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "media_fixtures.hpp"
#include "synthetic.hpp"
#include "vsum/error.hpp"
#include "vsum/internal/httplib.hpp"
#include "vsum/media_io.hpp"
#include "vsum/subprocess.hpp"

namespace vsum {
namespace {

using ::vsum::testing::TempDir;

constexpr int kWmBits = 12;
constexpr int kWmCell = 8;

// Gradient plus noise plus a frame-index watermark in the top-left corner.
Frame TexturedFrame(int64_t index, int w, int h) {
  Frame f(index, w, h);
  std::mt19937 rng(static_cast<uint32_t>(index) * 7919u + 1u);
  std::uniform_int_distribution<int> noise(-12, 12);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t* p = f.pixel(x, y);
      p[0] = static_cast<uint8_t>(std::clamp(x * 255 / w + noise(rng), 0, 255));
      p[1] = static_cast<uint8_t>(std::clamp(y * 255 / h + noise(rng), 0, 255));
      p[2] = static_cast<uint8_t>((x + y + index * 5) % 256);
    }
  }
  testing::DrawWatermark(f, static_cast<uint32_t>(index), kWmBits, 0, 0, kWmCell);
  return f;
}

Frame FlatFrame(int64_t index, int w, int h) {
  return testing::SolidFrame(index, w, h, 80, 120, 160);
}

int64_t CountByFullDecode(const TranscoderConfig& config, const VideoAsset& asset) {
  FrameReader reader(config, asset);
  int64_t n = 0;
  while (reader.Next()) ++n;
  return n;
}

class TenSecondClip : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    config_ = new TranscoderConfig(testing::TestTranscoder(dir_->path()));
    path_ = new std::filesystem::path(*dir_ / "ten.y4m");
    testing::WriteClip(*config_, *path_, 1280, 720, {25, 1}, 250,
                       [](int64_t i) { return FlatFrame(i, 1280, 720); });
  }
  static void TearDownTestSuite() {
    delete path_;
    delete config_;
    delete dir_;
  }

  static TempDir* dir_;
  static TranscoderConfig* config_;
  static std::filesystem::path* path_;
};

TempDir* TenSecondClip::dir_ = nullptr;
TranscoderConfig* TenSecondClip::config_ = nullptr;
std::filesystem::path* TenSecondClip::path_ = nullptr;

TEST(CommandTemplateTest, SplitsAndSubstitutes) {
  const auto argv = ExpandCommandTemplate(
      "{transcoder} -i {input} -s {width}x{height} 'two words' \"{output}\"",
      {{"transcoder", "/opt/t"}, {"input", "a b.mp4"}, {"width", "640"},
       {"height", "360"}, {"output", "o.mp4"}});
  EXPECT_EQ(argv, (std::vector<std::string>{"/opt/t", "-i", "a b.mp4", "-s", "640x360",
                                            "two words", "o.mp4"}));
}

TEST(CommandTemplateTest, RejectsUnknownPlaceholder) {
  try {
    ExpandCommandTemplate("{transcoder} {nope}", {{"transcoder", "t"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(ExpandCommandTemplate("a 'b", {}), Error);
  EXPECT_THROW(ExpandCommandTemplate("   ", {}), Error);
}

TEST(RationalTest, Parses) {
  EXPECT_EQ(Rational::Parse("30000/1001"), (Rational{30000, 1001}));
  EXPECT_EQ(Rational::Parse("50/2"), (Rational{25, 1}));
  EXPECT_EQ(Rational::Parse("25"), (Rational{25, 1}));
  EXPECT_EQ(Rational::Parse("29.97"), (Rational{2997, 100}));
  EXPECT_THROW(Rational::Parse("1/0"), Error);
  EXPECT_THROW(Rational::Parse("abc"), Error);
}

TEST(SubprocessTest, CapturesExitCodeAndStderr) {
  Subprocess proc({"sh", "-c", "echo out; echo boom >&2; exit 3"},
                  {.pipe_stdin = false, .pipe_stdout = true});
  EXPECT_EQ(proc.ReadAll(), "out\n");
  EXPECT_EQ(proc.Wait(), 3);
  EXPECT_EQ(proc.StderrTail(), "boom");
}

TEST(SubprocessTest, MissingProgramIsTranscoderFailure) {
  try {
    Subprocess proc({"/nonexistent/vsum-tool"}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTranscoderFailure);
  }
}

TEST_F(TenSecondClip, ProbeReportsFrameCountAndDuration) {
  const VideoAsset asset = Probe(*config_, path_->string());
  EXPECT_EQ(asset.width, 1280);
  EXPECT_EQ(asset.height, 720);
  EXPECT_EQ(asset.frame_rate, (Rational{25, 1}));
  EXPECT_EQ(asset.frame_count, 250);
  EXPECT_DOUBLE_EQ(asset.duration, 10.0);
  EXPECT_EQ(CountByFullDecode(*config_, asset), 250);
}

TEST_F(TenSecondClip, ProbeWithoutFrameCountFallsBackToDecode) {
  TranscoderConfig config = *config_;
  config.probe_template = "sh -c '\"$0\" probe \"$1\" | grep -v nb_frames' {transcoder} {input}";
  const VideoAsset asset = Probe(config, path_->string());
  EXPECT_EQ(asset.frame_count, 250);
}

TEST_F(TenSecondClip, StrideSelectsEveryNthFrame) {
  const VideoAsset asset = Probe(*config_, path_->string());
  for (const auto& [stride, expected] :
       std::vector<std::pair<int64_t, int64_t>>{{1, 250}, {250, 1}, {7, 36}}) {
    FrameReader reader(*config_, asset, stride);
    int64_t n = 0;
    while (auto frame = reader.Next()) {
      EXPECT_EQ(frame->index, n * stride);
      EXPECT_EQ(frame->width, 1280);
      EXPECT_EQ(frame->height, 720);
      ++n;
    }
    EXPECT_EQ(n, expected) << "stride " << stride;
    EXPECT_EQ(n, (250 + stride - 1) / stride);
  }
}

TEST(ProbeTest, OneFrameVideo) {
  TempDir dir;
  const auto config = testing::TestTranscoder(dir.path());
  testing::WriteClip(config, dir / "one.y4m", 64, 48, {30, 1}, 1,
                     [](int64_t i) { return FlatFrame(i, 64, 48); });
  const VideoAsset asset = Probe(config, (dir / "one.y4m").string());
  EXPECT_EQ(asset.frame_count, 1);
  EXPECT_DOUBLE_EQ(asset.duration, 1.0 / 30.0);
}

TEST(ProbeTest, DegenerateSources) {
  TempDir dir;
  const auto config = testing::TestTranscoder(dir.path());
  auto expect_code = [&](const std::string& source, ErrorCode code) {
    try {
      Probe(config, source);
      ADD_FAILURE() << "no error for " << source;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << source << ": " << e.what();
    }
  };
  std::ofstream(dir / "empty.y4m").close();
  expect_code((dir / "empty.y4m").string(), ErrorCode::kNotAVideo);
  std::ofstream(dir / "text.y4m") << "hello, not a video\n";
  expect_code((dir / "text.y4m").string(), ErrorCode::kNotAVideo);
  expect_code((dir / "missing.y4m").string(), ErrorCode::kSourceUnreachable);
  testing::WriteClip(config, dir / "zero.y4m", 16, 16, {25, 1}, 0,
                     [](int64_t i) { return FlatFrame(i, 16, 16); });
  expect_code((dir / "zero.y4m").string(), ErrorCode::kZeroFrames);
}

TEST(DecodeTest, TruncatedStreamReportsFrameIndex) {
  TempDir dir;
  const auto config = testing::TestTranscoder(dir.path());
  const auto path = dir / "cut.y4m";
  testing::WriteClip(config, path, 32, 32, {25, 1}, 10,
                     [](int64_t i) { return FlatFrame(i, 32, 32); });
  const VideoAsset asset = Probe(config, path.string());
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 1000);
  FrameReader reader(config, asset);
  int64_t got = 0;
  try {
    while (reader.Next()) ++got;
    FAIL() << "expected DecodeFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecodeFailure);
    EXPECT_NE(std::string(e.what()).find("frame 9"), std::string::npos) << e.what();
  }
  EXPECT_EQ(got, 9);
}

TEST(OutputDimensionsTest, KeepsEvenSizeAndNeverUpscales) {
  EXPECT_EQ(OutputDimensions(606, 1080, 1920, 1920), (CropWindow{0, 0, 606, 1080}));
  EXPECT_EQ(OutputDimensions(607, 1081, 1920, 1920), (CropWindow{0, 0, 606, 1080}));
  const CropWindow scaled = OutputDimensions(1920, 1080, 1280, 1280);
  EXPECT_EQ(scaled, (CropWindow{0, 0, 1280, 720}));
  const CropWindow tall = OutputDimensions(1080, 1920, 1920, 1280);
  EXPECT_EQ(tall.h, 1280);
  EXPECT_EQ(tall.w, 720);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(2, 4000);
  for (int i = 0; i < 2000; ++i) {
    const int cw = d(rng), ch = d(rng), mw = d(rng), mh = d(rng);
    const CropWindow o = OutputDimensions(cw, ch, mw, mh);
    EXPECT_EQ(o.w % 2, 0);
    EXPECT_EQ(o.h % 2, 0);
    EXPECT_LE(o.w, std::max(2, cw));
    EXPECT_LE(o.h, std::max(2, ch));
    EXPECT_LE(o.w, std::max(2, mw));
    EXPECT_LE(o.h, std::max(2, mh));
  }
}

class RenderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = testing::TestTranscoder(dir_.path());
    source_ = dir_ / "src.y4m";
    testing::WriteClip(config_, source_, kW, kH, {25, 1}, 200,
                       [](int64_t i) { return TexturedFrame(i, kW, kH); });
    asset_ = Probe(config_, source_.string());
  }

  std::vector<CropWindow> Identity(int64_t n) const {
    return std::vector<CropWindow>(static_cast<size_t>(n), CropWindow{0, 0, kW, kH});
  }

  static constexpr int kW = 160;
  static constexpr int kH = 96;
  TempDir dir_;
  TranscoderConfig config_;
  std::filesystem::path source_;
  VideoAsset asset_;
};

TEST_F(RenderTest, DurationMatchesFragmentLengths) {
  const std::vector<Fragment> fragments{{0, 49}, {100, 149}};
  std::vector<double> progress;
  const auto out = RenderSummary(config_, asset_, fragments, Identity(100),
                                 {dir_ / "out.y4m"},
                                 [&](double p) { progress.push_back(p); });
  const VideoAsset rendered = Probe(config_, out.string());
  EXPECT_NEAR(rendered.duration, 4.0, 0.04);
  EXPECT_EQ(CountByFullDecode(config_, rendered), 100);
  ASSERT_FALSE(progress.empty());
  EXPECT_TRUE(std::is_sorted(progress.begin(), progress.end()));
  EXPECT_DOUBLE_EQ(progress.back(), 1.0);
}

TEST_F(RenderTest, EmptySelection) {
  try {
    RenderSummary(config_, asset_, {}, {}, {dir_ / "none.y4m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySelection);
  }
}

TEST_F(RenderTest, IdentityCropPreservesPixels) {
  const std::vector<Fragment> fragments{{20, 59}};
  const auto out =
      RenderSummary(config_, asset_, fragments, Identity(40), {dir_ / "id.y4m"});
  const VideoAsset rendered = Probe(config_, out.string());
  const auto source_frames = DecodeFrames(config_, asset_);
  const auto output_frames = DecodeFrames(config_, rendered);
  ASSERT_EQ(output_frames.size(), 40u);
  double worst = 1e9;
  for (size_t k = 0; k < output_frames.size(); ++k) {
    worst = std::min(worst, testing::Psnr(output_frames[k], source_frames[20 + k]));
  }
  EXPECT_GE(worst, 40.0);
}

TEST_F(RenderTest, OutputIsChronological) {
  const std::vector<Fragment> fragments{{5, 14}, {40, 41}, {90, 129}, {180, 199}};
  const int64_t total = TotalFrames(fragments);
  std::vector<CropWindow> crops;
  for (int64_t i = 0; i < total; ++i) crops.push_back({0, static_cast<int>(i % 2) * 2, 120, 64});
  const auto out = RenderSummary(config_, asset_, fragments, crops, {dir_ / "wm.y4m"});
  const VideoAsset rendered = Probe(config_, out.string());
  EXPECT_EQ(rendered.width, 120);
  EXPECT_EQ(rendered.height, 64);
  std::vector<int64_t> expected;
  for (const Fragment& f : fragments) {
    for (int64_t i = f.start_frame; i <= f.end_frame; ++i) expected.push_back(i);
  }
  FrameReader reader(config_, rendered);
  std::vector<int64_t> seen;
  while (auto frame = reader.Next()) {
    seen.push_back(testing::ReadWatermark(*frame, kWmBits, 0, 0, kWmCell));
  }
  EXPECT_EQ(seen, expected);
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
}

TEST_F(RenderTest, ScalesDownToOutputBounds) {
  const std::vector<Fragment> fragments{{0, 9}};
  const auto out = RenderSummary(config_, asset_, fragments, Identity(10),
                                 {dir_ / "small.y4m", 80, 80});
  const VideoAsset rendered = Probe(config_, out.string());
  EXPECT_EQ(rendered.width, 80);
  EXPECT_EQ(rendered.height, 48);
}

TEST_F(RenderTest, RejectsBadCropsAndFragments) {
  const std::vector<Fragment> fragments{{0, 9}};
  EXPECT_THROW(RenderSummary(config_, asset_, fragments, Identity(9), {dir_ / "a.y4m"}),
               Error);
  std::vector<CropWindow> mixed = Identity(10);
  mixed[3] = {0, 0, 80, 48};
  EXPECT_THROW(RenderSummary(config_, asset_, fragments, mixed, {dir_ / "b.y4m"}), Error);
  const std::vector<Fragment> overlapping{{0, 9}, {5, 14}};
  EXPECT_THROW(RenderSummary(config_, asset_, overlapping, Identity(20), {dir_ / "c.y4m"}),
               Error);
  const std::vector<Fragment> beyond{{190, 200}};
  EXPECT_THROW(RenderSummary(config_, asset_, beyond, Identity(11), {dir_ / "d.y4m"}),
               Error);
  EXPECT_FALSE(std::filesystem::exists(dir_ / "a.y4m"));
}

TEST_F(RenderTest, EncoderFailureCarriesExitCodeAndStderr) {
  TranscoderConfig broken = config_;
  broken.encode_template = "sh -c 'cat > /dev/null; echo encoder exploded >&2; exit 7'";
  try {
    RenderSummary(broken, asset_, std::vector<Fragment>{{0, 4}}, Identity(5),
                  {dir_ / "x.y4m"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTranscoderFailure);
    EXPECT_NE(std::string(e.what()).find("exit 7"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("encoder exploded"), std::string::npos);
  }
}

class FetchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = testing::TestTranscoder(dir_ / "work");
    testing::WriteClip(config_, dir_ / "clip.y4m", 32, 32, {25, 1}, 12,
                       [](int64_t i) { return FlatFrame(i, 32, 32); });
    std::ifstream in(dir_ / "clip.y4m", std::ios::binary);
    body_.assign(std::istreambuf_iterator<char>(in), {});
    server_.Get("/clip.y4m", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(body_, "video/x-yuv4mpeg");
    });
    server_.Get("/moved", [](const httplib::Request&, httplib::Response& res) {
      res.set_redirect("/clip.y4m");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  std::string Url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  TempDir dir_;
  TranscoderConfig config_;
  std::string body_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(FetchTest, ProbesRemoteClip) {
  const VideoAsset asset = Probe(config_, Url("/clip.y4m"));
  EXPECT_EQ(asset.frame_count, 12);
  EXPECT_EQ(asset.source, Url("/clip.y4m"));
  EXPECT_TRUE(asset.local_path.string().starts_with((dir_ / "work").string()));
  EXPECT_EQ(Probe(config_, Url("/moved")).frame_count, 12);
}

TEST_F(FetchTest, FailuresAreTyped) {
  auto code_of = [&](const std::string& url) {
    try {
      Probe(config_, url);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code_of(Url("/missing.mp4")), ErrorCode::kSourceUnreachable);
  EXPECT_EQ(code_of("http://127.0.0.1:1/clip.mp4"), ErrorCode::kSourceUnreachable);
  EXPECT_EQ(code_of("ftp://127.0.0.1/clip.mp4"), ErrorCode::kUnsupportedSource);
}

}  // namespace
}  // namespace vsum
