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

#include "vsum/media_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "vsum/error.hpp"
#include "vsum/subprocess.hpp"

namespace vsum {
namespace {

std::string RandomHex(int bytes) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < bytes; ++i) {
    const auto b = static_cast<unsigned>(rng() & 0xff);
    out += kDigits[b >> 4];
    out += kDigits[b & 15];
  }
  return out;
}

std::string UrlExtension(const std::string& url) {
  std::string path = url.substr(0, url.find_first_of("?#"));
  const size_t slash = path.rfind('/');
  const size_t dot = path.rfind('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return "";
  std::string ext = path.substr(dot);
  if (ext.size() > 8) return "";
  return ext;
}

std::map<std::string, std::string> BaseVars(const TranscoderConfig& config) {
  return {{"transcoder", config.transcoder_path}};
}

std::optional<int64_t> ParseCount(const std::string& text) {
  int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0) return std::nullopt;
  return v;
}

int64_t CountFramesByDecode(const TranscoderConfig& config,
                            const std::filesystem::path& path, int width, int height) {
  auto vars = BaseVars(config);
  vars["input"] = path.string();
  Subprocess proc(ExpandCommandTemplate(config.decode_template, vars),
                  {.pipe_stdin = false, .pipe_stdout = true});
  const size_t frame_bytes = static_cast<size_t>(width) * height * 3;
  std::vector<uint8_t> buf(frame_bytes);
  int64_t frames = 0;
  for (;;) {
    const size_t got = proc.ReadFull(buf.data(), frame_bytes);
    if (got == frame_bytes) {
      ++frames;
    } else {
      if (got != 0) {
        throw Error(ErrorCode::kNotAVideo, "truncated frame while counting " + path.string());
      }
      break;
    }
  }
  if (proc.Wait() != 0) {
    throw Error(ErrorCode::kNotAVideo, path.string() + ": " + proc.StderrTail());
  }
  return frames;
}

}  // namespace

VideoAsset Probe(const TranscoderConfig& config, const std::string& source) {
  VideoAsset asset;
  asset.source = source;
  if (IsRemoteSource(source)) {
    std::filesystem::create_directories(config.work_dir);
    asset.local_path =
        config.work_dir / ("fetch-" + RandomHex(8) + UrlExtension(source));
    FetchUrl(source, asset.local_path, config.fetch_timeout_sec);
  } else {
    asset.local_path = source;
  }

  std::error_code ec;
  if (!std::filesystem::is_regular_file(asset.local_path, ec)) {
    throw Error(ErrorCode::kSourceUnreachable, "no such file: " + source);
  }
  if (std::filesystem::file_size(asset.local_path, ec) == 0) {
    throw Error(ErrorCode::kNotAVideo, "empty file: " + source);
  }
  asset.id = asset.local_path.stem().string();

  auto vars = BaseVars(config);
  vars["input"] = asset.local_path.string();
  Subprocess proc(ExpandCommandTemplate(config.probe_template, vars),
                  {.pipe_stdin = false, .pipe_stdout = true});
  const std::string report = proc.ReadAll();
  const int exit_code = proc.Wait();
  if (exit_code != 0) {
    throw Error(ErrorCode::kNotAVideo, source + ": " + proc.StderrTail());
  }

  std::optional<int64_t> count;
  bool have_rate = false;
  std::istringstream lines(report);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "width") {
      asset.width = static_cast<int>(ParseCount(value).value_or(0));
    } else if (key == "height") {
      asset.height = static_cast<int>(ParseCount(value).value_or(0));
    } else if ((key == "r_frame_rate" || key == "frame_rate") && !have_rate) {
      try {
        asset.frame_rate = Rational::Parse(value);
        have_rate = asset.frame_rate.num > 0;
      } catch (const Error&) {
      }
    } else if ((key == "nb_read_frames" || key == "nb_frames" || key == "frame_count") &&
               !count) {
      count = ParseCount(value);
    }
  }
  if (asset.width <= 0 || asset.height <= 0 || !have_rate) {
    throw Error(ErrorCode::kNotAVideo, source + ": probe reported no video stream");
  }
  asset.frame_count = count ? *count
                            : CountFramesByDecode(config, asset.local_path,
                                                  asset.width, asset.height);
  if (asset.frame_count <= 0) {
    throw Error(ErrorCode::kZeroFrames, source);
  }
  asset.duration = static_cast<double>(asset.frame_count) / asset.fps();
  return asset;
}

FrameReader::FrameReader(const TranscoderConfig& config, const VideoAsset& asset,
                         int64_t stride)
    : width_(asset.width),
      height_(asset.height),
      frame_count_(asset.frame_count),
      stride_(stride) {
  if (stride < 1) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  auto vars = BaseVars(config);
  vars["input"] = asset.local_path.string();
  proc_ = std::make_unique<Subprocess>(ExpandCommandTemplate(config.decode_template, vars),
                                       Subprocess::Options{.pipe_stdout = true});
  scratch_.resize(static_cast<size_t>(width_) * height_ * 3);
}

FrameReader::~FrameReader() = default;
FrameReader::FrameReader(FrameReader&&) noexcept = default;
FrameReader& FrameReader::operator=(FrameReader&&) noexcept = default;

std::optional<Frame> FrameReader::Next() {
  while (!done_) {
    if (frame_count_ > 0 && next_index_ >= frame_count_) {
      Close();
      return std::nullopt;
    }
    const int64_t index = next_index_;
    const size_t got = proc_->ReadFull(scratch_.data(), scratch_.size());
    if (got != scratch_.size()) {
      const std::string tail = proc_->StderrTail();
      const int code = proc_->Wait();
      done_ = true;
      proc_.reset();
      if (got == 0 && code == 0 && frame_count_ <= 0) return std::nullopt;
      throw Error(ErrorCode::kDecodeFailure,
                  "frame " + std::to_string(index) + " (exit " + std::to_string(code) +
                      (tail.empty() ? ")" : "): " + tail));
    }
    ++next_index_;
    if (index % stride_ != 0) continue;
    Frame frame;
    frame.index = index;
    frame.width = width_;
    frame.height = height_;
    frame.rgb = scratch_;
    return frame;
  }
  return std::nullopt;
}

void FrameReader::Close() {
  done_ = true;
  if (proc_) {
    proc_->CloseStdout();
    proc_->Kill();
    proc_->Wait();
    proc_.reset();
  }
}

std::vector<Frame> DecodeFrames(const TranscoderConfig& config, const VideoAsset& asset,
                                int64_t stride) {
  FrameReader reader(config, asset, stride);
  std::vector<Frame> frames;
  while (auto frame = reader.Next()) frames.push_back(std::move(*frame));
  return frames;
}

FrameWriter::FrameWriter(const TranscoderConfig& config,
                         const std::filesystem::path& output, int width, int height,
                         Rational fps)
    : frame_bytes_(static_cast<size_t>(width) * height * 3) {
  if (width <= 0 || height <= 0 || fps.num <= 0 || fps.den <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad encode geometry");
  }
  auto vars = BaseVars(config);
  vars["output"] = output.string();
  vars["width"] = std::to_string(width);
  vars["height"] = std::to_string(height);
  vars["fps"] = fps.ToString();
  proc_ = std::make_unique<Subprocess>(ExpandCommandTemplate(config.encode_template, vars),
                                       Subprocess::Options{.pipe_stdin = true});
}

FrameWriter::~FrameWriter() = default;

void FrameWriter::Write(std::span<const uint8_t> rgb) {
  if (finished_) throw Error(ErrorCode::kInvalidArgument, "writer already finished");
  if (rgb.size() != frame_bytes_) {
    throw Error(ErrorCode::kInvalidArgument, "frame size mismatch");
  }
  if (!proc_->WriteAll(rgb.data(), rgb.size())) {
    proc_->CloseStdin();
    const int code = proc_->Wait();
    finished_ = true;
    throw Error(ErrorCode::kTranscoderFailure,
                "exit " + std::to_string(code) + ": " + proc_->StderrTail());
  }
  ++frames_;
}

void FrameWriter::Finish() {
  if (finished_) return;
  finished_ = true;
  proc_->CloseStdin();
  const int code = proc_->Wait();
  if (code != 0) {
    throw Error(ErrorCode::kTranscoderFailure,
                "exit " + std::to_string(code) + ": " + proc_->StderrTail());
  }
}

CropWindow OutputDimensions(int crop_w, int crop_h, int max_width, int max_height) {
  if (crop_w < 2 || crop_h < 2 || max_width < 2 || max_height < 2) {
    throw Error(ErrorCode::kInvalidArgument, "output dimensions too small");
  }
  CropWindow out;
  if (crop_w <= max_width && crop_h <= max_height) {
    out.w = crop_w - (crop_w & 1);
    out.h = crop_h - (crop_h & 1);
    return out;
  }
  const double sx = static_cast<double>(max_width) / crop_w;
  const double sy = static_cast<double>(max_height) / crop_h;
  if (sx <= sy) {
    out.w = max_width - (max_width & 1);
    out.h = EvenFloor(static_cast<double>(out.w) * crop_h / crop_w);
  } else {
    out.h = max_height - (max_height & 1);
    out.w = EvenFloor(static_cast<double>(out.h) * crop_w / crop_h);
  }
  out.w = std::max(out.w, 2);
  out.h = std::max(out.h, 2);
  return out;
}

std::filesystem::path RenderSummary(const TranscoderConfig& config,
                                    const VideoAsset& asset,
                                    std::span<const Fragment> fragments,
                                    std::span<const CropWindow> crops,
                                    const OutputSpec& output, const ProgressFn& progress) {
  if (fragments.empty()) throw Error(ErrorCode::kEmptySelection, "no fragments");
  int64_t total = 0;
  for (size_t i = 0; i < fragments.size(); ++i) {
    const Fragment& f = fragments[i];
    if (f.start_frame < 0 || f.end_frame < f.start_frame ||
        f.end_frame >= asset.frame_count) {
      throw Error(ErrorCode::kInvalidArgument, "fragment outside the video");
    }
    if (i > 0 && f.start_frame <= fragments[i - 1].end_frame) {
      throw Error(ErrorCode::kInvalidArgument, "fragments overlap or are out of order");
    }
    total += f.length();
  }
  if (static_cast<int64_t>(crops.size()) != total) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(total) + " crop windows, got " +
                    std::to_string(crops.size()));
  }
  for (const CropWindow& c : crops) {
    if (c.w != crops[0].w || c.h != crops[0].h) {
      throw Error(ErrorCode::kInvalidArgument, "crop windows differ in size");
    }
    if (!FitsFrame(c, asset.width, asset.height)) {
      throw Error(ErrorCode::kInvalidArgument, "crop window outside frame");
    }
  }

  const CropWindow dims =
      OutputDimensions(crops[0].w, crops[0].h, output.max_width, output.max_height);
  if (!output.output.parent_path().empty()) {
    std::filesystem::create_directories(output.output.parent_path());
  }

  try {
    FrameWriter writer(config, output.output, dims.w, dims.h, asset.frame_rate);
    FrameReader reader(config, asset);
    std::vector<uint8_t> out;
    size_t frag = 0;
    int64_t written = 0;
    while (frag < fragments.size()) {
      auto frame = reader.Next();
      if (!frame) {
        throw Error(ErrorCode::kDecodeFailure,
                    "video ended before frame " + std::to_string(fragments[frag].start_frame));
      }
      if (frame->index < fragments[frag].start_frame) continue;
      CropResize(*frame, crops[static_cast<size_t>(written)], dims.w, dims.h, out);
      writer.Write(out);
      ++written;
      if (progress) progress(static_cast<double>(written) / static_cast<double>(total));
      if (frame->index == fragments[frag].end_frame) ++frag;
    }
    reader.Close();
    writer.Finish();
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(output.output, ec);
    throw;
  }
  return output.output;
}

}  // namespace vsum
