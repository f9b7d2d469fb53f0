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

#ifndef VSUM_MEDIA_IO_HPP_
#define VSUM_MEDIA_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsum/geometry.hpp"
#include "vsum/image.hpp"
#include "vsum/selection.hpp"

namespace vsum {

class Subprocess;

// How to reach the external transcoder. Templates are argv-style command
// lines; placeholders: {transcoder} {input} {output} {width} {height} {fps}.
//
//   probe   prints key=value lines on stdout: width, height, r_frame_rate
//           (or frame_rate), and optionally nb_read_frames / nb_frames /
//           frame_count. Without a frame count the video is fully decoded.
//   decode  writes packed RGB24 frames (row-major, no padding) to stdout.
//   encode  reads packed RGB24 frames of {width}x{height} at {fps} from stdin
//           and writes {output}.
struct TranscoderConfig {
  std::string transcoder_path = "ffmpeg";
  std::string probe_template =
      "ffprobe -v error -select_streams v:0 -count_frames -show_entries "
      "stream=width,height,r_frame_rate,nb_read_frames -of "
      "default=noprint_wrappers=1 {input}";
  std::string decode_template =
      "{transcoder} -v error -nostdin -i {input} -map 0:v:0 -f rawvideo "
      "-pix_fmt rgb24 -";
  std::string encode_template =
      "{transcoder} -v error -nostdin -y -f rawvideo -pix_fmt rgb24 "
      "-s {width}x{height} -r {fps} -i - -c:v libx264 -pix_fmt yuv420p "
      "-movflags +faststart {output}";
  std::string output_extension = "mp4";
  std::filesystem::path work_dir = std::filesystem::temp_directory_path() / "vsum";
  int fetch_timeout_sec = 60;

  // Templates for the bundled vsum-transcode tool (Y4M files only).
  static TranscoderConfig Reference(const std::filesystem::path& tool);
};

struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string ToString() const { return std::to_string(num) + "/" + std::to_string(den); }
  static Rational Parse(const std::string& text);
  bool operator==(const Rational&) const = default;
};

struct VideoAsset {
  std::string id;
  std::string source;               // what the caller asked for (URL or path)
  std::filesystem::path local_path;  // what the transcoder reads
  int width = 0;
  int height = 0;
  Rational frame_rate;
  int64_t frame_count = 0;
  double duration = 0.0;  // seconds

  double fps() const { return frame_rate.value(); }
};

bool IsRemoteSource(const std::string& source);

// Downloads an http(s) URL to `destination`. Throws SourceUnreachable on any
// transport or HTTP status failure, UnsupportedSource for other schemes.
void FetchUrl(const std::string& url, const std::filesystem::path& destination,
              int timeout_sec);

// Probes a local file, or fetches a remote one into config.work_dir first.
VideoAsset Probe(const TranscoderConfig& config, const std::string& source);

// Streams decoded frames. Only frames with index % stride == 0 are returned;
// the rest are read and dropped. Never holds more than one frame.
class FrameReader {
 public:
  FrameReader(const TranscoderConfig& config, const VideoAsset& asset,
              int64_t stride = 1);
  ~FrameReader();
  FrameReader(FrameReader&&) noexcept;
  FrameReader& operator=(FrameReader&&) noexcept;

  // Next frame or nullopt at the end. Throws DecodeFailure with the index.
  std::optional<Frame> Next();

  // Stops the decoder early; later Next() calls return nullopt.
  void Close();

 private:
  std::unique_ptr<Subprocess> proc_;
  int width_ = 0;
  int height_ = 0;
  int64_t frame_count_ = 0;
  int64_t stride_ = 1;
  int64_t next_index_ = 0;
  std::vector<uint8_t> scratch_;
  bool done_ = false;
};

std::vector<Frame> DecodeFrames(const TranscoderConfig& config,
                                const VideoAsset& asset, int64_t stride = 1);

// Feeds RGB24 frames to the encode template.
class FrameWriter {
 public:
  FrameWriter(const TranscoderConfig& config, const std::filesystem::path& output,
              int width, int height, Rational fps);
  ~FrameWriter();

  void Write(std::span<const uint8_t> rgb);
  // Closes the stream and waits. Throws TranscoderFailure on a non-zero exit.
  void Finish();

  int64_t frames_written() const { return frames_; }

 private:
  std::unique_ptr<Subprocess> proc_;
  size_t frame_bytes_ = 0;
  int64_t frames_ = 0;
  bool finished_ = false;
};

struct OutputSpec {
  std::filesystem::path output;
  // Bounds for the encoded frame; crops are scaled down to fit, never up.
  int max_width = 1920;
  int max_height = 1920;
};

// Even output dimensions for a crop of crop_w x crop_h under the bounds.
CropWindow OutputDimensions(int crop_w, int crop_h, int max_width, int max_height);

using ProgressFn = std::function<void(double fraction)>;

// Concatenates the fragments in order, cropping every frame to its window
// (crops hold one window per fragment frame, in output order).
std::filesystem::path RenderSummary(const TranscoderConfig& config,
                                    const VideoAsset& asset,
                                    std::span<const Fragment> fragments,
                                    std::span<const CropWindow> crops,
                                    const OutputSpec& output,
                                    const ProgressFn& progress = {});

}  // namespace vsum

#endif  // VSUM_MEDIA_IO_HPP_
