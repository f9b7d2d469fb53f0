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

#ifndef VSUM_SHOTS_HPP_
#define VSUM_SHOTS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsum/error.hpp"
#include "vsum/image.hpp"

namespace vsum {

// A maximal run of frames between two cuts. Frame bounds are inclusive.
struct Shot {
  int index = 0;
  int64_t start_frame = 0;
  int64_t end_frame = 0;

  int64_t length() const { return end_frame - start_frame + 1; }
  bool operator==(const Shot&) const = default;
};

struct ShotDetectorOptions {
  // Boundaries closer than this to the previous boundary are dropped.
  int min_shot_len = 10;
  // Cut threshold is mean + sensitivity * stddev of consecutive distances.
  double sensitivity = 3.0;
};

using GrayHistogram = std::array<double, 64>;

// Normalised 64-bin histogram of 8-bit luma.
inline GrayHistogram ComputeGrayHistogram(const Frame& frame) {
  GrayHistogram hist{};
  const uint8_t* p = frame.rgb.data();
  const size_t n = size_t(frame.width) * frame.height;
  for (size_t i = 0; i < n; ++i, p += 3) {
    const int luma = (299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000;
    hist[luma >> 2] += 1.0;
  }
  if (n > 0) {
    for (double& h : hist) h /= static_cast<double>(n);
  }
  return hist;
}

inline double ChiSquareDistance(const GrayHistogram& a, const GrayHistogram& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double s = a[i] + b[i];
    if (s > 0.0) d += (a[i] - b[i]) * (a[i] - b[i]) / s;
  }
  return d;
}

// Throws PartitionError unless `shots` tile [0, frame_count - 1] in order.
inline void ValidatePartition(std::span<const Shot> shots, int64_t frame_count) {
  if (shots.empty()) {
    throw Error(ErrorCode::kPartitionError, "no shots");
  }
  int64_t expected = 0;
  for (size_t i = 0; i < shots.size(); ++i) {
    const Shot& s = shots[i];
    if (s.start_frame > s.end_frame) {
      throw Error(ErrorCode::kPartitionError,
                  "shot " + std::to_string(i) + " ends before it starts");
    }
    if (s.start_frame != expected) {
      throw Error(ErrorCode::kPartitionError,
                  (s.start_frame > expected ? "gap" : "overlap") +
                      std::string(" before shot ") + std::to_string(i) +
                      " (starts at " + std::to_string(s.start_frame) +
                      ", expected " + std::to_string(expected) + ")");
    }
    if (s.end_frame >= frame_count) {
      throw Error(ErrorCode::kPartitionError,
                  "shot " + std::to_string(i) + " ends at frame " +
                      std::to_string(s.end_frame) + " beyond frame_count " +
                      std::to_string(frame_count));
    }
    expected = s.end_frame + 1;
  }
  if (expected != frame_count) {
    throw Error(ErrorCode::kPartitionError,
                "shots cover " + std::to_string(expected) + " of " +
                    std::to_string(frame_count) + " frames");
  }
}

// Shot list from sorted cut positions (each cut is the first frame of a shot).
inline std::vector<Shot> ShotsFromCuts(std::span<const int64_t> cuts,
                                       int64_t frame_count) {
  std::vector<Shot> shots;
  int64_t start = 0;
  for (int64_t cut : cuts) {
    shots.push_back({static_cast<int>(shots.size()), start, cut - 1});
    start = cut;
  }
  shots.push_back({static_cast<int>(shots.size()), start, frame_count - 1});
  return shots;
}

// Streaming histogram-difference cut detector. Push frames in order, then
// call Finish(). Keeps one histogram and the distance series in memory.
class ShotDetector {
 public:
  explicit ShotDetector(ShotDetectorOptions options = {}) : options_(options) {
    if (options_.min_shot_len < 1) {
      throw Error(ErrorCode::kInvalidArgument, "min_shot_len must be >= 1");
    }
    if (!(options_.sensitivity > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "sensitivity must be positive");
    }
  }

  void Push(const Frame& frame) {
    GrayHistogram hist = ComputeGrayHistogram(frame);
    if (frame_count_ > 0) distances_.push_back(ChiSquareDistance(prev_, hist));
    prev_ = hist;
    ++frame_count_;
  }

  int64_t frame_count() const { return frame_count_; }

  // distances()[i] is the distance between frames i and i + 1.
  const std::vector<double>& distances() const { return distances_; }

  double Threshold() const {
    if (distances_.empty()) return 0.0;
    double mean = 0.0;
    for (double d : distances_) mean += d;
    mean /= static_cast<double>(distances_.size());
    double var = 0.0;
    for (double d : distances_) var += (d - mean) * (d - mean);
    var /= static_cast<double>(distances_.size());
    return mean + options_.sensitivity * std::sqrt(var);
  }

  std::vector<int64_t> Cuts() const {
    std::vector<int64_t> cuts;
    const double threshold = Threshold();
    int64_t last = 0;
    for (size_t i = 0; i < distances_.size(); ++i) {
      if (!(distances_[i] > threshold)) continue;
      const int64_t cut = static_cast<int64_t>(i) + 1;
      if (cut - last < options_.min_shot_len) continue;
      cuts.push_back(cut);
      last = cut;
    }
    return cuts;
  }

  std::vector<Shot> Finish() const {
    if (frame_count_ == 0) {
      throw Error(ErrorCode::kInvalidArgument, "shot detection needs >= 1 frame");
    }
    const auto cuts = Cuts();
    return ShotsFromCuts(cuts, frame_count_);
  }

 private:
  ShotDetectorOptions options_;
  GrayHistogram prev_{};
  std::vector<double> distances_;
  int64_t frame_count_ = 0;
};

inline std::vector<Shot> DetectShots(std::span<const Frame> frames,
                                     ShotDetectorOptions options = {}) {
  ShotDetector detector(options);
  for (const Frame& f : frames) detector.Push(f);
  return detector.Finish();
}

// Parses a JSON array of inclusive [start, end] pairs.
inline std::vector<Shot> ParseShots(const std::string& text, int64_t frame_count) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("shot file: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kParseError, "shot file must be a JSON array");
  }
  std::vector<Shot> shots;
  for (const auto& item : doc) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
        !item[1].is_number_integer()) {
      throw Error(ErrorCode::kParseError,
                  "each shot must be an [start, end] integer pair");
    }
    shots.push_back({static_cast<int>(shots.size()), item[0].get<int64_t>(),
                     item[1].get<int64_t>()});
  }
  ValidatePartition(shots, frame_count);
  return shots;
}

inline std::vector<Shot> ImportShots(const std::filesystem::path& path,
                                     int64_t frame_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseShots(buf.str(), frame_count);
}

inline nlohmann::json ShotsToJson(std::span<const Shot> shots) {
  nlohmann::json out = nlohmann::json::array();
  for (const Shot& s : shots) out.push_back({s.start_frame, s.end_frame});
  return out;
}

}  // namespace vsum

#endif  // VSUM_SHOTS_HPP_
