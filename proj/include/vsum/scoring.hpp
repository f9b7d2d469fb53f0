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

#ifndef VSUM_SCORING_HPP_
#define VSUM_SCORING_HPP_

#include <algorithm>
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

// Per-frame importance, one score in [0, 1] per source frame.
struct ImportanceSeries {
  std::vector<double> scores;

  size_t size() const { return scores.size(); }
};

// Min-max normalisation to [0, 1]; an all-equal input maps to zeros.
inline std::vector<double> MinMaxNormalize(std::vector<double> values) {
  if (values.empty()) return values;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  for (double& v : values) v = range > 0.0 ? (v - lo) / range : 0.0;
  return values;
}

inline ImportanceSeries ValidateScores(std::vector<double> scores,
                                       int64_t frame_count) {
  if (static_cast<int64_t>(scores.size()) != frame_count) {
    throw Error(ErrorCode::kLengthMismatch,
                "score file has " + std::to_string(scores.size()) +
                    " values for " + std::to_string(frame_count) + " frames");
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
      throw Error(ErrorCode::kRangeError,
                  "score " + std::to_string(scores[i]) + " at frame " +
                      std::to_string(i) + " outside [0, 1]");
    }
  }
  return ImportanceSeries{std::move(scores)};
}

// Accepts a JSON array of floats, or one float per line when the first
// non-blank byte is not '['.
inline ImportanceSeries ParseScores(const std::string& text, int64_t frame_count) {
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<double> scores;
  if (first != std::string::npos && text[first] == '[') {
    try {
      const auto doc = nlohmann::json::parse(text);
      for (const auto& v : doc) {
        if (!v.is_number()) {
          throw Error(ErrorCode::kParseError, "score array holds a non-number");
        }
        scores.push_back(v.get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, std::string("score file: ") + e.what());
    }
  } else {
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = line.find_last_not_of(" \t\r");
      const std::string token = line.substr(b, e - b + 1);
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ": not a number");
      }
      scores.push_back(v);
    }
  }
  return ValidateScores(std::move(scores), frame_count);
}

inline ImportanceSeries ImportScores(const std::filesystem::path& path,
                                     int64_t frame_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScores(buf.str(), frame_count);
}

// Motion-magnitude baseline: mean absolute luma difference to the previous
// frame. Streams frames; keeps only the previous luma plane.
class MotionScorer {
 public:
  void Push(const Frame& frame) {
    GrayImage gray = ToGray(frame);
    if (have_prev_) {
      if (gray.data.size() != prev_.data.size()) {
        throw Error(ErrorCode::kInvalidArgument, "frame size changed mid-stream");
      }
      double acc = 0.0;
      for (size_t i = 0; i < gray.data.size(); ++i) {
        acc += std::abs(gray.data[i] - prev_.data[i]);
      }
      raw_.push_back(acc / static_cast<double>(gray.data.size()));
    }
    prev_ = std::move(gray);
    have_prev_ = true;
    ++frames_;
  }

  // Unnormalised differences; raw()[i] belongs to frame i + 1.
  const std::vector<double>& raw() const { return raw_; }

  ImportanceSeries Finish() const { return FromMotion(raw_, frames_); }

  // Builds the series from a per-transition motion signal of length n - 1.
  static ImportanceSeries FromMotion(std::span<const double> motion,
                                     int64_t frame_count) {
    if (frame_count < 1) {
      throw Error(ErrorCode::kInvalidArgument, "scoring needs >= 1 frame");
    }
    std::vector<double> per_frame(static_cast<size_t>(frame_count), 0.0);
    for (size_t i = 0; i < motion.size(); ++i) per_frame[i + 1] = motion[i];
    if (frame_count > 1) per_frame[0] = per_frame[1];
    return ImportanceSeries{MinMaxNormalize(std::move(per_frame))};
  }

 private:
  GrayImage prev_;
  bool have_prev_ = false;
  std::vector<double> raw_;
  int64_t frames_ = 0;
};

inline ImportanceSeries BaselineScores(std::span<const Frame> frames) {
  MotionScorer scorer;
  for (const Frame& f : frames) scorer.Push(f);
  return scorer.Finish();
}

}  // namespace vsum

#endif  // VSUM_SCORING_HPP_
