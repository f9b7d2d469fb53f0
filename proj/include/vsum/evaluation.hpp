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

#ifndef VSUM_EVALUATION_HPP_
#define VSUM_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsum/error.hpp"
#include "vsum/geometry.hpp"
#include "vsum/selection.hpp"

namespace vsum {

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-frame binary keyframe masks, one per annotator.
struct UserSummarySet {
  int64_t frame_count = 0;
  std::vector<std::vector<uint8_t>> users;
};

// Ground-truth crop windows: windows[frame][annotator].
struct CropAnnotationSet {
  std::vector<std::vector<CropWindow>> frames;

  size_t annotator_count() const { return frames.empty() ? 0 : frames[0].size(); }
};

enum class Aggregation { kMax, kMean };

inline Aggregation ParseAggregation(const std::string& s) {
  if (s == "max") return Aggregation::kMax;
  if (s == "mean" || s == "avg") return Aggregation::kMean;
  throw Error(ErrorCode::kInvalidArgument, "aggregation must be max or mean");
}

inline PrecisionRecall FScore(std::span<const uint8_t> machine,
                              std::span<const uint8_t> user) {
  if (machine.size() != user.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "machine summary has " + std::to_string(machine.size()) +
                    " frames, user summary " + std::to_string(user.size()));
  }
  int64_t m = 0, u = 0, both = 0;
  for (size_t i = 0; i < machine.size(); ++i) {
    const bool a = machine[i] != 0, b = user[i] != 0;
    m += a;
    u += b;
    both += a && b;
  }
  PrecisionRecall pr;
  pr.precision = m > 0 ? double(both) / double(m) : 0.0;
  pr.recall = u > 0 ? double(both) / double(u) : 0.0;
  const double denom = pr.precision + pr.recall;
  pr.f1 = denom > 0.0 ? 2.0 * pr.precision * pr.recall / denom : 0.0;
  return pr;
}

inline double FScoreProtocol(std::span<const uint8_t> machine,
                             const UserSummarySet& users, Aggregation mode) {
  if (users.users.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one annotator");
  }
  double best = 0.0, total = 0.0;
  for (const auto& user : users.users) {
    const double f = FScore(machine, user).f1;
    best = std::max(best, f);
    total += f;
  }
  return mode == Aggregation::kMax ? best : total / double(users.users.size());
}

// Binary per-frame mask of the frames covered by `fragments`.
inline std::vector<uint8_t> FragmentMask(std::span<const Fragment> fragments,
                                         int64_t frame_count) {
  std::vector<uint8_t> mask(static_cast<size_t>(frame_count), 0);
  for (const Fragment& f : fragments) {
    for (int64_t i = std::max<int64_t>(0, f.start_frame);
         i <= f.end_frame && i < frame_count; ++i) {
      mask[static_cast<size_t>(i)] = 1;
    }
  }
  return mask;
}

inline double Iou(const CropWindow& a, const CropWindow& b) {
  const int64_t ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const int64_t iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const int64_t inter = ix * iy;
  const int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? double(inter) / double(uni) : 0.0;
}

// Percentages: per-annotator mean IoU over all frames, then worst/best/mean.
struct IouReport {
  double worst = 0.0;
  double best = 0.0;
  double mean = 0.0;
  std::vector<double> per_annotator;  // fractions in [0, 1]
};

inline IouReport MakeIouReport(std::span<const CropWindow> machine,
                               const CropAnnotationSet& annotations) {
  if (machine.size() != annotations.frames.size()) {
    throw Error(ErrorCode::kFrameCountMismatch,
                std::to_string(machine.size()) + " machine windows for " +
                    std::to_string(annotations.frames.size()) +
                    " annotated frames");
  }
  const size_t users = annotations.annotator_count();
  if (machine.empty() || users == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty crop annotation set");
  }
  IouReport report;
  report.per_annotator.assign(users, 0.0);
  for (size_t f = 0; f < machine.size(); ++f) {
    if (annotations.frames[f].size() != users) {
      throw Error(ErrorCode::kParseError,
                  "frame " + std::to_string(f) + " has a different annotator count");
    }
    for (size_t u = 0; u < users; ++u) {
      report.per_annotator[u] += Iou(machine[f], annotations.frames[f][u]);
    }
  }
  for (double& v : report.per_annotator) v /= double(machine.size());
  const auto [lo, hi] =
      std::minmax_element(report.per_annotator.begin(), report.per_annotator.end());
  double total = 0.0;
  for (double v : report.per_annotator) total += v;
  report.worst = *lo * 100.0;
  report.best = *hi * 100.0;
  report.mean = total / double(users) * 100.0;
  return report;
}

// {frame_count, users: [{summary: [0/1, ...]}, ...]}
inline UserSummarySet UserSummariesFromJson(const nlohmann::json& doc) {
  UserSummarySet set;
  try {
    set.frame_count = doc.at("frame_count").get<int64_t>();
    for (const auto& user : doc.at("users")) {
      std::vector<uint8_t> mask;
      for (const auto& v : user.at("summary")) {
        mask.push_back(v.get<double>() != 0.0 ? 1 : 0);
      }
      if (static_cast<int64_t>(mask.size()) != set.frame_count) {
        throw Error(ErrorCode::kLengthMismatch,
                    "annotator summary has " + std::to_string(mask.size()) +
                        " frames, expected " + std::to_string(set.frame_count));
      }
      set.users.push_back(std::move(mask));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("annotations: ") + e.what());
  }
  if (set.users.empty()) {
    throw Error(ErrorCode::kParseError, "annotations list no users");
  }
  return set;
}

// {frames: [{user_windows: [[x, y, w, h], ...]}, ...]}
inline CropAnnotationSet CropAnnotationsFromJson(const nlohmann::json& doc) {
  CropAnnotationSet set;
  try {
    for (const auto& frame : doc.at("frames")) {
      std::vector<CropWindow> windows;
      for (const auto& w : frame.at("user_windows")) {
        if (w.size() != 4) {
          throw Error(ErrorCode::kParseError, "window must be [x, y, w, h]");
        }
        windows.push_back(
            {w[0].get<int>(), w[1].get<int>(), w[2].get<int>(), w[3].get<int>()});
      }
      set.frames.push_back(std::move(windows));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("crop annotations: ") + e.what());
  }
  if (set.frames.empty() || set.annotator_count() == 0) {
    throw Error(ErrorCode::kParseError, "crop annotations are empty");
  }
  for (const auto& f : set.frames) {
    if (f.size() != set.annotator_count()) {
      throw Error(ErrorCode::kParseError, "annotator count differs across frames");
    }
  }
  return set;
}

// Reports use percentages with one decimal.
inline double OneDecimal(double v) { return std::round(v * 10.0) / 10.0; }

inline std::string FormatPercent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", OneDecimal(v));
  return buf;
}

struct FScoreRow {
  std::string video;
  double f1 = 0.0;  // fraction
};

inline std::string FScoreTableText(std::span<const FScoreRow> rows,
                                   Aggregation mode) {
  std::string out = "Video | F-Score (%) [" +
                    std::string(mode == Aggregation::kMax ? "max" : "mean") +
                    "]\n";
  double total = 0.0;
  for (const auto& r : rows) {
    out += r.video + " | " + FormatPercent(r.f1 * 100.0) + "\n";
    total += r.f1;
  }
  if (!rows.empty()) {
    out += "Average | " + FormatPercent(total / double(rows.size()) * 100.0) + "\n";
  }
  return out;
}

inline nlohmann::json FScoreTableJson(std::span<const FScoreRow> rows,
                                      Aggregation mode) {
  nlohmann::json out;
  out["aggregation"] = mode == Aggregation::kMax ? "max" : "mean";
  out["rows"] = nlohmann::json::array();
  double total = 0.0;
  for (const auto& r : rows) {
    out["rows"].push_back({{"video", r.video}, {"f_score", OneDecimal(r.f1 * 100.0)}});
    total += r.f1;
  }
  if (!rows.empty()) out["average"] = OneDecimal(total / double(rows.size()) * 100.0);
  return out;
}

inline std::string IouTableText(const std::string& label, const IouReport& r) {
  return "Method | Worst | Best | Mean\n" + label + " | " + FormatPercent(r.worst) +
         " | " + FormatPercent(r.best) + " | " + FormatPercent(r.mean) + "\n";
}

inline nlohmann::json IouTableJson(const std::string& label, const IouReport& r) {
  return {{"method", label},
          {"worst", OneDecimal(r.worst)},
          {"best", OneDecimal(r.best)},
          {"mean", OneDecimal(r.mean)}};
}

}  // namespace vsum

#endif  // VSUM_EVALUATION_HPP_
