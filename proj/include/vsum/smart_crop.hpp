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

#ifndef VSUM_SMART_CROP_HPP_
#define VSUM_SMART_CROP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsum/error.hpp"
#include "vsum/geometry.hpp"
#include "vsum/saliency.hpp"

namespace vsum {

// Single inferred centre of attention in frame pixel coordinates.
struct FocusPoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;  // retained fraction of the saliency mass
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class ClusterMethod {
  // Globally optimal 1-D k-means. Optimal 1-D clusters are contiguous runs of
  // the sorted values, so a dynamic program over split points is exact.
  kExact,
  // Lloyd iteration seeded at range quantiles {1/2k, 3/2k, ...}; may stop in
  // a local optimum.
  kLloyd,
};

struct ClusteringOptions {
  int k = 3;
  ClusterMethod method = ClusterMethod::kExact;
  // kLloyd only.
  int max_iterations = 50;
  double tolerance = 1e-4;
};

// 1-D k-means over map intensities, computed on the distinct values weighted
// by pixel count.
struct IntensityClusters {
  std::vector<double> values;     // distinct intensities, ascending
  std::vector<int64_t> counts;    // pixels per distinct value
  std::vector<int> labels;        // cluster of each distinct value
  std::vector<double> centroids;
  int top = 0;                    // cluster with the highest centroid
  int iterations = 0;
};

namespace internal {

// Weighted within-cluster sum of squares of values[i, j) from prefix sums.
class SegmentCost {
 public:
  SegmentCost(const std::vector<double>& values, const std::vector<int64_t>& counts)
      : n_(values.size() + 1, 0.0), s_(values.size() + 1, 0.0),
        q_(values.size() + 1, 0.0) {
    // Centering on the median value keeps the prefix sums well conditioned.
    shift_ = values.empty() ? 0.0 : values[values.size() / 2];
    for (size_t i = 0; i < values.size(); ++i) {
      const double c = double(counts[i]), v = values[i] - shift_;
      n_[i + 1] = n_[i] + c;
      s_[i + 1] = s_[i] + c * v;
      q_[i + 1] = q_[i] + c * v * v;
    }
  }

  double operator()(size_t i, size_t j) const {
    const double n = n_[j] - n_[i];
    if (n <= 0.0) return 0.0;
    const double s = s_[j] - s_[i];
    return std::max(0.0, (q_[j] - q_[i]) - s * s / n);
  }

  double Mean(size_t i, size_t j) const {
    return (s_[j] - s_[i]) / (n_[j] - n_[i]) + shift_;
  }

 private:
  std::vector<double> n_, s_, q_;
  double shift_ = 0.0;
};

// prev[i]: best cost of the first i values in m - 1 clusters. Fills cur[j] for
// j in [lo, hi] with the split points restricted to [opt_lo, opt_hi]; the
// optimal split is monotone in j, which allows divide and conquer.
inline void FillLayer(const SegmentCost& cost, const std::vector<double>& prev,
                      std::vector<double>& cur, std::vector<size_t>& arg,
                      size_t lo, size_t hi, size_t opt_lo, size_t opt_hi) {
  if (lo > hi) return;
  const size_t mid = lo + (hi - lo) / 2;
  double best = std::numeric_limits<double>::infinity();
  size_t best_i = opt_lo;
  for (size_t i = opt_lo; i <= std::min(opt_hi, mid - 1); ++i) {
    const double c = prev[i] + cost(i, mid);
    if (c < best) {
      best = c;
      best_i = i;
    }
  }
  cur[mid] = best;
  arg[mid] = best_i;
  if (mid > lo) FillLayer(cost, prev, cur, arg, lo, mid - 1, opt_lo, best_i);
  FillLayer(cost, prev, cur, arg, mid + 1, hi, best_i, opt_hi);
}

inline void ExactClusters(IntensityClusters& r, int k) {
  const size_t d = r.values.size();
  const SegmentCost cost(r.values, r.counts);
  const double inf = std::numeric_limits<double>::infinity();
  // layer[m][j]: best cost of the first j values in m + 1 clusters.
  std::vector<std::vector<double>> layer(k, std::vector<double>(d + 1, inf));
  std::vector<std::vector<size_t>> split(k, std::vector<size_t>(d + 1, 0));
  for (size_t j = 1; j <= d; ++j) layer[0][j] = cost(0, j);
  for (int m = 1; m < k; ++m) {
    FillLayer(cost, layer[m - 1], layer[m], split[m], size_t(m) + 1, d,
              size_t(m), d - 1);
  }
  std::vector<size_t> bounds(k + 1, 0);
  bounds[k] = d;
  for (int m = k - 1; m >= 1; --m) bounds[m] = split[m][bounds[m + 1]];
  r.centroids.resize(k);
  for (int m = 0; m < k; ++m) {
    r.centroids[m] = cost.Mean(bounds[m], bounds[m + 1]);
    for (size_t i = bounds[m]; i < bounds[m + 1]; ++i) r.labels[i] = m;
  }
}

inline void LloydClusters(IntensityClusters& r, int k,
                          const ClusteringOptions& options) {
  const size_t d = r.values.size();
  const double lo = r.values.front();
  const double hi = r.values.back();
  r.centroids.resize(k);
  for (int j = 0; j < k; ++j) {
    r.centroids[j] = lo + (2.0 * j + 1.0) / (2.0 * k) * (hi - lo);
  }
  // Equidistant values join the lower-index cluster.
  auto assign = [&] {
    for (size_t i = 0; i < d; ++i) {
      int best = 0;
      double best_dist = std::abs(r.values[i] - r.centroids[0]);
      for (int j = 1; j < k; ++j) {
        const double dist = std::abs(r.values[i] - r.centroids[j]);
        if (dist < best_dist) {
          best = j;
          best_dist = dist;
        }
      }
      r.labels[i] = best;
    }
  };
  assign();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<double> sum(k, 0.0);
    std::vector<int64_t> n(k, 0);
    for (size_t i = 0; i < d; ++i) {
      sum[r.labels[i]] += r.values[i] * double(r.counts[i]);
      n[r.labels[i]] += r.counts[i];
    }
    double shift = 0.0;
    for (int j = 0; j < k; ++j) {
      if (n[j] == 0) continue;  // empty cluster keeps its centroid
      const double c = sum[j] / double(n[j]);
      shift = std::max(shift, std::abs(c - r.centroids[j]));
      r.centroids[j] = c;
    }
    assign();
    r.iterations = iter + 1;
    if (shift < options.tolerance) break;
  }
}

}  // namespace internal

inline IntensityClusters ClusterIntensities(std::span<const double> intensities,
                                            const ClusteringOptions& options = {}) {
  if (options.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  IntensityClusters result;
  std::vector<double> sorted(intensities.begin(), intensities.end());
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted) {
    if (result.values.empty() || result.values.back() != v) {
      result.values.push_back(v);
      result.counts.push_back(1);
    } else {
      ++result.counts.back();
    }
  }
  const size_t d = result.values.size();
  result.labels.assign(d, 0);
  if (d == 0) return result;

  // Fewer distinct values than clusters: one cluster per value.
  const int k = static_cast<int>(std::min<size_t>(options.k, d));
  if (options.method == ClusterMethod::kExact) {
    internal::ExactClusters(result, k);
  } else {
    internal::LloydClusters(result, k, options);
  }

  std::vector<bool> used(k, false);
  for (int label : result.labels) used[label] = true;
  double top_c = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    if (used[j] && result.centroids[j] > top_c) {
      top_c = result.centroids[j];
      result.top = j;
    }
  }
  return result;
}

// Keeps only pixels of the highest-centroid intensity cluster; everything
// else is zeroed. Retained pixels keep their value.
inline SaliencyMap FilterByClustering(const SaliencyMap& map,
                                      const ClusteringOptions& options = {}) {
  const IntensityClusters clusters = ClusterIntensities(map.intensities, options);
  SaliencyMap out = map;
  for (double& v : out.intensities) {
    const auto it =
        std::lower_bound(clusters.values.begin(), clusters.values.end(), v);
    const size_t i = static_cast<size_t>(it - clusters.values.begin());
    if (clusters.labels[i] != clusters.top) v = 0.0;
  }
  return out;
}

// Map cell (mx, my) centre expressed in frame pixel coordinates.
inline Point2 MapToFrame(double mx, double my, int map_w, int map_h, int frame_w,
                         int frame_h) {
  return {(mx + 0.5) * frame_w / map_w - 0.5, (my + 0.5) * frame_h / map_h - 0.5};
}

// Intensity-weighted centroid of the retained pixels. `pre_filter_sum` is the
// saliency mass before filtering and defines the confidence.
inline FocusPoint InferFocus(const SaliencyMap& filtered, double pre_filter_sum,
                             int frame_w, int frame_h) {
  FocusPoint fp{(frame_w - 1) / 2.0, (frame_h - 1) / 2.0, 0.0};
  double mass = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < filtered.height; ++y) {
    for (int x = 0; x < filtered.width; ++x) {
      const double v = filtered.at(x, y);
      mass += v;
      sx += v * x;
      sy += v * y;
    }
  }
  if (!(pre_filter_sum > 0.0) || !(mass > 0.0)) return fp;
  const Point2 p = MapToFrame(sx / mass, sy / mass, filtered.width,
                              filtered.height, frame_w, frame_h);
  fp.x = std::clamp(p.x, 0.0, double(frame_w - 1));
  fp.y = std::clamp(p.y, 0.0, double(frame_h - 1));
  fp.confidence = std::clamp(mass / pre_filter_sum, 0.0, 1.0);
  return fp;
}

inline FocusPoint InferFocus(const SaliencyMap& raw, const SaliencyMap& filtered,
                             int frame_w, int frame_h) {
  return InferFocus(filtered, raw.sum(), frame_w, frame_h);
}

// Clustering filter followed by focus inference.
inline FocusPoint FocusFromSaliency(const SaliencyMap& raw, int frame_w,
                                    int frame_h,
                                    const ClusteringOptions& options = {}) {
  return InferFocus(raw, FilterByClustering(raw, options), frame_w, frame_h);
}

struct SmoothingOptions {
  double alpha = 0.3;
  double confidence_floor = 0.05;
};

// Exponential moving average of focus points, restarted at the first frame of
// every segment. Low-confidence frames hold the previous smoothed centre.
inline std::vector<Point2> SmoothCenters(std::span<const FocusPoint> points,
                                         std::span<const int64_t> segment_lengths,
                                         const SmoothingOptions& options = {}) {
  int64_t covered = 0;
  for (int64_t len : segment_lengths) {
    if (len < 1) throw Error(ErrorCode::kInvalidArgument, "empty segment");
    covered += len;
  }
  if (covered != static_cast<int64_t>(points.size())) {
    throw Error(ErrorCode::kLengthMismatch,
                "segments cover " + std::to_string(covered) + " of " +
                    std::to_string(points.size()) + " points");
  }
  std::vector<Point2> out(points.size());
  size_t t = 0;
  for (int64_t len : segment_lengths) {
    // A low-confidence first frame still seeds the segment; by construction
    // its point is the frame centre.
    Point2 s{points[t].x, points[t].y};
    out[t++] = s;
    for (int64_t i = 1; i < len; ++i, ++t) {
      if (points[t].confidence >= options.confidence_floor) {
        s.x = options.alpha * points[t].x + (1.0 - options.alpha) * s.x;
        s.y = options.alpha * points[t].y + (1.0 - options.alpha) * s.y;
      }
      out[t] = s;
    }
  }
  return out;
}

// Largest even-dimensioned window of the target aspect that fits the frame.
inline CropWindow WindowSize(int frame_w, int frame_h, const AspectRatio& target) {
  if (frame_w < 1 || frame_h < 1) {
    throw Error(ErrorCode::kInvalidArgument, "frame dimensions must be > 0");
  }
  int64_t w = 0, h = 0;
  if (int64_t(frame_w) * target.den() >= int64_t(frame_h) * target.num()) {
    h = frame_h - (frame_h & 1);
    w = h * target.num() / target.den();
    w -= w & 1;
  } else {
    w = frame_w - (frame_w & 1);
    h = w * target.den() / target.num();
    h -= h & 1;
  }
  if (w <= 0 || h <= 0) {
    throw Error(ErrorCode::kImpossibleAspect,
                "aspect " + target.ToString() + " does not fit " +
                    std::to_string(frame_w) + "x" + std::to_string(frame_h));
  }
  return {0, 0, static_cast<int>(w), static_cast<int>(h)};
}

inline CropWindow PlaceWindow(Point2 center, CropWindow size, int frame_w,
                              int frame_h) {
  const auto place = [](double c, int extent, int limit) {
    // Half-pixel ties round up even after float noise in c.
    const double x = std::floor(c - extent / 2.0 + 0.5 + 1e-6);
    return static_cast<int>(std::clamp(x, 0.0, double(limit - extent)));
  };
  size.x = place(center.x, size.w, frame_w);
  size.y = place(center.y, size.h, frame_h);
  return size;
}

inline CropWindow WindowFor(Point2 center, int frame_w, int frame_h,
                            const AspectRatio& target) {
  return PlaceWindow(center, WindowSize(frame_w, frame_h, target), frame_w,
                     frame_h);
}

// One row of a crop trace: the window applied to a source frame.
struct TraceEntry {
  int64_t frame = 0;
  CropWindow window;
  bool operator==(const TraceEntry&) const = default;
};

inline nlohmann::json CropTraceToJson(std::span<const TraceEntry> trace) {
  nlohmann::json out = nlohmann::json::array();
  for (const TraceEntry& e : trace) {
    out.push_back({{"frame", e.frame},
                   {"x", e.window.x},
                   {"y", e.window.y},
                   {"w", e.window.w},
                   {"h", e.window.h}});
  }
  return out;
}

inline std::vector<TraceEntry> CropTraceFromJson(const nlohmann::json& doc) {
  if (!doc.is_array()) {
    throw Error(ErrorCode::kParseError, "crop trace must be a JSON array");
  }
  std::vector<TraceEntry> trace;
  try {
    for (const auto& row : doc) {
      trace.push_back({row.at("frame").get<int64_t>(),
                       {row.at("x").get<int>(), row.at("y").get<int>(),
                        row.at("w").get<int>(), row.at("h").get<int>()}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("crop trace: ") + e.what());
  }
  return trace;
}

}  // namespace vsum

#endif  // VSUM_SMART_CROP_HPP_
