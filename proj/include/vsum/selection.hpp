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

#ifndef VSUM_SELECTION_HPP_
#define VSUM_SELECTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vsum/error.hpp"
#include "vsum/scoring.hpp"
#include "vsum/shots.hpp"

namespace vsum {

struct ShotValue {
  double value = 0.0;  // sum of frame scores over the shot
  int64_t weight = 0;  // shot length in frames
};

struct FragmentSelection {
  std::vector<int> selected;  // shot indices, ascending
  int64_t total_frames = 0;
  double total_value = 0.0;
};

// Inclusive source-frame range copied verbatim into the summary.
struct Fragment {
  int64_t start_frame = 0;
  int64_t end_frame = 0;

  int64_t length() const { return end_frame - start_frame + 1; }
  bool operator==(const Fragment&) const = default;
};

// Frame budget for a target duration at `fps` (floor).
inline int64_t BudgetFrames(double target_seconds, double fps) {
  if (!(target_seconds >= 0.0) || !(fps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad duration budget");
  }
  return static_cast<int64_t>(std::floor(target_seconds * fps + 1e-9));
}

inline std::vector<ShotValue> AggregateShotValues(const ImportanceSeries& series,
                                                  std::span<const Shot> shots) {
  std::vector<ShotValue> out;
  out.reserve(shots.size());
  for (const Shot& s : shots) {
    if (s.start_frame < 0 || s.end_frame < s.start_frame ||
        s.end_frame >= static_cast<int64_t>(series.size())) {
      throw Error(ErrorCode::kLengthMismatch,
                  "importance series does not cover shot " +
                      std::to_string(s.index));
    }
    double sum = 0.0;
    for (int64_t f = s.start_frame; f <= s.end_frame; ++f) {
      sum += series.scores[static_cast<size_t>(f)];
    }
    out.push_back({sum, s.length()});
  }
  return out;
}

// Exact 0/1 knapsack over integer frame weights. Among optimal subsets the
// result includes each shot, in index order, whenever an optimal completion
// still exists, i.e. the lexicographically smallest optimal index set.
inline FragmentSelection SelectFragments(std::span<const ShotValue> items,
                                         int64_t budget_frames) {
  if (budget_frames < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative frame budget");
  }
  for (const ShotValue& it : items) {
    if (it.weight < 1 || !std::isfinite(it.value) || it.value < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "shot weights must be >= 1 and values finite and >= 0");
    }
  }
  FragmentSelection result;
  const int64_t total_weight = std::accumulate(
      items.begin(), items.end(), int64_t{0},
      [](int64_t acc, const ShotValue& v) { return acc + v.weight; });
  if (total_weight <= budget_frames) {
    for (size_t i = 0; i < items.size(); ++i) {
      result.selected.push_back(static_cast<int>(i));
      result.total_frames += items[i].weight;
      result.total_value += items[i].value;
    }
    return result;
  }

  // best[i][c]: best value from items i..n-1 within capacity c.
  const size_t n = items.size();
  const size_t cap = static_cast<size_t>(budget_frames);
  const size_t stride = cap + 1;
  std::vector<double> best((n + 1) * stride, 0.0);
  for (size_t i = n; i-- > 0;) {
    const double* next = &best[(i + 1) * stride];
    double* cur = &best[i * stride];
    const size_t w = static_cast<size_t>(items[i].weight);
    for (size_t c = 0; c <= cap; ++c) {
      double v = next[c];
      if (w <= c) v = std::max(v, items[i].value + next[c - w]);
      cur[c] = v;
    }
  }

  size_t c = cap;
  for (size_t i = 0; i < n; ++i) {
    const size_t w = static_cast<size_t>(items[i].weight);
    if (w > c) continue;
    const double target = best[i * stride + c];
    const double with = items[i].value + best[(i + 1) * stride + c - w];
    if (with >= target - 1e-9 * std::max(1.0, std::abs(target))) {
      result.selected.push_back(static_cast<int>(i));
      result.total_frames += items[i].weight;
      result.total_value += items[i].value;
      c -= w;
    }
  }
  return result;
}

// Chronological fragment list mirroring the selected shots. Adjacent shots are
// kept as separate fragments.
inline std::vector<Fragment> Assemble(const FragmentSelection& selection,
                                      std::span<const Shot> shots) {
  std::vector<Fragment> out;
  int prev = -1;
  for (int idx : selection.selected) {
    if (idx <= prev) {
      throw Error(ErrorCode::kInvalidArgument,
                  "selected shot indices must be unique and ascending");
    }
    if (idx < 0 || static_cast<size_t>(idx) >= shots.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "selected shot index " + std::to_string(idx) + " out of range");
    }
    out.push_back({shots[idx].start_frame, shots[idx].end_frame});
    prev = idx;
  }
  return out;
}

inline int64_t TotalFrames(std::span<const Fragment> fragments) {
  int64_t n = 0;
  for (const Fragment& f : fragments) n += f.length();
  return n;
}

}  // namespace vsum

#endif  // VSUM_SELECTION_HPP_
