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

// Multi-shot synthetic clips with per-frame watermarks.

#ifndef VSUM_TESTS_CLIPS_HPP_
#define VSUM_TESTS_CLIPS_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "media_fixtures.hpp"
#include "synthetic.hpp"

namespace vsum::testing {

constexpr int kClipWmBits = 16;
constexpr int kClipWmCell = 4;

inline uint32_t ClipWatermark(int clip_id, int64_t frame) {
  return (static_cast<uint32_t>(clip_id) << 11) | static_cast<uint32_t>(frame & 0x7ff);
}

// Shot k is a flat palette colour with a bright square moving at a
// shot-specific speed; the top-left corner carries (clip_id, frame).
inline Frame ShotClipFrame(int64_t index, int w, int h, int shot, int clip_id) {
  static const uint8_t kPalette[][3] = {
      {30, 60, 150}, {200, 170, 40}, {40, 160, 60}, {170, 40, 120}, {90, 90, 90}, {0, 120, 120}};
  const auto& c = kPalette[shot % 6];
  Frame f = SolidFrame(index, w, h, c[0], c[1], c[2]);
  const int side = std::max(4, h / 4);
  const int speed = 1 + shot * 2;
  const int span = std::max(1, w - side);
  const int x = static_cast<int>((index * speed) % (2 * span));
  FillRect(f, x < span ? x : 2 * span - x, h / 3, side, side, 250, 250, 250);
  DrawWatermark(f, ClipWatermark(clip_id, index), kClipWmBits, 0, 0, kClipWmCell);
  return f;
}

// Writes consecutive shots of the given lengths; returns the cut frames.
inline std::vector<int64_t> WriteShotClip(const TranscoderConfig& config,
                                          const std::filesystem::path& path, int w, int h,
                                          Rational fps, const std::vector<int64_t>& lengths,
                                          int clip_id = 0) {
  std::vector<int64_t> starts;
  int64_t total = 0;
  for (int64_t len : lengths) {
    starts.push_back(total);
    total += len;
  }
  WriteClip(config, path, w, h, fps, total, [&](int64_t i) {
    int shot = 0;
    while (shot + 1 < static_cast<int>(starts.size()) && i >= starts[shot + 1]) ++shot;
    return ShotClipFrame(i, w, h, shot, clip_id);
  });
  return {starts.begin() + 1, starts.end()};
}

}  // namespace vsum::testing

#endif  // VSUM_TESTS_CLIPS_HPP_
