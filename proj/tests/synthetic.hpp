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

// Synthetic frame builders shared by the test suites.

#ifndef VSUM_TESTS_SYNTHETIC_HPP_
#define VSUM_TESTS_SYNTHETIC_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vsum/image.hpp"

namespace vsum::testing {

inline Frame SolidFrame(int64_t index, int w, int h, uint8_t r, uint8_t g,
                        uint8_t b) {
  Frame f(index, w, h);
  f.Fill(r, g, b);
  return f;
}

// Adds uniform noise in [-amp, amp] to every channel.
inline void AddNoise(Frame& f, int amp, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(-amp, amp);
  for (uint8_t& c : f.rgb) c = static_cast<uint8_t>(std::clamp(int(c) + d(rng), 0, 255));
}

inline void FillRect(Frame& f, int x0, int y0, int w, int h, uint8_t r, uint8_t g,
                     uint8_t b) {
  for (int y = std::max(0, y0); y < std::min(f.height, y0 + h); ++y) {
    for (int x = std::max(0, x0); x < std::min(f.width, x0 + w); ++x) {
      uint8_t* p = f.pixel(x, y);
      p[0] = r;
      p[1] = g;
      p[2] = b;
    }
  }
}

// Bright isotropic Gaussian blob over a dark background.
inline Frame GaussianBlobFrame(int64_t index, int w, int h, double cx, double cy,
                               double sigma) {
  Frame f(index, w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double g =
          std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * sigma * sigma));
      const auto v = static_cast<uint8_t>(std::lround(20 + 220 * g));
      uint8_t* p = f.pixel(x, y);
      p[0] = p[1] = p[2] = v;
    }
  }
  return f;
}

// Writes `value` as `bits` black/white cells of `cell` px in a row starting
// at (x0, y0). Cells are large enough to survive lossy re-encoding.
inline void DrawWatermark(Frame& f, uint32_t value, int bits, int x0, int y0,
                          int cell) {
  for (int b = 0; b < bits; ++b) {
    const uint8_t v = (value >> b) & 1u ? 255 : 0;
    FillRect(f, x0 + b * cell, y0, cell, cell, v, v, v);
  }
}

inline uint32_t ReadWatermark(const Frame& f, int bits, int x0, int y0, int cell) {
  uint32_t value = 0;
  for (int b = 0; b < bits; ++b) {
    const uint8_t* p = f.pixel(x0 + b * cell + cell / 2, y0 + cell / 2);
    if (p[1] > 127) value |= 1u << b;
  }
  return value;
}

// Three-level scenes separated by hard cuts, with a moving square and noise.
inline Frame SceneFrame(int64_t index, int w, int h, int scene, std::mt19937& rng) {
  static const uint8_t kPalette[][3] = {
      {30, 60, 150}, {200, 170, 40}, {40, 160, 60}, {170, 40, 120}, {90, 90, 90}};
  const auto& c = kPalette[scene % 5];
  Frame f = SolidFrame(index, w, h, c[0], c[1], c[2]);
  const int side = std::max(4, h / 5);
  const int x = static_cast<int>((index * 3) % std::max(1, w - side));
  FillRect(f, x, h / 3, side, side, 250, 250, 250);
  AddNoise(f, 4, rng);
  return f;
}

}  // namespace vsum::testing

#endif  // VSUM_TESTS_SYNTHETIC_HPP_
