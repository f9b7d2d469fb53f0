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

#ifndef VSUM_IMAGE_HPP_
#define VSUM_IMAGE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vsum/error.hpp"
#include "vsum/geometry.hpp"

namespace vsum {

// One decoded video frame: packed RGB24, row-major, no padding.
struct Frame {
  int64_t index = 0;
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  Frame() = default;
  Frame(int64_t idx, int w, int h)
      : index(idx), width(w), height(h),
        rgb(static_cast<size_t>(w) * h * 3, 0) {}

  size_t byte_size() const { return rgb.size(); }
  uint8_t* pixel(int x, int y) {
    return rgb.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  const uint8_t* pixel(int x, int y) const {
    return rgb.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  void Fill(uint8_t r, uint8_t g, uint8_t b) {
    for (size_t i = 0; i < rgb.size(); i += 3) {
      rgb[i] = r;
      rgb[i + 1] = g;
      rgb[i + 2] = b;
    }
  }
};

// Single-channel float image; luma values in [0, 255] unless noted.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), data(size_t(w) * h, 0.0) {}
  double& at(int x, int y) { return data[size_t(y) * width + x]; }
  double at(int x, int y) const { return data[size_t(y) * width + x]; }
};

// BT.601 luma.
inline double Luma(uint8_t r, uint8_t g, uint8_t b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

inline GrayImage ToGray(const Frame& frame) {
  GrayImage out(frame.width, frame.height);
  const uint8_t* p = frame.rgb.data();
  for (size_t i = 0; i < out.data.size(); ++i, p += 3) {
    out.data[i] = Luma(p[0], p[1], p[2]);
  }
  return out;
}

namespace internal {

// Source coverage of one output cell for area resampling.
struct AreaTap {
  int first = 0;
  std::vector<double> weights;
};

inline std::vector<AreaTap> AreaTaps(int src_len, double src_begin,
                                     double src_extent, int dst_len) {
  std::vector<AreaTap> taps(dst_len);
  const double scale = src_extent / dst_len;
  for (int d = 0; d < dst_len; ++d) {
    const double lo = src_begin + d * scale;
    const double hi = lo + scale;
    int first = static_cast<int>(std::floor(lo));
    int last = static_cast<int>(std::ceil(hi)) - 1;
    first = std::clamp(first, 0, src_len - 1);
    last = std::clamp(last, first, src_len - 1);
    AreaTap& tap = taps[d];
    tap.first = first;
    double total = 0.0;
    for (int s = first; s <= last; ++s) {
      const double w = std::max(0.0, std::min(hi, s + 1.0) - std::max(lo, double(s)));
      tap.weights.push_back(w);
      total += w;
    }
    if (total <= 0.0) {
      tap.weights.assign(tap.weights.size(), 0.0);
      tap.weights[0] = 1.0;
    } else {
      for (double& w : tap.weights) w /= total;
    }
  }
  return taps;
}

}  // namespace internal

// Box-filter (area-averaging) resample; exact for integer downscales.
inline GrayImage ResizeArea(const GrayImage& src, int dst_w, int dst_h) {
  if (dst_w <= 0 || dst_h <= 0 || src.width <= 0 || src.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "resize to empty image");
  }
  const auto xt = internal::AreaTaps(src.width, 0, src.width, dst_w);
  const auto yt = internal::AreaTaps(src.height, 0, src.height, dst_h);
  GrayImage rows(dst_w, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < dst_w; ++x) {
      double acc = 0.0;
      const auto& tap = xt[x];
      for (size_t k = 0; k < tap.weights.size(); ++k) {
        acc += tap.weights[k] * src.at(tap.first + int(k), y);
      }
      rows.at(x, y) = acc;
    }
  }
  GrayImage out(dst_w, dst_h);
  for (int y = 0; y < dst_h; ++y) {
    const auto& tap = yt[y];
    for (int x = 0; x < dst_w; ++x) {
      double acc = 0.0;
      for (size_t k = 0; k < tap.weights.size(); ++k) {
        acc += tap.weights[k] * rows.at(x, tap.first + int(k));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

// Crops `win` out of `src` and area-resamples it to out_w x out_h RGB24.
// When the output matches the window size this is a plain copy.
inline void CropResize(const Frame& src, const CropWindow& win, int out_w,
                       int out_h, std::vector<uint8_t>& out) {
  if (!FitsFrame(win, src.width, src.height)) {
    throw Error(ErrorCode::kInvalidArgument, "crop window outside frame");
  }
  out.resize(static_cast<size_t>(out_w) * out_h * 3);
  if (out_w == win.w && out_h == win.h) {
    for (int y = 0; y < win.h; ++y) {
      const uint8_t* row = src.pixel(win.x, win.y + y);
      std::copy(row, row + size_t(win.w) * 3,
                out.begin() + static_cast<ptrdiff_t>(size_t(y) * out_w * 3));
    }
    return;
  }
  const auto xt = internal::AreaTaps(src.width, win.x, win.w, out_w);
  const auto yt = internal::AreaTaps(src.height, win.y, win.h, out_h);
  std::vector<double> rows(size_t(out_w) * win.h * 3);
  for (int y = 0; y < win.h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc[3] = {0, 0, 0};
      const auto& tap = xt[x];
      for (size_t k = 0; k < tap.weights.size(); ++k) {
        const uint8_t* p = src.pixel(tap.first + int(k), win.y + y);
        for (int c = 0; c < 3; ++c) acc[c] += tap.weights[k] * p[c];
      }
      for (int c = 0; c < 3; ++c) rows[(size_t(y) * out_w + x) * 3 + c] = acc[c];
    }
  }
  for (int y = 0; y < out_h; ++y) {
    const auto& tap = yt[y];
    for (int x = 0; x < out_w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (size_t k = 0; k < tap.weights.size(); ++k) {
          const int sy = tap.first + int(k) - win.y;
          acc += tap.weights[k] * rows[(size_t(sy) * out_w + x) * 3 + c];
        }
        out[(size_t(y) * out_w + x) * 3 + c] =
            static_cast<uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
      }
    }
  }
}

}  // namespace vsum

#endif  // VSUM_IMAGE_HPP_
