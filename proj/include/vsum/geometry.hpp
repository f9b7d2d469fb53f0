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

#ifndef VSUM_GEOMETRY_HPP_
#define VSUM_GEOMETRY_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "vsum/error.hpp"

namespace vsum {

// Axis-aligned crop rectangle in integer frame pixels; (x, y) is top-left.
struct CropWindow {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int64_t area() const { return static_cast<int64_t>(w) * h; }
  bool operator==(const CropWindow&) const = default;
};

inline bool FitsFrame(const CropWindow& win, int frame_w, int frame_h) {
  return win.x >= 0 && win.y >= 0 && win.w > 0 && win.h > 0 &&
         win.x + win.w <= frame_w && win.y + win.h <= frame_h;
}

// Target aspect ratio, always gcd-reduced (16:9, 9:16, 1:1, ...).
class AspectRatio {
 public:
  AspectRatio() = default;

  static AspectRatio Make(int64_t num, int64_t den) {
    if (num < 1 || den < 1 || num > 100000 || den > 100000) {
      throw Error(ErrorCode::kInvalidSpec,
                  "aspect ratio terms must be in [1, 100000]");
    }
    const int64_t g = std::gcd(num, den);
    AspectRatio ar;
    ar.num_ = static_cast<int>(num / g);
    ar.den_ = static_cast<int>(den / g);
    return ar;
  }

  // Parses "W:H".
  static AspectRatio Parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidSpec,
                  "aspect ratio must look like W:H, got '" + std::string(text) +
                      "'");
    }
    auto parse_term = [&](std::string_view s) {
      int64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::kInvalidSpec,
                    "bad aspect ratio term '" + std::string(s) + "'");
      }
      return v;
    };
    return Make(parse_term(text.substr(0, colon)),
                parse_term(text.substr(colon + 1)));
  }

  int num() const { return num_; }
  int den() const { return den_; }
  double value() const { return static_cast<double>(num_) / den_; }
  std::string ToString() const {
    return std::to_string(num_) + ":" + std::to_string(den_);
  }
  bool operator==(const AspectRatio&) const = default;

 private:
  int num_ = 1;
  int den_ = 1;
};

// Largest even integer not above v (v >= 0).
inline int EvenFloor(double v) {
  const auto i = static_cast<int64_t>(std::floor(v + 1e-9));
  return static_cast<int>(i - (i & 1));
}

// True when (w, h) is the even-rounded realisation of `target`: the derived
// dimension sits within one even-rounding step (< 2 px) below the exact value.
inline bool MatchesAspect(int w, int h, const AspectRatio& target) {
  if (w <= 0 || h <= 0) return false;
  const double exact_w = static_cast<double>(h) * target.num() / target.den();
  const double exact_h = static_cast<double>(w) * target.den() / target.num();
  const bool width_derived = exact_w - w >= -1e-9 && exact_w - w < 2.0;
  const bool height_derived = exact_h - h >= -1e-9 && exact_h - h < 2.0;
  return width_derived || height_derived;
}

}  // namespace vsum

#endif  // VSUM_GEOMETRY_HPP_
