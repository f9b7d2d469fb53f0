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

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#ifndef VSUM_TESTS_ORACLES_HPP_
#define VSUM_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace vsum::testing {

struct KnapsackOracleResult {
  double best_value = 0.0;
  std::vector<int> best_set;  // lexicographically smallest among optima
};

// Exhaustive enumeration over all 2^n subsets.
inline KnapsackOracleResult BruteForceKnapsack(const std::vector<double>& values,
                                               const std::vector<int64_t>& weights,
                                               int64_t budget) {
  const int n = static_cast<int>(values.size());
  KnapsackOracleResult best;
  best.best_value = -1.0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    int64_t w = 0;
    double v = 0.0;
    std::vector<int> set;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        w += weights[i];
        v += values[i];
        set.push_back(i);
      }
    }
    if (w > budget) continue;
    if (v > best.best_value + 1e-9 ||
        (std::abs(v - best.best_value) <= 1e-9 && set < best.best_set)) {
      best.best_value = v;
      best.best_set = set;
    }
  }
  return best;
}

// Globally optimal weighted 1-D k-means by exhaustive search over contiguous
// partitions of the sorted distinct values (k <= 3). Returns, per distinct
// value, whether it belongs to the highest group.
inline std::vector<bool> OptimalTopGroup(const std::vector<double>& values,
                                         const std::vector<int64_t>& counts,
                                         int k) {
  const int d = static_cast<int>(values.size());
  k = std::min(k, d);
  auto sse = [&](int lo, int hi) {  // [lo, hi)
    double n = 0, s = 0;
    for (int i = lo; i < hi; ++i) {
      n += double(counts[i]);
      s += values[i] * double(counts[i]);
    }
    const double mean = s / n;
    double e = 0;
    for (int i = lo; i < hi; ++i) {
      e += double(counts[i]) * (values[i] - mean) * (values[i] - mean);
    }
    return e;
  };
  double best = std::numeric_limits<double>::infinity();
  int best_start = 0;  // first index of the top group
  if (k == 1) return std::vector<bool>(d, true);
  if (k == 2) {
    for (int a = 1; a < d; ++a) {
      const double e = sse(0, a) + sse(a, d);
      if (e < best) {
        best = e;
        best_start = a;
      }
    }
  } else {
    for (int a = 1; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        const double e = sse(0, a) + sse(a, b) + sse(b, d);
        if (e < best) {
          best = e;
          best_start = b;
        }
      }
    }
  }
  std::vector<bool> top(d, false);
  for (int i = best_start; i < d; ++i) top[i] = true;
  return top;
}

// Naive O(n^2) 2-D DFT; sign = -1 forward, +1 inverse (unnormalised).
inline std::vector<std::complex<double>> NaiveDft2(
    const std::vector<std::complex<double>>& in, int w, int h, int sign) {
  std::vector<std::complex<double>> rows(in.size()), out(in.size());
  const double tau = 2.0 * std::numbers::pi;
  for (int y = 0; y < h; ++y) {
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0;
      for (int x = 0; x < w; ++x) {
        acc += in[size_t(y) * w + x] * std::polar(1.0, sign * tau * u * x / w);
      }
      rows[size_t(y) * w + u] = acc;
    }
  }
  for (int u = 0; u < w; ++u) {
    for (int v = 0; v < h; ++v) {
      std::complex<double> acc = 0;
      for (int y = 0; y < h; ++y) {
        acc += rows[size_t(y) * w + u] * std::polar(1.0, sign * tau * v * y / h);
      }
      out[size_t(v) * w + u] = acc;
    }
  }
  return out;
}

// Spectral residual on a [0, 1] luma plane via the naive DFT.
inline std::vector<double> ReferenceSpectralResidual(const std::vector<double>& img,
                                                     int w, int h) {
  const size_t n = img.size();
  std::vector<std::complex<double>> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = img[i];
  auto f = NaiveDft2(x, w, h, -1);
  const double zero = 1e-8;
  std::vector<std::complex<double>> g(n);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const size_t i = size_t(v) * w + u;
      if (std::abs(f[i]) <= zero) continue;  // spectral zero stays zero
      double m = 0;
      int taps = 0;
      for (int dv = -1; dv <= 1; ++dv)
        for (int du = -1; du <= 1; ++du) {
          const size_t j = size_t((v + dv + h) % h) * w + (u + du + w) % w;
          if (std::abs(f[j]) <= zero) continue;
          m += std::log(std::abs(f[j]));
          ++taps;
        }
      g[i] = std::polar(std::exp(std::log(std::abs(f[i])) - m / taps), std::arg(f[i]));
    }
  }
  auto back = NaiveDft2(g, w, h, +1);
  std::vector<double> sal(n);
  for (size_t i = 0; i < n; ++i) sal[i] = std::norm(back[i] / double(n));
  // 3x3 [1 2 1]^T [1 2 1] / 16, replicated borders, computed directly in 2-D.
  std::vector<double> blurred(n);
  const double k[3] = {0.25, 0.5, 0.25};
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      double acc = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          acc += k[dy + 1] * k[dx + 1] *
                 sal[size_t(std::clamp(y + dy, 0, h - 1)) * w +
                     std::clamp(xx + dx, 0, w - 1)];
      blurred[size_t(y) * w + xx] = acc;
    }
  }
  const auto [lo, hi] = std::minmax_element(blurred.begin(), blurred.end());
  const double mn = *lo, range = *hi - *lo;
  for (double& v : blurred) v = range > 1e-9 * std::abs(*hi) ? (v - mn) / range : 0.0;
  return blurred;
}

}  // namespace vsum::testing

#endif  // VSUM_TESTS_ORACLES_HPP_
