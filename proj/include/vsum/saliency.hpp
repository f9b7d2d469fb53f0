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

#ifndef VSUM_SALIENCY_HPP_
#define VSUM_SALIENCY_HPP_

#include <fftw3.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "vsum/error.hpp"
#include "vsum/image.hpp"

namespace vsum {

// Per-frame visual attention map; intensities row-major in [0, 1]. The map
// may be smaller than the frame; consumers rescale coordinates.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> intensities;

  SaliencyMap() = default;
  SaliencyMap(int w, int h)
      : width(w), height(h), intensities(size_t(w) * h, 0.0) {}

  double& at(int x, int y) { return intensities[size_t(y) * width + x]; }
  double at(int x, int y) const { return intensities[size_t(y) * width + x]; }
  double sum() const {
    double s = 0.0;
    for (double v : intensities) s += v;
    return s;
  }
  bool operator==(const SaliencyMap&) const = default;
};

// Random-access reader for the SALM container:
//   "SALM" | u32le frame_count | u32le width | u32le height |
//   frame_count * width * height bytes (frame-major, row-major).
class SalmReader {
 public:
  explicit SalmReader(const std::filesystem::path& path)
      : in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    std::array<unsigned char, 16> header{};
    in_.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in_.gcount() != 16 || std::memcmp(header.data(), "SALM", 4) != 0) {
      throw Error(ErrorCode::kParseError, path.string() + " is not a SALM file");
    }
    auto u32 = [&](size_t off) {
      return uint32_t(header[off]) | uint32_t(header[off + 1]) << 8 |
             uint32_t(header[off + 2]) << 16 | uint32_t(header[off + 3]) << 24;
    };
    frame_count_ = u32(4);
    width_ = u32(8);
    height_ = u32(12);
    if (width_ == 0 || height_ == 0) {
      throw Error(ErrorCode::kParseError, "SALM map dimensions must be > 0");
    }
    in_.seekg(0, std::ios::end);
    const auto size = static_cast<uint64_t>(in_.tellg());
    const uint64_t expected = 16 + uint64_t(frame_count_) * width_ * height_;
    if (size != expected) {
      throw Error(ErrorCode::kParseError,
                  "SALM payload is " + std::to_string(size - 16) +
                      " bytes, header promises " + std::to_string(expected - 16));
    }
  }

  uint32_t frame_count() const { return frame_count_; }
  uint32_t width() const { return width_; }
  uint32_t height() const { return height_; }

  SaliencyMap Read(uint32_t i) {
    if (i >= frame_count_) {
      throw Error(ErrorCode::kCountMismatch,
                  "SALM map " + std::to_string(i) + " requested, file has " +
                      std::to_string(frame_count_));
    }
    const size_t plane = size_t(width_) * height_;
    buf_.resize(plane);
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(16 + uint64_t(i) * plane));
    in_.read(reinterpret_cast<char*>(buf_.data()),
             static_cast<std::streamsize>(plane));
    if (static_cast<size_t>(in_.gcount()) != plane) {
      throw Error(ErrorCode::kParseError, "short SALM read");
    }
    SaliencyMap map(static_cast<int>(width_), static_cast<int>(height_));
    for (size_t k = 0; k < plane; ++k) map.intensities[k] = buf_[k] / 255.0;
    return map;
  }

 private:
  std::ifstream in_;
  uint32_t frame_count_ = 0;
  uint32_t width_ = 0;
  uint32_t height_ = 0;
  std::vector<unsigned char> buf_;
};

inline void WriteSalm(const std::filesystem::path& path,
                      const std::vector<SaliencyMap>& maps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  const uint32_t w = maps.empty() ? 1 : uint32_t(maps[0].width);
  const uint32_t h = maps.empty() ? 1 : uint32_t(maps[0].height);
  auto put = [&](uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  out.write("SALM", 4);
  put(static_cast<uint32_t>(maps.size()));
  put(w);
  put(h);
  for (const SaliencyMap& m : maps) {
    if (uint32_t(m.width) != w || uint32_t(m.height) != h) {
      throw Error(ErrorCode::kInvalidArgument, "SALM maps must share dimensions");
    }
    for (double v : m.intensities) {
      out.put(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
  }
}

inline SaliencyMap ReadGrayPng(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::kParseError,
                path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kParseError, path.string() + ": " + image.message);
  }
  SaliencyMap map(static_cast<int>(image.width), static_cast<int>(image.height));
  for (size_t k = 0; k < map.intensities.size(); ++k) {
    map.intensities[k] = buffer[k] / 255.0;
  }
  return map;
}

// PNG files of a directory in name order (zero-padded numbering sorts).
inline std::vector<std::filesystem::path> ListPngMaps(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Loads exactly `expected_frames` maps from a SALM file or a PNG directory.
inline std::vector<SaliencyMap> ImportSaliency(const std::filesystem::path& path,
                                               int64_t expected_frames) {
  std::vector<SaliencyMap> maps;
  if (std::filesystem::is_directory(path)) {
    const auto files = ListPngMaps(path);
    if (static_cast<int64_t>(files.size()) != expected_frames) {
      throw Error(ErrorCode::kCountMismatch,
                  std::to_string(files.size()) + " saliency maps, expected " +
                      std::to_string(expected_frames));
    }
    for (const auto& f : files) maps.push_back(ReadGrayPng(f));
    return maps;
  }
  SalmReader reader(path);
  if (static_cast<int64_t>(reader.frame_count()) != expected_frames) {
    throw Error(ErrorCode::kCountMismatch,
                std::to_string(reader.frame_count()) +
                    " saliency maps, expected " + std::to_string(expected_frames));
  }
  maps.reserve(reader.frame_count());
  for (uint32_t i = 0; i < reader.frame_count(); ++i) maps.push_back(reader.Read(i));
  return maps;
}

// Uniform access to imported maps regardless of container.
class SaliencySource {
 public:
  SaliencySource(const std::filesystem::path& path, int64_t expected_frames) {
    if (std::filesystem::is_directory(path)) {
      pngs_ = ListPngMaps(path);
      count_ = static_cast<int64_t>(pngs_.size());
    } else {
      salm_ = std::make_unique<SalmReader>(path);
      count_ = salm_->frame_count();
    }
    if (count_ != expected_frames) {
      throw Error(ErrorCode::kCountMismatch,
                  std::to_string(count_) + " saliency maps, expected " +
                      std::to_string(expected_frames));
    }
  }

  int64_t size() const { return count_; }

  SaliencyMap Read(int64_t frame) {
    if (frame < 0 || frame >= count_) {
      throw Error(ErrorCode::kCountMismatch, "no saliency map for frame " +
                                                 std::to_string(frame));
    }
    if (salm_) return salm_->Read(static_cast<uint32_t>(frame));
    return ReadGrayPng(pngs_[static_cast<size_t>(frame)]);
  }

 private:
  std::unique_ptr<SalmReader> salm_;
  std::vector<std::filesystem::path> pngs_;
  int64_t count_ = 0;
};

namespace internal {

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and executed through the thread-safe new-array interface.
class DftPlans {
 public:
  struct Pair {
    fftw_plan forward;
    fftw_plan backward;
  };

  static const Pair& Get(int w, int h) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, Pair> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({w, h});
    if (it != plans.end()) return it->second;
    const size_t n = size_t(w) * h;
    auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    Pair p{fftw_plan_dft_2d(h, w, a, b, FFTW_FORWARD, FFTW_ESTIMATE),
           fftw_plan_dft_2d(h, w, a, b, FFTW_BACKWARD, FFTW_ESTIMATE)};
    fftw_free(a);
    fftw_free(b);
    return plans.emplace(std::make_pair(w, h), p).first->second;
  }
};

struct FftwBuffer {
  explicit FftwBuffer(size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

// Amplitudes at or below this are treated as exact spectral zeros.
inline constexpr double kSpectralZero = 1e-8;

// 3x3 binomial blur with replicated borders.
inline void GaussianBlur3(std::vector<double>& img, int w, int h) {
  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
      tmp[size_t(y) * w + x] = 0.25 * img[size_t(y) * w + xl] +
                               0.5 * img[size_t(y) * w + x] +
                               0.25 * img[size_t(y) * w + xr];
    }
  }
  for (int y = 0; y < h; ++y) {
    const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      img[size_t(y) * w + x] = 0.25 * tmp[size_t(yu) * w + x] +
                               0.5 * tmp[size_t(y) * w + x] +
                               0.25 * tmp[size_t(yd) * w + x];
    }
  }
}

inline void NormalizeMinMax(std::vector<double>& values) {
  if (values.empty()) return;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo, range = *hi - *lo;
  // Rounding residue of a flat field counts as all-equal.
  const bool flat = !(range > 1e-9 * std::abs(*hi));
  for (double& v : values) v = flat ? 0.0 : (v - min) / range;
}

}  // namespace internal

// Spectral-residual saliency of a luma plane already at map resolution,
// values in [0, 1].
inline SaliencyMap SpectralResidualFromGray(const GrayImage& small) {
  const int w = small.width, h = small.height;
  const size_t n = size_t(w) * h;
  const auto& plans = internal::DftPlans::Get(w, h);
  internal::FftwBuffer spatial(n), spectrum(n);
  for (size_t i = 0; i < n; ++i) {
    spatial.data[i][0] = small.data[i];
    spatial.data[i][1] = 0.0;
  }
  fftw_execute_dft(plans.forward, spatial.data, spectrum.data);

  std::vector<double> log_amp(n), phase(n);
  std::vector<bool> zero(n);
  for (size_t i = 0; i < n; ++i) {
    const double re = spectrum.data[i][0], im = spectrum.data[i][1];
    const double amp = std::hypot(re, im);
    zero[i] = amp <= internal::kSpectralZero;
    log_amp[i] = std::log(std::max(amp, internal::kSpectralZero));
    phase[i] = std::atan2(im, re);
  }
  // Residual against the circular 3x3 mean of the log spectrum. Exact zeros
  // have no finite log amplitude: they are left out of the mean and stay zero.
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double mean = 0.0;
      int taps = 0;
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          const size_t j = size_t((v + dv + h) % h) * w + (u + du + w) % w;
          if (zero[j]) continue;
          mean += log_amp[j];
          ++taps;
        }
      }
      const size_t i = size_t(v) * w + u;
      if (zero[i]) {
        spectrum.data[i][0] = spectrum.data[i][1] = 0.0;
        continue;
      }
      const double mag = std::exp(log_amp[i] - mean / taps);
      spectrum.data[i][0] = mag * std::cos(phase[i]);
      spectrum.data[i][1] = mag * std::sin(phase[i]);
    }
  }
  fftw_execute_dft(plans.backward, spectrum.data, spatial.data);

  SaliencyMap map(w, h);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    const double re = spatial.data[i][0] * scale, im = spatial.data[i][1] * scale;
    map.intensities[i] = re * re + im * im;
  }
  internal::GaussianBlur3(map.intensities, w, h);
  internal::NormalizeMinMax(map.intensities);
  return map;
}

inline GrayImage SaliencyInput(const Frame& frame, int map_w, int map_h) {
  GrayImage small = ResizeArea(ToGray(frame), map_w, map_h);
  for (double& v : small.data) v /= 255.0;
  return small;
}

inline SaliencyMap SpectralResidual(const Frame& frame, int map_w = 64,
                                    int map_h = 64) {
  if (map_w < 1 || map_h < 1) {
    throw Error(ErrorCode::kInvalidArgument, "saliency map must be non-empty");
  }
  return SpectralResidualFromGray(SaliencyInput(frame, map_w, map_h));
}

}  // namespace vsum

#endif  // VSUM_SALIENCY_HPP_
