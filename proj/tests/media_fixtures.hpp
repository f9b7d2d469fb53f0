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

// Clip writers and scratch directories for tests that talk to a transcoder.

#ifndef VSUM_TESTS_MEDIA_FIXTURES_HPP_
#define VSUM_TESTS_MEDIA_FIXTURES_HPP_

#include <stdlib.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>

#include "vsum/error.hpp"
#include "vsum/media_io.hpp"

namespace vsum::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "vsum-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw Error(ErrorCode::kIoError, "mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline TranscoderConfig TestTranscoder(const std::filesystem::path& work_dir) {
  TranscoderConfig config = TranscoderConfig::Reference(VSUM_TRANSCODE_PATH);
  config.work_dir = work_dir;
  return config;
}

using FrameFn = std::function<Frame(int64_t index)>;

inline void WriteClip(const TranscoderConfig& config, const std::filesystem::path& path,
                      int w, int h, Rational fps, int64_t frames, const FrameFn& make) {
  FrameWriter writer(config, path, w, h, fps);
  for (int64_t i = 0; i < frames; ++i) writer.Write(make(i).rgb);
  writer.Finish();
}

inline double Psnr(const Frame& a, const Frame& b) {
  double se = 0.0;
  for (size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = double(a.rgb[i]) - double(b.rgb[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.rgb.size());
  if (mse == 0.0) return 99.0;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace vsum::testing

#endif  // VSUM_TESTS_MEDIA_FIXTURES_HPP_
