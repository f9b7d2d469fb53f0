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

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "vsum/error.hpp"
#include "vsum/media_io.hpp"

namespace vsum {

TranscoderConfig TranscoderConfig::Reference(const std::filesystem::path& tool) {
  TranscoderConfig config;
  config.transcoder_path = tool.string();
  config.probe_template = "{transcoder} probe {input}";
  config.decode_template = "{transcoder} decode {input}";
  config.encode_template = "{transcoder} encode {output} {width} {height} {fps}";
  config.output_extension = "y4m";
  return config;
}

Rational Rational::Parse(const std::string& text) {
  auto fail = [&] {
    return Error(ErrorCode::kParseError, "bad frame rate '" + text + "'");
  };
  Rational r;
  const size_t slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      size_t used = 0;
      r.num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw fail();
      const std::string den = text.substr(slash + 1);
      r.den = std::stoll(den, &used);
      if (used != den.size()) throw fail();
    } else {
      size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) throw fail();
      r.den = 1000;
      r.num = std::llround(v * 1000.0);
    }
  } catch (const std::logic_error&) {
    throw fail();
  }
  if (r.den == 0) throw fail();
  if (r.den < 0) {
    r.den = -r.den;
    r.num = -r.num;
  }
  const int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

}  // namespace vsum
