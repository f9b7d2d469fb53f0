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

// Reference transcoder for YUV4MPEG2 (.y4m) files.
//
//   vsum-transcode probe <in>                      key=value metadata
//   vsum-transcode decode <in>                     RGB24 frames on stdout
//   vsum-transcode encode <out> <w> <h> <fps>      RGB24 frames from stdin
//
// Input accepts 4:4:4, 4:2:0 and mono planes; output is always 4:4:4.
// Colour conversion is BT.601 limited range.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace {

struct Header {
  int width = 0;
  int height = 0;
  long fps_num = 0;
  long fps_den = 1;
  enum Chroma { k444, k420, kMono } chroma = k420;

  size_t FrameBytes() const {
    const size_t luma = static_cast<size_t>(width) * height;
    switch (chroma) {
      case k444: return luma * 3;
      case kMono: return luma;
      case k420: {
        const size_t cw = (width + 1) / 2, ch = (height + 1) / 2;
        return luma + 2 * cw * ch;
      }
    }
    return 0;
  }
};

[[noreturn]] void Die(const std::string& message) {
  std::fprintf(stderr, "vsum-transcode: %s\n", message.c_str());
  std::exit(1);
}

bool ReadLine(std::FILE* f, std::string& line) {
  line.clear();
  for (;;) {
    const int c = std::fgetc(f);
    if (c == EOF) return !line.empty();
    if (c == '\n') return true;
    line += static_cast<char>(c);
    if (line.size() > 4096) Die("header line too long");
  }
}

Header ParseHeader(std::FILE* f) {
  std::string line;
  if (!ReadLine(f, line) || line.rfind("YUV4MPEG2", 0) != 0) Die("not a YUV4MPEG2 stream");
  Header h;
  size_t pos = 9;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    size_t end = line.find(' ', pos);
    if (end == std::string::npos) end = line.size();
    const std::string tok = line.substr(pos, end - pos);
    pos = end;
    if (tok.empty()) continue;
    const std::string val = tok.substr(1);
    switch (tok[0]) {
      case 'W': h.width = std::atoi(val.c_str()); break;
      case 'H': h.height = std::atoi(val.c_str()); break;
      case 'F':
        if (std::sscanf(val.c_str(), "%ld:%ld", &h.fps_num, &h.fps_den) != 2) {
          Die("bad frame rate " + val);
        }
        break;
      case 'C':
        if (val.rfind("444", 0) == 0) {
          h.chroma = Header::k444;
        } else if (val.rfind("420", 0) == 0) {
          h.chroma = Header::k420;
        } else if (val.rfind("mono", 0) == 0) {
          h.chroma = Header::kMono;
        } else {
          Die("unsupported colour space " + val);
        }
        break;
      default: break;
    }
  }
  if (h.width <= 0 || h.height <= 0) Die("missing frame size");
  if (h.fps_num <= 0 || h.fps_den <= 0) Die("missing frame rate");
  return h;
}

// Returns false at a clean end of stream.
bool ReadFrame(std::FILE* f, const Header& h, std::vector<uint8_t>& planes, long index) {
  std::string line;
  if (!ReadLine(f, line)) return false;
  if (line.rfind("FRAME", 0) != 0) Die("bad frame marker at frame " + std::to_string(index));
  planes.resize(h.FrameBytes());
  if (std::fread(planes.data(), 1, planes.size(), f) != planes.size()) {
    Die("truncated frame " + std::to_string(index));
  }
  return true;
}

uint8_t Clamp8(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void ToRgb(const Header& h, const std::vector<uint8_t>& planes, std::vector<uint8_t>& rgb) {
  const int w = h.width, ht = h.height;
  const size_t luma = static_cast<size_t>(w) * ht;
  const int cw = (w + 1) / 2;
  rgb.resize(luma * 3);
  for (int y = 0; y < ht; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      double cb = 128, cr = 128;
      if (h.chroma == Header::k444) {
        cb = planes[luma + i];
        cr = planes[2 * luma + i];
      } else if (h.chroma == Header::k420) {
        const size_t ci = static_cast<size_t>(y / 2) * cw + x / 2;
        const size_t csize = static_cast<size_t>(cw) * ((ht + 1) / 2);
        cb = planes[luma + ci];
        cr = planes[luma + csize + ci];
      }
      const double yy = (planes[i] - 16.0) * (255.0 / 219.0);
      const double u = (cb - 128.0) * (255.0 / 224.0);
      const double v = (cr - 128.0) * (255.0 / 224.0);
      uint8_t* p = rgb.data() + i * 3;
      p[0] = Clamp8(yy + 1.402 * v);
      p[1] = Clamp8(yy - 0.344136 * u - 0.714136 * v);
      p[2] = Clamp8(yy + 1.772 * u);
    }
  }
}

void FromRgb(int w, int h, const std::vector<uint8_t>& rgb, std::vector<uint8_t>& planes) {
  const size_t luma = static_cast<size_t>(w) * h;
  planes.resize(luma * 3);
  for (size_t i = 0; i < luma; ++i) {
    const double r = rgb[i * 3], g = rgb[i * 3 + 1], b = rgb[i * 3 + 2];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    planes[i] = Clamp8(16.0 + y * (219.0 / 255.0));
    planes[luma + i] = Clamp8(128.0 + (b - y) / 1.772 * (224.0 / 255.0));
    planes[2 * luma + i] = Clamp8(128.0 + (r - y) / 1.402 * (224.0 / 255.0));
  }
}

std::FILE* OpenInput(const char* path) {
  std::FILE* f = std::fopen(path, "rb");
  if (!f) Die(std::string("cannot open ") + path + ": " + std::strerror(errno));
  static std::vector<char> buf(1 << 20);
  std::setvbuf(f, buf.data(), _IOFBF, buf.size());
  return f;
}

int Probe(const char* path) {
  std::FILE* f = OpenInput(path);
  const Header h = ParseHeader(f);
  std::vector<uint8_t> planes;
  long frames = 0;
  while (ReadFrame(f, h, planes, frames)) ++frames;
  std::fclose(f);
  std::printf("width=%d\nheight=%d\nr_frame_rate=%ld/%ld\nnb_frames=%ld\nduration=%.6f\n",
              h.width, h.height, h.fps_num, h.fps_den, frames,
              static_cast<double>(frames) * h.fps_den / h.fps_num);
  return 0;
}

int Decode(const char* path) {
  std::FILE* f = OpenInput(path);
  const Header h = ParseHeader(f);
  std::vector<uint8_t> planes, rgb;
  for (long i = 0; ReadFrame(f, h, planes, i); ++i) {
    ToRgb(h, planes, rgb);
    if (std::fwrite(rgb.data(), 1, rgb.size(), stdout) != rgb.size()) {
      // Reader went away; not an error for us.
      std::fclose(f);
      return 0;
    }
  }
  std::fclose(f);
  std::fflush(stdout);
  return 0;
}

int Encode(const char* path, int w, int h, const char* fps) {
  long num = 0, den = 1;
  if (std::sscanf(fps, "%ld/%ld", &num, &den) < 1 || num <= 0 || den <= 0) {
    Die(std::string("bad fps ") + fps);
  }
  if (w <= 0 || h <= 0) Die("bad frame size");
  std::FILE* out = std::fopen(path, "wb");
  if (!out) Die(std::string("cannot create ") + path + ": " + std::strerror(errno));
  std::fprintf(out, "YUV4MPEG2 W%d H%d F%ld:%ld Ip A1:1 C444\n", w, h, num, den);
  const size_t frame_bytes = static_cast<size_t>(w) * h * 3;
  std::vector<uint8_t> rgb(frame_bytes), planes;
  for (long i = 0;; ++i) {
    const size_t got = std::fread(rgb.data(), 1, frame_bytes, stdin);
    if (got == 0) break;
    if (got != frame_bytes) Die("truncated input frame " + std::to_string(i));
    FromRgb(w, h, rgb, planes);
    std::fputs("FRAME\n", out);
    if (std::fwrite(planes.data(), 1, planes.size(), out) != planes.size()) {
      Die(std::string("write failed: ") + std::strerror(errno));
    }
  }
  if (std::fclose(out) != 0) Die(std::string("close failed: ") + std::strerror(errno));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cmd = argc > 1 ? argv[1] : "";
  if (cmd == "probe" && argc == 3) return Probe(argv[2]);
  if (cmd == "decode" && argc == 3) return Decode(argv[2]);
  if (cmd == "encode" && argc == 6) {
    return Encode(argv[2], std::atoi(argv[3]), std::atoi(argv[4]), argv[5]);
  }
  std::fprintf(stderr,
               "usage: vsum-transcode probe <in>\n"
               "       vsum-transcode decode <in>\n"
               "       vsum-transcode encode <out> <width> <height> <fps>\n");
  return 2;
}
