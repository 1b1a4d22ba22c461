// Copyright 2026 The cacp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "cacp/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "cacp/error.h"

namespace cacp {
namespace {

// Reads the next whitespace-delimited header token, skipping # comments.
std::string NextToken(const std::string& buf, size_t& pos) {
  while (pos < buf.size()) {
    if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  const size_t start = pos;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    ++pos;
  }
  return buf.substr(start, pos - start);
}

int ParsePositive(const std::string& tok, const std::string& path) {
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(path + ": bad PNM header field '" + tok + "'");
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0) throw InputError("negative image size");
  if (channels != 1 && channels != 3) {
    throw InputError("images have 1 or 3 channels");
  }
  samples_.assign(static_cast<size_t>(width) * height * channels, fill);
}

void ClampSamples(Image& img) {
  for (double& s : img.samples()) s = std::clamp(s, 0.0, 255.0);
}

Image ReadPnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  const std::string buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  size_t pos = 0;
  const std::string magic = NextToken(buf, pos);
  int channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path + ": only binary P5/P6 files are supported");
  }
  const int width = ParsePositive(NextToken(buf, pos), path);
  const int height = ParsePositive(NextToken(buf, pos), path);
  const int maxval = ParsePositive(NextToken(buf, pos), path);
  if (maxval != 255) throw FormatError(path + ": only maxval 255 is supported");
  ++pos;  // single whitespace byte after maxval

  const size_t count = static_cast<size_t>(width) * height * channels;
  if (buf.size() < pos + count) throw FormatError(path + ": truncated pixel data");
  Image img(width, height, channels);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        img.at(c, y, x) = static_cast<unsigned char>(
            buf[pos + (static_cast<size_t>(y) * width + x) * channels + c]);
      }
    }
  }
  return img;
}

void WritePnm(const std::string& path, const Image& img) {
  if (img.empty()) throw InputError("cannot write an empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << (img.channels() == 1 ? "P5" : "P6") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::string data;
  data.reserve(static_cast<size_t>(img.width()) * img.height() * img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const double v = std::clamp(std::round(img.at(c, y, x)), 0.0, 255.0);
        data.push_back(static_cast<char>(static_cast<unsigned char>(v)));
      }
    }
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace cacp
