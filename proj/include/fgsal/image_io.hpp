#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "fgsal/error.hpp"
#include "fgsal/image.hpp"

namespace fgsal {

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read failed: " + path);
  return bytes;
}

inline cv::Mat decode(const std::string& path, int flags) {
  std::vector<unsigned char> bytes = read_file_bytes(path);
  cv::Mat m = cv::imdecode(bytes, flags);
  if (m.empty()) throw FormatError("cannot decode image: " + path);
  return m;
}

}  // namespace detail

/// Decodes a PNG or JPEG file. EXIF orientation tags are ignored so the
/// decode is a pure function of the pixel data. Images below 8x8 are
/// rejected.
inline RgbImage load_image(const std::string& path) {
  cv::Mat m = detail::decode(path, cv::IMREAD_COLOR | cv::IMREAD_IGNORE_ORIENTATION);
  if (m.cols < 8 || m.rows < 8) throw FormatError("image below 8x8 minimum: " + path);

  RgbImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) {
      img.at(x, y) = Rgb8{row[x][2], row[x][1], row[x][0]};  // BGR -> RGB
    }
  }
  return img;
}

/// Loads a ground-truth mask; gray values are binarized at 128 (>=128 -> 1).
inline GroundTruthMask load_mask(const std::string& path) {
  cv::Mat m =
      detail::decode(path, cv::IMREAD_GRAYSCALE | cv::IMREAD_IGNORE_ORIENTATION);
  GroundTruthMask mask(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) mask.at(x, y) = row[x] >= 128 ? 1 : 0;
  }
  return mask;
}

/// Loads an 8-bit grayscale saliency map back into [0,1].
inline SaliencyMap load_saliency_map(const std::string& path) {
  cv::Mat m =
      detail::decode(path, cv::IMREAD_GRAYSCALE | cv::IMREAD_IGNORE_ORIENTATION);
  SaliencyMap map(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) map.at(x, y) = row[x] / 255.0f;
  }
  return map;
}

/// Writes values in [0,1] as an 8-bit grayscale PNG, value = round(255*v).
inline void save_png_gray8(const SaliencyMap& map, const std::string& path) {
  cv::Mat m(map.height(), map.width(), CV_8UC1);
  for (int y = 0; y < map.height(); ++y) {
    std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < map.width(); ++x) {
      const double v = std::clamp(double(map.at(x, y)), 0.0, 1.0);
      row[x] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  if (!cv::imwrite(path, m)) throw IoError("cannot write PNG: " + path);
}

/// Writes a label map as 16-bit grayscale PNG (one gray level per region).
inline void save_png_gray16(const Image<std::int32_t>& labels, const std::string& path) {
  cv::Mat m(labels.height(), labels.width(), CV_16UC1);
  for (int y = 0; y < labels.height(); ++y) {
    std::uint16_t* row = m.ptr<std::uint16_t>(y);
    for (int x = 0; x < labels.width(); ++x)
      row[x] = static_cast<std::uint16_t>(std::clamp(labels.at(x, y), 0, 65535));
  }
  if (!cv::imwrite(path, m)) throw IoError("cannot write PNG: " + path);
}

/// Min-max normalizes arbitrary non-negative values and writes 8-bit PNG.
inline void save_png_gray8_normalized(const Image<double>& values, const std::string& path) {
  double lo = values.at(0, 0), hi = values.at(0, 0);
  for (const double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  SaliencyMap map(values.width(), values.height());
  for (int y = 0; y < values.height(); ++y)
    for (int x = 0; x < values.width(); ++x)
      map.at(x, y) =
          span > 0 ? static_cast<float>((values.at(x, y) - lo) / span) : 0.f;
  save_png_gray8(map, path);
}

}  // namespace fgsal
