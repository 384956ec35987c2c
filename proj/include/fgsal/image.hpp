#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fgsal/error.hpp"

namespace fgsal {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
};

inline bool operator==(Rgb8 lhs, Rgb8 rhs) {
  return lhs.r == rhs.r && lhs.g == rhs.g && lhs.b == rhs.b;
}

/// CIELAB triple. l in [0,100], a/b roughly [-128,127] for sRGB inputs.
struct LabPix {
  float l = 0.f, a = 0.f, b = 0.f;
};

/// Row-major 2D grid of pixels. No implicit bounds checks on at().
template <typename T>
class Image {
 public:
  Image() = default;

  Image(int width, int height, T fill = T{})
      : w_(width),
        h_(height),
        px_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width <= 0 || height <= 0) throw ParamError("image dimensions must be positive");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  std::size_t size() const { return px_.size(); }
  bool empty() const { return px_.empty(); }

  T& at(int x, int y) { return px_[idx(x, y)]; }
  const T& at(int x, int y) const { return px_[idx(x, y)]; }

  T* data() { return px_.data(); }
  const T* data() const { return px_.data(); }

  auto begin() { return px_.begin(); }
  auto end() { return px_.end(); }
  auto begin() const { return px_.begin(); }
  auto end() const { return px_.end(); }

  template <typename U>
  bool same_size(const Image<U>& other) const {
    return w_ == other.width() && h_ == other.height();
  }

  friend bool operator==(const Image& lhs, const Image& rhs) {
    return lhs.w_ == rhs.w_ && lhs.h_ == rhs.h_ && lhs.px_ == rhs.px_;
  }

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) +
           static_cast<std::size_t>(x);
  }

  int w_ = 0, h_ = 0;
  std::vector<T> px_;
};

using RgbImage = Image<Rgb8>;
using LabImage = Image<LabPix>;
using NormedGradientMap = Image<float>;
using SaliencyMap = Image<float>;
using GroundTruthMask = Image<std::uint8_t>;
using PixelObjectnessMap = Image<double>;

namespace detail {

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double kEps = 216.0 / 24389.0;
  constexpr double kKappa = 24389.0 / 27.0;
  return t > kEps ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

}  // namespace detail

/// sRGB to CIELAB under the D65 white point.
inline LabPix rgb_to_lab(Rgb8 p) {
  const double r = detail::srgb_to_linear(p.r / 255.0);
  const double g = detail::srgb_to_linear(p.g / 255.0);
  const double b = detail::srgb_to_linear(p.b / 255.0);

  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  const double fx = detail::lab_f(x / 0.95047);
  const double fy = detail::lab_f(y / 1.00000);
  const double fz = detail::lab_f(z / 1.08883);

  LabPix out;
  out.l = static_cast<float>(116.0 * fy - 16.0);
  out.a = static_cast<float>(500.0 * (fx - fy));
  out.b = static_cast<float>(200.0 * (fy - fz));
  return out;
}

inline LabImage rgb_to_lab(const RgbImage& img) {
  LabImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = rgb_to_lab(img.at(x, y));
  return out;
}

inline double lab_distance(const LabPix& p, const LabPix& q) {
  const double dl = double(p.l) - q.l;
  const double da = double(p.a) - q.a;
  const double db = double(p.b) - q.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

/// ITU-R BT.601 luma.
inline double bt601_luma(Rgb8 p) { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

inline Image<float> grayscale(const RgbImage& img) {
  Image<float> out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.at(x, y) = static_cast<float>(bt601_luma(img.at(x, y)));
  return out;
}

/// Gradient-magnitude map min(|gx|+|gy|, 255) of the BT.601 luma, with gx/gy
/// taken as central differences and borders replicated.
inline NormedGradientMap normed_gradient(const RgbImage& img) {
  const int w = img.width(), h = img.height();
  Image<float> gray = grayscale(img);
  NormedGradientMap out(w, h);
  for (int y = 0; y < h; ++y) {
    const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
      const double gx = 0.5 * (double(gray.at(xr, y)) - gray.at(xl, y));
      const double gy = 0.5 * (double(gray.at(x, yd)) - gray.at(x, yu));
      out.at(x, y) = static_cast<float>(std::min(std::abs(gx) + std::abs(gy), 255.0));
    }
  }
  return out;
}

/// Bilinear resample with pixel-center alignment.
inline Image<float> resize_bilinear(const Image<float>& src, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw ParamError("resize target must be positive");
  if (out_w == src.width() && out_h == src.height()) return src;

  Image<float> dst(out_w, out_h);
  const double sx = double(src.width()) / out_w;
  const double sy = double(src.height()) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(src.height() - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(src.width() - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const double wx = fx - x0;
      const double top = (1.0 - wx) * src.at(x0, y0) + wx * src.at(x1, y0);
      const double bot = (1.0 - wx) * src.at(x0, y1) + wx * src.at(x1, y1);
      dst.at(x, y) = static_cast<float>((1.0 - wy) * top + wy * bot);
    }
  }
  return dst;
}

}  // namespace fgsal
