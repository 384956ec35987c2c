// Generates the committed test fixture set: 12 synthetic 400x300 images in
// the style of the MSRA benchmark (one dominant object on a simpler
// background, object clear of the image border) plus exact binary masks.
// Fully deterministic: fixed seeds, analytic shape rasterization.
//
//   gen_fixtures <outdir>   -> <outdir>/images/imgNN.png, <outdir>/masks/imgNN.png

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace {

constexpr int W = 400, H = 300;

using InsideFn = std::function<bool(double, double)>;

InsideFn disk(double cx, double cy, double r) {
  return [=](double x, double y) {
    return (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
  };
}

InsideFn ellipse(double cx, double cy, double a, double b, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return [=](double x, double y) {
    const double u = c * (x - cx) + s * (y - cy);
    const double v = -s * (x - cx) + c * (y - cy);
    return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
  };
}

InsideFn rounded_rect(double cx, double cy, double hw, double hh, double rc) {
  return [=](double x, double y) {
    const double qx = std::abs(x - cx) - hw + rc;
    const double qy = std::abs(y - cy) - hh + rc;
    if (qx <= 0 && qy <= 0) return true;
    const double px = std::max(qx, 0.0), py = std::max(qy, 0.0);
    return px * px + py * py <= rc * rc;
  };
}

InsideFn triangle(double x0, double y0, double x1, double y1, double x2, double y2) {
  auto cross = [](double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
  };
  return [=](double x, double y) {
    const double d0 = cross(x1 - x0, y1 - y0, x - x0, y - y0);
    const double d1 = cross(x2 - x1, y2 - y1, x - x1, y - y1);
    const double d2 = cross(x0 - x2, y0 - y2, x - x2, y - y2);
    const bool neg = d0 < 0 || d1 < 0 || d2 < 0;
    const bool pos = d0 > 0 || d1 > 0 || d2 > 0;
    return !(neg && pos);
  };
}

InsideFn unite(InsideFn a, InsideFn b) {
  return [=](double x, double y) { return a(x, y) || b(x, y); };
}

struct Scene {
  cv::Vec3b bg, fg;       // RGB
  InsideFn object;
  int gradient_axis;      // 0 = horizontal ramp, 1 = vertical
  double gradient_amp;
};

void render(const Scene& sc, unsigned seed, const std::string& img_path,
            const std::string& mask_path) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 4.0);

  cv::Mat img(H, W, CV_8UC3);
  cv::Mat mask(H, W, CV_8UC1);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const bool in = sc.object(x, y);
      const cv::Vec3b base = in ? sc.fg : sc.bg;
      const double t = sc.gradient_axis == 0 ? (double(x) / (W - 1) - 0.5)
                                             : (double(y) / (H - 1) - 0.5);
      const double ramp = in ? 0.0 : 2.0 * t * sc.gradient_amp;
      cv::Vec3b px;
      for (int c = 0; c < 3; ++c) {
        const double v = base[c] + ramp + noise(rng);
        px[c] = static_cast<uchar>(std::clamp(std::lround(v), 0L, 255L));
      }
      // OpenCV stores BGR
      img.at<cv::Vec3b>(y, x) = {px[2], px[1], px[0]};
      mask.at<uchar>(y, x) = in ? 255 : 0;
    }
  }
  if (!cv::imwrite(img_path, img) || !cv::imwrite(mask_path, mask)) {
    std::cerr << "failed to write " << img_path << '\n';
    std::exit(1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <outdir>\n";
    return 2;
  }
  const std::filesystem::path out = argv[1];
  std::filesystem::create_directories(out / "images");
  std::filesystem::create_directories(out / "masks");

  const Scene scenes[12] = {
      // dark/mid backgrounds, bright or contrasting objects
      {{42, 72, 38}, {205, 45, 45}, disk(195, 145, 78), 0, 10},
      {{92, 102, 122}, {222, 202, 56}, ellipse(210, 160, 95, 58, 0.5), 1, 12},
      {{112, 82, 52}, {58, 182, 192}, rounded_rect(185, 140, 75, 55, 18), 0, 8},
      {{62, 62, 66}, {232, 132, 34}, triangle(200, 60, 105, 225, 300, 230), 1, 10},
      {{102, 112, 62}, {142, 62, 162}, unite(disk(160, 140, 55), disk(235, 165, 62)),
       0, 12},
      {{32, 42, 82}, {228, 172, 172}, ellipse(175, 150, 60, 92, -0.3), 1, 8},
      {{32, 112, 112}, {236, 236, 226}, disk(230, 130, 64), 0, 10},
      {{122, 42, 42}, {152, 222, 122}, rounded_rect(215, 155, 88, 42, 14), 1, 12},
      // bright backgrounds, dark objects
      {{192, 172, 132}, {32, 52, 142}, disk(180, 160, 72), 0, 10},
      {{182, 187, 192}, {32, 92, 42}, ellipse(205, 140, 82, 50, 1.1), 1, 10},
      {{72, 122, 182}, {82, 52, 32}, triangle(140, 70, 90, 215, 290, 190), 0, 8},
      {{47, 52, 57}, {192, 222, 62},
       unite(rounded_rect(190, 150, 60, 45, 12), disk(255, 130, 40)), 1, 10},
  };

  for (int i = 0; i < 12; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "img%02d.png", i + 1);
    render(scenes[i], 1000u + i, (out / "images" / name).string(),
           (out / "masks" / name).string());
  }
  std::cout << "wrote 12 fixtures to " << out << '\n';
  return 0;
}
