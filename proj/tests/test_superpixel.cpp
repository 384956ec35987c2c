#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "fgsal/error.hpp"
#include "fgsal/image.hpp"
#include "fgsal/superpixel.hpp"
#include "test_util.hpp"

using namespace fgsal;

namespace {

// 4-connected flood fill size from (sx, sy) within one label.
int flood_size(const Image<std::int32_t>& labels, int sx, int sy,
               std::vector<std::uint8_t>& seen) {
  const int w = labels.width(), h = labels.height();
  const std::int32_t lbl = labels.at(sx, sy);
  std::vector<std::pair<int, int>> stack{{sx, sy}};
  seen[sy * w + sx] = 1;
  int count = 0;
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    ++count;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int nx = x + dx[d], ny = y + dy[d];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      if (seen[ny * w + nx] || labels.at(nx, ny) != lbl) continue;
      seen[ny * w + nx] = 1;
      stack.emplace_back(nx, ny);
    }
  }
  return count;
}

void check_partition_and_connectivity(const Segmentation& seg) {
  const auto& labels = seg.labels;
  std::vector<int> counts(seg.region_count, 0);
  for (const std::int32_t l : labels) {
    REQUIRE(l >= 0);
    REQUIRE(l < seg.region_count);
    ++counts[l];
  }
  for (int i = 0; i < seg.region_count; ++i) CHECK(counts[i] >= 1);

  // every label's pixels form one 4-connected component
  std::vector<std::uint8_t> seen(labels.width() * labels.height(), 0);
  std::vector<int> component_size(seg.region_count, -1);
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) {
      if (seen[y * labels.width() + x]) continue;
      const std::int32_t l = labels.at(x, y);
      REQUIRE(component_size[l] == -1);  // second component of l would fail here
      component_size[l] = flood_size(labels, x, y, seen);
    }
  for (int i = 0; i < seg.region_count; ++i) CHECK(component_size[i] == counts[i]);
}

}  // namespace

TEST_CASE("uniform image segments into near-square grid cells", "[superpixel]") {
  const LabImage lab = rgb_to_lab(testutil::const_image(80, 80, {120, 120, 120}));
  const Segmentation seg = slic_segment(lab, 16, 20.0);
  REQUIRE(seg.region_count == 16);
  std::vector<int> counts(16, 0);
  for (const std::int32_t l : seg.labels) ++counts[l];
  for (const int c : counts) {
    CHECK(c >= 300);  // ~400 each, grid Voronoi cells
    CHECK(c <= 500);
  }
  check_partition_and_connectivity(seg);
}

TEST_CASE("target region count out of range throws", "[superpixel]") {
  const LabImage lab = rgb_to_lab(testutil::const_image(64, 64, {9, 9, 9}));
  CHECK_THROWS_AS(slic_segment(lab, 1000000, 20.0), ParamError);
  CHECK_THROWS_AS(slic_segment(lab, 15, 20.0), ParamError);
  CHECK_THROWS_AS(slic_segment(lab, 64, 0.0), ParamError);
  CHECK_THROWS_AS(slic_segment(lab, 64, -1.0), ParamError);
  CHECK_NOTHROW(slic_segment(lab, 16, 20.0));
  CHECK_NOTHROW(slic_segment(lab, 64 * 64 / 16, 20.0));
}

TEST_CASE("strong color boundary is respected", "[superpixel]") {
  // left half black, right half white; no region may straddle the split
  RgbImage img(64, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 64; ++x)
      img.at(x, y) = x < 32 ? Rgb8{0, 0, 0} : Rgb8{255, 255, 255};
  const Segmentation seg = slic_segment(rgb_to_lab(img), 16, 20.0);

  std::vector<int> side(seg.region_count, -1);  // 0 = left, 1 = right
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 64; ++x) {
      const int s = x < 32 ? 0 : 1;
      const std::int32_t l = seg.labels.at(x, y);
      if (side[l] == -1) side[l] = s;
      CHECK(side[l] == s);
    }
}

TEST_CASE("random image segmentation satisfies the partition contract",
          "[superpixel]") {
  const LabImage lab = rgb_to_lab(testutil::random_image(64, 48, 42));
  const Segmentation seg = slic_segment(lab, 50, 20.0);
  check_partition_and_connectivity(seg);

  // orphan suppression: no region below the merge threshold S^2/4
  const double step = std::sqrt(64.0 * 48.0 / 50.0);
  const int min_size = std::max(1, static_cast<int>(step * step / 4.0));
  std::vector<int> counts(seg.region_count, 0);
  for (const std::int32_t l : seg.labels) ++counts[l];
  for (const int c : counts) CHECK(c >= min_size);
}

TEST_CASE("segmentation is deterministic", "[superpixel]") {
  const LabImage lab = rgb_to_lab(testutil::random_image(48, 40, 1234));
  const Segmentation a = slic_segment(lab, 24, 15.0);
  const Segmentation b = slic_segment(lab, 24, 15.0);
  REQUIRE(a.region_count == b.region_count);
  CHECK(a.labels == b.labels);
}

TEST_CASE("region stats on trivial segmentations", "[superpixel]") {
  // single-region constant image
  LabImage lab(10, 6, LabPix{50, 0, 0});
  const auto seg1 = testutil::make_seg(10, 6, 1, [](int, int) { return 0; });
  const auto stats1 = region_stats(lab, seg1);
  REQUIRE(stats1.size() == 1);
  CHECK(stats1[0].pixel_count == 60);
  CHECK(stats1[0].mean_l == Catch::Approx(50.0));
  CHECK(stats1[0].mean_a == Catch::Approx(0.0).margin(1e-12));
  CHECK(stats1[0].centroid_x == Catch::Approx(4.5));
  CHECK(stats1[0].centroid_y == Catch::Approx(2.5));

  // 2x1, one pixel per region
  LabImage two(2, 1);
  two.at(0, 0) = {10, 1, 2};
  two.at(1, 0) = {90, -3, 4};
  const auto seg2 = testutil::make_seg(2, 1, 2, [](int x, int) { return x; });
  const auto stats2 = region_stats(two, seg2);
  REQUIRE(stats2.size() == 2);
  CHECK(stats2[0].pixel_count == 1);
  CHECK(stats2[1].pixel_count == 1);
  CHECK(stats2[0].centroid_x == Catch::Approx(0.0));
  CHECK(stats2[1].centroid_x == Catch::Approx(1.0));
  CHECK(stats2[1].mean_l == Catch::Approx(90.0));
}

TEST_CASE("region stats equal direct masked averages", "[superpixel]") {
  const LabImage lab = rgb_to_lab(testutil::random_image(8, 8, 7));
  const auto seg =
      testutil::make_seg(8, 8, 2, [](int x, int y) { return (x + y) % 2; });
  const auto stats = region_stats(lab, seg);

  for (int r = 0; r < 2; ++r) {
    double sl = 0, sa = 0, sb = 0, sx = 0, sy = 0;
    int n = 0;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        if ((x + y) % 2 == r) {
          sl += lab.at(x, y).l;
          sa += lab.at(x, y).a;
          sb += lab.at(x, y).b;
          sx += x;
          sy += y;
          ++n;
        }
    CHECK(stats[r].pixel_count == n);
    CHECK(stats[r].mean_l == Catch::Approx(sl / n).margin(1e-9));
    CHECK(stats[r].mean_a == Catch::Approx(sa / n).margin(1e-9));
    CHECK(stats[r].mean_b == Catch::Approx(sb / n).margin(1e-9));
    CHECK(stats[r].centroid_x == Catch::Approx(sx / n).margin(1e-9));
    CHECK(stats[r].centroid_y == Catch::Approx(sy / n).margin(1e-9));
  }
}

TEST_CASE("region stats rejects mismatched dimensions", "[superpixel]") {
  LabImage lab(8, 8, LabPix{1, 2, 3});
  const auto seg = testutil::make_seg(8, 9, 1, [](int, int) { return 0; });
  CHECK_THROWS_AS(region_stats(lab, seg), DimensionMismatch);
}
