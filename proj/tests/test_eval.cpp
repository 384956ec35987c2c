#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "fgsal/error.hpp"
#include "fgsal/eval.hpp"
#include "fgsal/image.hpp"

using namespace fgsal;

namespace {

SaliencyMap random_map(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> d(0.0f, 1.0f);
  SaliencyMap s(w, h);
  for (float& v : s) v = d(rng);
  return s;
}

GroundTruthMask random_mask(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(0, 1);
  GroundTruthMask g(w, h);
  for (auto& v : g) v = static_cast<std::uint8_t>(d(rng));
  return g;
}

}  // namespace

TEST_CASE("mae hand cases", "[eval]") {
  GroundTruthMask g(2, 2);
  g.at(0, 0) = 0;
  g.at(1, 0) = 1;
  g.at(0, 1) = 1;
  g.at(1, 1) = 0;

  SaliencyMap same(2, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) same.at(x, y) = g.at(x, y);
  CHECK(mae(same, g) == 0.0);

  SaliencyMap s(2, 2);
  s.at(0, 0) = 0.2f;
  s.at(1, 0) = 0.8f;
  s.at(0, 1) = 0.5f;
  s.at(1, 1) = 0.0f;
  CHECK(mae(s, g) == Catch::Approx(0.225).margin(1e-6));

  SaliencyMap zeros(3, 3, 0.0f);
  GroundTruthMask ones(3, 3, 1);
  CHECK(mae(zeros, ones) == 1.0);

  SaliencyMap wrong(4, 3, 0.0f);
  CHECK_THROWS_AS(mae(wrong, ones), DimensionMismatch);
}

TEST_CASE("mae is symmetric under complement", "[eval]") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const SaliencyMap s = random_map(9, 7, seed);
    const GroundTruthMask g = random_mask(9, 7, seed + 100);
    SaliencyMap sc(9, 7);
    GroundTruthMask gc(9, 7);
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 9; ++x) {
        sc.at(x, y) = 1.0f - s.at(x, y);
        gc.at(x, y) = static_cast<std::uint8_t>(1 - g.at(x, y));
      }
    CHECK(mae(s, g) == Catch::Approx(mae(sc, gc)).margin(1e-12));
  }
}

TEST_CASE("mae of a binary map is the misclassification rate", "[eval]") {
  const GroundTruthMask g = random_mask(8, 8, 3);
  const GroundTruthMask pred = random_mask(8, 8, 4);
  SaliencyMap s(8, 8);
  int wrong = 0;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      s.at(x, y) = pred.at(x, y);
      if (pred.at(x, y) != g.at(x, y)) ++wrong;
    }
  CHECK(mae(s, g) == Catch::Approx(double(wrong) / 64.0).margin(1e-12));
}

TEST_CASE("mae matches a brute-force loop", "[eval]") {
  for (unsigned seed = 50; seed < 60; ++seed) {
    const SaliencyMap s = random_map(11, 6, seed);
    const GroundTruthMask g = random_mask(11, 6, seed + 7);
    double sum = 0;
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 11; ++x) sum += std::abs(double(s.at(x, y)) - g.at(x, y));
    CHECK(mae(s, g) == Catch::Approx(sum / 66.0).margin(1e-12));
  }
}

TEST_CASE("perfect map gives perfect precision and recall", "[eval]") {
  GroundTruthMask g = random_mask(16, 12, 9);
  g.at(0, 0) = 1;  // ensure nonempty
  SaliencyMap s(16, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) s.at(x, y) = g.at(x, y);

  const PrCurve pr = pr_curve(s, g);
  for (int t = 1; t <= 254; ++t) {
    CHECK(pr.precision[t] == 1.0);
    CHECK(pr.recall[t] == 1.0);
  }
  CHECK(pr.recall[255] == 0.0);
  CHECK(pr.precision[255] == 1.0);  // empty selection convention
}

TEST_CASE("threshold zero selects every positive pixel", "[eval]") {
  SaliencyMap s(10, 10, 0.4f);  // strictly positive everywhere
  GroundTruthMask g(10, 10, 0);
  for (int x = 0; x < 10; ++x) g.at(x, 0) = 1;
  const PrCurve pr = pr_curve(s, g);
  CHECK(pr.recall[0] == 1.0);
  CHECK(pr.precision[0] == Catch::Approx(10.0 / 100.0));
}

TEST_CASE("pr curve matches brute-force counting", "[eval]") {
  for (unsigned seed = 70; seed < 76; ++seed) {
    const SaliencyMap s = random_map(4, 4, seed);
    GroundTruthMask g = random_mask(4, 4, seed + 13);
    g.at(2, 2) = 1;
    const PrCurve pr = pr_curve(s, g);

    int gt_total = 0;
    for (const auto v : g) gt_total += v;
    for (int t = 0; t < 256; ++t) {
      int pos = 0, tp = 0;
      for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
          const double v = 255.0 * std::clamp(double(s.at(x, y)), 0.0, 1.0);
          if (v > t) {
            ++pos;
            if (g.at(x, y)) ++tp;
          }
        }
      const double want_p = pos > 0 ? double(tp) / pos : 1.0;
      const double want_r = double(tp) / gt_total;
      CHECK(pr.precision[t] == want_p);
      CHECK(pr.recall[t] == want_r);
    }
  }
}

TEST_CASE("recall never increases with the threshold", "[eval]") {
  for (unsigned seed = 80; seed < 85; ++seed) {
    const SaliencyMap s = random_map(13, 9, seed);
    GroundTruthMask g = random_mask(13, 9, seed + 3);
    g.at(1, 1) = 1;
    const PrCurve pr = pr_curve(s, g);
    for (int t = 1; t < 256; ++t) CHECK(pr.recall[t] <= pr.recall[t - 1]);
  }
}

TEST_CASE("empty ground truth is rejected", "[eval]") {
  const SaliencyMap s = random_map(8, 8, 1);
  GroundTruthMask g(8, 8, 0);
  CHECK_THROWS_AS(pr_curve(s, g), EmptyGroundTruth);
}

TEST_CASE("aggregate averages per-image metrics", "[eval]") {
  ImageMetrics a;
  a.name = "a";
  a.mae = 0.1;
  a.pr.precision.fill(1.0);
  a.pr.recall.fill(0.5);
  ImageMetrics b;
  b.name = "b";
  b.mae = 0.3;
  b.pr.precision.fill(0.5);
  b.pr.recall.fill(1.0);

  const DatasetReport single = aggregate({a});
  CHECK(single.mean_mae == Catch::Approx(0.1));
  CHECK(single.mean_pr.precision[10] == Catch::Approx(1.0));

  const DatasetReport both = aggregate({a, b});
  CHECK(both.mean_mae == Catch::Approx(0.2));
  CHECK(both.mean_pr.precision[100] == Catch::Approx(0.75));
  CHECK(both.mean_pr.recall[100] == Catch::Approx(0.75));
  REQUIRE(both.images.size() == 2);
  CHECK(both.images[0].name == "a");

  CHECK_THROWS_AS(aggregate({}), ParamError);
}
