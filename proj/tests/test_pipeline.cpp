#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fgsal/eval.hpp"
#include "fgsal/pipeline.hpp"
#include "test_util.hpp"

using namespace fgsal;
namespace fs = std::filesystem;

namespace {

std::vector<char> read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::vector<char>(std::istreambuf_iterator<char>(f),
                           std::istreambuf_iterator<char>());
}

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.superpixels = 100;
  return cfg;
}

}  // namespace

TEST_CASE("bright disk on dark background is detected", "[pipeline]") {
  const int w = 120, h = 90;
  const RgbImage img =
      testutil::disk_image(w, h, {25, 35, 30}, {220, 80, 60}, 60, 45, 24);
  const GroundTruthMask gt = testutil::disk_mask(w, h, 60, 45, 24);

  const PipelineResult r = run_pipeline(img, small_config());
  REQUIRE(r.map.width() == w);
  REQUIRE(r.map.height() == h);
  CHECK_FALSE(r.degenerate_foreground);

  double inside = 0, outside = 0;
  int n_in = 0, n_out = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (gt.at(x, y)) {
        inside += r.map.at(x, y);
        ++n_in;
      } else {
        outside += r.map.at(x, y);
        ++n_out;
      }
    }
  inside /= n_in;
  outside /= n_out;
  INFO("mean saliency inside " << inside << " outside " << outside);
  CHECK(inside > 2.0 * outside);
  CHECK(mae(r.map, gt) < 0.25);
}

TEST_CASE("constant image degrades gracefully", "[pipeline]") {
  const RgbImage img = testutil::const_image(64, 48, {90, 90, 90});
  const PipelineResult r = run_pipeline(img, small_config());
  CHECK(r.degenerate_foreground);
  REQUIRE(r.map.width() == 64);
  REQUIRE(r.map.height() == 48);
  for (const float v : r.map) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("pipeline is deterministic in memory and on disk", "[pipeline]") {
  const RgbImage img =
      testutil::disk_image(100, 80, {40, 60, 50}, {210, 190, 40}, 50, 40, 20);
  const PipelineResult a = run_pipeline(img, small_config());
  const PipelineResult b = run_pipeline(img, small_config());
  CHECK(a.segmentation.labels == b.segmentation.labels);
  CHECK(a.map == b.map);

  // byte-identical PNG across two single-image runs
  const auto dir = testutil::temp_dir("pipe_det");
  const std::string src = (dir / "in.png").string();
  testutil::write_rgb_png(img, src);
  const auto r1 = run_single(src, "", (dir / "o1").string(), small_config());
  const auto r2 = run_single(src, "", (dir / "o2").string(), small_config());
  CHECK(read_bytes(r1.map_path) == read_bytes(r2.map_path));
}

TEST_CASE("scoring thread count does not change the result", "[pipeline]") {
  const RgbImage img =
      testutil::disk_image(96, 72, {30, 30, 80}, {220, 220, 200}, 48, 36, 18);
  const PipelineResult serial = run_pipeline(img, small_config(), 1);
  const PipelineResult threaded = run_pipeline(img, small_config(), 8);
  CHECK(serial.map == threaded.map);
  CHECK(serial.segmentation.labels == threaded.segmentation.labels);
}

TEST_CASE("config json round trip", "[pipeline]") {
  PipelineConfig cfg;
  cfg.superpixels = 123;
  cfg.compactness = 17.5;
  cfg.log_sigma = 2.2;
  cfg.proposals = 42;
  cfg.nms_iou = 0.55;
  cfg.gaussian_divisor = 3.0;
  cfg.epsilon = 1e-5;
  cfg.sigma_clr = 8.0;
  cfg.sigma_bndcon = 1.5;
  cfg.mu = 0.2;
  cfg.area_normalize = false;
  cfg.normalize_map = false;
  cfg.dump_weights = true;
  cfg.threads = 3;
  cfg.max_side = 256;

  nlohmann::ordered_json j = cfg;
  const PipelineConfig back = j.get<PipelineConfig>();
  CHECK(back.superpixels == cfg.superpixels);
  CHECK(back.compactness == cfg.compactness);
  CHECK(back.log_sigma == cfg.log_sigma);
  CHECK(back.proposals == cfg.proposals);
  CHECK(back.nms_iou == cfg.nms_iou);
  CHECK(back.gaussian_divisor == cfg.gaussian_divisor);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.sigma_clr == cfg.sigma_clr);
  CHECK(back.sigma_bndcon == cfg.sigma_bndcon);
  CHECK(back.mu == cfg.mu);
  CHECK(back.area_normalize == cfg.area_normalize);
  CHECK(back.normalize_map == cfg.normalize_map);
  CHECK(back.dump_weights == cfg.dump_weights);
  CHECK(back.threads == cfg.threads);
  CHECK(back.max_side == cfg.max_side);

  // partial json fills the rest with defaults
  const auto partial = nlohmann::ordered_json::parse(R"({"superpixels": 42})")
                           .get<PipelineConfig>();
  CHECK(partial.superpixels == 42);
  CHECK(partial.compactness == PipelineConfig{}.compactness);
  CHECK(partial.threads == PipelineConfig{}.threads);
}

TEST_CASE("run_single writes map and optional dumps", "[pipeline]") {
  const auto dir = testutil::temp_dir("single");
  const RgbImage img =
      testutil::disk_image(80, 64, {50, 40, 40}, {60, 200, 90}, 40, 32, 16);
  const std::string src = (dir / "photo.png").string();
  testutil::write_rgb_png(img, src);

  PipelineConfig cfg = small_config();
  cfg.dump_superpixels = true;
  cfg.dump_proposals = true;
  cfg.dump_objectness = true;
  cfg.dump_weights = true;

  const auto out = (dir / "out").string();
  const SingleResult r = run_single(src, "", out, cfg);
  CHECK(fs::exists(fs::path(out) / "photo_saliency.png"));
  CHECK(fs::exists(fs::path(out) / "photo_superpixels.png"));
  CHECK(fs::exists(fs::path(out) / "photo_proposals.csv"));
  CHECK(fs::exists(fs::path(out) / "photo_objectness.png"));
  CHECK(fs::exists(fs::path(out) / "photo_weights.csv"));
  CHECK(fs::exists(fs::path(out) / "photo_weights.png"));
  CHECK_FALSE(r.have_mae);

  // proposals csv header
  std::ifstream csv(fs::path(out) / "photo_proposals.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x,y,w,h,score");

  // with a ground-truth mask the mae comes back
  const GroundTruthMask gt = testutil::disk_mask(80, 64, 40, 32, 16);
  const std::string gt_path = (dir / "gt.png").string();
  testutil::write_mask_png(gt, gt_path);
  const SingleResult rm = run_single(src, gt_path, out, small_config());
  CHECK(rm.have_mae);
  CHECK(rm.mae_value >= 0.0);
  CHECK(rm.mae_value <= 1.0);
}

TEST_CASE("run_batch writes maps metrics and config", "[pipeline]") {
  const auto dir = testutil::temp_dir("batch");
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");

  const RgbImage a =
      testutil::disk_image(80, 60, {30, 40, 35}, {210, 60, 50}, 40, 30, 15);
  const RgbImage b =
      testutil::disk_image(80, 60, {60, 60, 90}, {230, 210, 60}, 36, 28, 18);
  testutil::write_rgb_png(a, (dir / "images" / "one.png").string());
  testutil::write_rgb_png(b, (dir / "images" / "two.png").string());
  // mask only for "one": "two" must be excluded from metrics but still mapped
  testutil::write_mask_png(testutil::disk_mask(80, 60, 40, 30, 15),
                           (dir / "masks" / "one.png").string());

  const auto out = dir / "out";
  const BatchResult r = run_batch((dir / "images").string(),
                                  (dir / "masks").string(), out.string(),
                                  small_config());
  CHECK(r.total == 2);
  CHECK(r.failed == 0);
  CHECK(r.with_metrics == 1);
  CHECK(fs::exists(out / "one_saliency.png"));
  CHECK(fs::exists(out / "two_saliency.png"));
  CHECK(fs::exists(out / "config_used.json"));
  CHECK(fs::exists(out / "metrics.json"));
  CHECK(fs::exists(out / "pr_curve.csv"));

  // metrics content: one entry plus the mean
  std::ifstream mf(out / "metrics.json");
  nlohmann::json mj;
  mf >> mj;
  REQUIRE(mj["images"].size() == 1);
  CHECK(mj["images"][0]["name"] == "one");
  CHECK(mj["mean_mae"].get<double>() == mj["images"][0]["mae"].get<double>());

  // config_used round-trips to the config that ran
  std::ifstream cf(out / "config_used.json");
  nlohmann::ordered_json cj;
  cf >> cj;
  const PipelineConfig used = cj.get<PipelineConfig>();
  CHECK(used.superpixels == 100);

  // pr_curve.csv: header + 256 rows
  std::ifstream prf(out / "pr_curve.csv");
  std::string line;
  std::getline(prf, line);
  CHECK(line == "threshold,mean_precision,mean_recall");
  int rows = 0;
  while (std::getline(prf, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 256);
}

TEST_CASE("run_batch without masks writes no metrics", "[pipeline]") {
  const auto dir = testutil::temp_dir("batch_nomask");
  fs::create_directories(dir / "images");
  testutil::write_rgb_png(
      testutil::disk_image(64, 48, {30, 30, 30}, {220, 100, 40}, 32, 24, 12),
      (dir / "images" / "solo.png").string());
  const auto out = dir / "out";
  const BatchResult r =
      run_batch((dir / "images").string(), "", out.string(), small_config());
  CHECK(r.with_metrics == 0);
  CHECK(fs::exists(out / "solo_saliency.png"));
  CHECK_FALSE(fs::exists(out / "metrics.json"));
}

TEST_CASE("empty image directory is a usage error", "[pipeline]") {
  const auto dir = testutil::temp_dir("batch_empty");
  fs::create_directories(dir / "images");
  CHECK_THROWS_AS(
      run_batch((dir / "images").string(), "", (dir / "out").string(),
                PipelineConfig{}),
      ParamError);
}

TEST_CASE("max_side downscales before processing", "[pipeline]") {
  const RgbImage img =
      testutil::disk_image(80, 60, {20, 50, 45}, {200, 200, 70}, 40, 30, 14);
  PipelineConfig cfg = small_config();
  cfg.superpixels = 32;
  cfg.max_side = 40;
  const PipelineResult r = run_pipeline(img, cfg);
  CHECK(r.map.width() == 40);
  CHECK(r.map.height() == 30);
}

TEST_CASE("mask with foreign size is excluded from metrics", "[pipeline]") {
  const auto dir = testutil::temp_dir("sizemismatch");
  const RgbImage img =
      testutil::disk_image(64, 48, {20, 50, 45}, {200, 200, 70}, 32, 24, 12);
  testutil::write_rgb_png(img, (dir / "a.png").string());
  testutil::write_mask_png(testutil::disk_mask(64, 48, 32, 24, 12),
                           (dir / "gt.png").string());

  PipelineConfig cfg = small_config();
  cfg.superpixels = 32;
  cfg.max_side = 32;  // map becomes 32x24 while the mask stays 64x48

  const SingleResult r = run_single((dir / "a.png").string(),
                                    (dir / "gt.png").string(),
                                    (dir / "out").string(), cfg);
  CHECK_FALSE(r.have_mae);
  CHECK(std::filesystem::exists(r.map_path));  // the map is still produced

  cfg.max_side = 0;
  const SingleResult ok = run_single((dir / "a.png").string(),
                                     (dir / "gt.png").string(),
                                     (dir / "out2").string(), cfg);
  CHECK(ok.have_mae);
  std::filesystem::remove_all(dir);
}
