#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fgsal/connectivity.hpp"
#include "fgsal/error.hpp"
#include "fgsal/eval.hpp"
#include "fgsal/image.hpp"
#include "fgsal/image_io.hpp"
#include "fgsal/objectness.hpp"
#include "fgsal/optimize.hpp"
#include "fgsal/parallel.hpp"
#include "fgsal/superpixel.hpp"

namespace fgsal {

/// Every knob of the end-to-end pipeline. Defaults reproduce the reference
/// configuration; JSON round-trips through config_used.json.
struct PipelineConfig {
  int superpixels = 300;
  double compactness = 20.0;
  double log_sigma = 1.4;
  int proposals = 100;
  double nms_iou = 0.7;
  double gaussian_divisor = 4.0;
  double epsilon = 1e-6;
  double sigma_clr = 10.0;
  double sigma_bndcon = 1.0;
  double mu = 0.1;
  bool area_normalize = true;
  bool normalize_map = true;
  bool dump_superpixels = false;
  bool dump_proposals = false;
  bool dump_objectness = false;
  bool dump_weights = false;
  int threads = 0;   // 0 = number of logical processors
  int max_side = 0;  // 0 = never resize
};

inline void to_json(nlohmann::ordered_json& j, const PipelineConfig& c) {
  j = nlohmann::ordered_json{{"superpixels", c.superpixels},
                             {"compactness", c.compactness},
                             {"log_sigma", c.log_sigma},
                             {"proposals", c.proposals},
                             {"nms_iou", c.nms_iou},
                             {"gaussian_divisor", c.gaussian_divisor},
                             {"epsilon", c.epsilon},
                             {"sigma_clr", c.sigma_clr},
                             {"sigma_bndcon", c.sigma_bndcon},
                             {"mu", c.mu},
                             {"area_normalize", c.area_normalize},
                             {"normalize_map", c.normalize_map},
                             {"dump_superpixels", c.dump_superpixels},
                             {"dump_proposals", c.dump_proposals},
                             {"dump_objectness", c.dump_objectness},
                             {"dump_weights", c.dump_weights},
                             {"threads", c.threads},
                             {"max_side", c.max_side}};
}

inline void from_json(const nlohmann::ordered_json& j, PipelineConfig& c) {
  const PipelineConfig d;
  c.superpixels = j.value("superpixels", d.superpixels);
  c.compactness = j.value("compactness", d.compactness);
  c.log_sigma = j.value("log_sigma", d.log_sigma);
  c.proposals = j.value("proposals", d.proposals);
  c.nms_iou = j.value("nms_iou", d.nms_iou);
  c.gaussian_divisor = j.value("gaussian_divisor", d.gaussian_divisor);
  c.epsilon = j.value("epsilon", d.epsilon);
  c.sigma_clr = j.value("sigma_clr", d.sigma_clr);
  c.sigma_bndcon = j.value("sigma_bndcon", d.sigma_bndcon);
  c.mu = j.value("mu", d.mu);
  c.area_normalize = j.value("area_normalize", d.area_normalize);
  c.normalize_map = j.value("normalize_map", d.normalize_map);
  c.dump_superpixels = j.value("dump_superpixels", d.dump_superpixels);
  c.dump_proposals = j.value("dump_proposals", d.dump_proposals);
  c.dump_objectness = j.value("dump_objectness", d.dump_objectness);
  c.dump_weights = j.value("dump_weights", d.dump_weights);
  c.threads = j.value("threads", d.threads);
  c.max_side = j.value("max_side", d.max_side);
}

/// Everything the pipeline produces for one image, kept around so debug
/// dumps and tests can inspect intermediate stages.
struct PipelineResult {
  Segmentation segmentation;
  std::vector<RegionStats> stats;
  ProposalSet proposals;  // post-NMS
  PixelObjectnessMap pixel_obj;
  std::vector<double> region_obj;
  std::vector<std::uint8_t> is_foreground;
  std::vector<double> fg_connectivity;
  WeightVectors weights;
  std::vector<double> labels;  // per-region saliency in [0,1]
  SaliencyMap map;
  bool degenerate_foreground = false;
};

namespace detail {

inline RgbImage resize_rgb(const RgbImage& src, int out_w, int out_h) {
  Image<float> r(src.width(), src.height()), g(src.width(), src.height()),
      b(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const Rgb8 p = src.at(x, y);
      r.at(x, y) = p.r;
      g.at(x, y) = p.g;
      b.at(x, y) = p.b;
    }
  }
  const Image<float> rr = resize_bilinear(r, out_w, out_h);
  const Image<float> rg = resize_bilinear(g, out_w, out_h);
  const Image<float> rb = resize_bilinear(b, out_w, out_h);
  RgbImage out(out_w, out_h);
  auto q = [](float v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x)
      out.at(x, y) = {q(rr.at(x, y)), q(rg.at(x, y)), q(rb.at(x, y))};
  return out;
}

inline std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Runs the full chain on one decoded image:
///   Lab + SLIC -> region graph -> objectness proposals -> region scores ->
///   adaptive foreground mask -> connectivity weights -> quadratic solve ->
///   rendered map.
/// A degenerate foreground estimate (no usable threshold, e.g. constant
/// color) downgrades to zero foreground weights so the background and
/// smoothness terms still produce a map; the flag records that it happened.
inline PipelineResult run_pipeline(const RgbImage& input, const PipelineConfig& cfg,
                                   int scoring_threads = 1) {
  RgbImage resized;
  const RgbImage* img = &input;
  if (cfg.max_side > 0 && std::max(input.width(), input.height()) > cfg.max_side) {
    const double scale =
        double(cfg.max_side) / std::max(input.width(), input.height());
    const int w = std::max(8, static_cast<int>(std::lround(input.width() * scale)));
    const int h = std::max(8, static_cast<int>(std::lround(input.height() * scale)));
    resized = detail::resize_rgb(input, w, h);
    img = &resized;
  }

  PipelineResult res;
  const LabImage lab = rgb_to_lab(*img);

  int target = cfg.superpixels;
  const int max_target = img->width() * img->height() / 16;
  if (max_target >= 16) target = std::clamp(target, 16, max_target);
  res.segmentation = slic_segment(lab, target, cfg.compactness);
  res.stats = region_stats(lab, res.segmentation);

  const RegionGraph graph = build_graph(res.segmentation, res.stats);

  const NormedGradientMap ng = normed_gradient(*img);
  const ScoringFilter filter = make_log_filter(cfg.log_sigma);
  const auto sizes = quantized_window_sizes(img->width(), img->height());
  auto scored = score_windows(ng, filter, sizes, scoring_threads);
  res.proposals = nms_select(std::move(scored), cfg.proposals, cfg.nms_iou);

  res.pixel_obj = pixel_objectness(res.proposals, img->width(), img->height(),
                                   cfg.gaussian_divisor);
  res.region_obj = region_objectness(res.pixel_obj, res.segmentation);

  const int n = res.segmentation.region_count;
  res.weights.foreground.assign(n, 0.0);
  res.fg_connectivity.assign(n, 0.0);
  const auto dist = all_pairs_distances(graph, scoring_threads);
  try {
    ForegroundMask fgmask =
        adaptive_threshold(res.region_obj, res.segmentation, cfg.area_normalize);
    res.is_foreground = std::move(fgmask.is_foreground);
    res.fg_connectivity =
        foreground_connectivity(graph, res.is_foreground, dist, cfg.epsilon);
    res.weights.foreground = foreground_weights(res.fg_connectivity, cfg.epsilon);
  } catch (const DegenerateForeground&) {
    res.degenerate_foreground = true;
  } catch (const DegenerateMask&) {
    res.degenerate_foreground = true;
  }

  res.weights.background =
      background_weights(graph, dist, cfg.sigma_clr, cfg.sigma_bndcon);
  res.weights.smoothness = smoothness_weights(graph, cfg.sigma_clr, cfg.mu);

  res.labels = solve_saliency(graph, res.weights);
  res.map = render_map(res.labels, res.segmentation, cfg.normalize_map);
  return res;
}

namespace detail {

inline void write_dumps(const PipelineResult& r, const PipelineConfig& cfg,
                        const std::filesystem::path& out_dir,
                        const std::string& stem) {
  if (cfg.dump_superpixels)
    save_png_gray16(r.segmentation.labels, (out_dir / (stem + "_superpixels.png")).string());
  if (cfg.dump_objectness) {
    save_png_gray8_normalized(r.pixel_obj, (out_dir / (stem + "_objectness.png")).string());
  }
  if (cfg.dump_proposals) {
    std::ofstream csv(out_dir / (stem + "_proposals.csv"));
    if (!csv) throw IoError("cannot write proposals csv for " + stem);
    csv << "x,y,w,h,score\n";
    for (const ProposalWindow& p : r.proposals)
      csv << p.x << ',' << p.y << ',' << p.w << ',' << p.h << ','
          << fmt_double(p.score) << '\n';
  }
  if (cfg.dump_weights) {
    std::ofstream csv(out_dir / (stem + "_weights.csv"));
    if (!csv) throw IoError("cannot write weights csv for " + stem);
    csv << "region,objectness,fg,wfg,wbg\n";
    for (int i = 0; i < r.segmentation.region_count; ++i)
      csv << i << ',' << fmt_double(r.region_obj[i]) << ','
          << fmt_double(r.fg_connectivity[i]) << ','
          << fmt_double(r.weights.foreground[i]) << ','
          << fmt_double(r.weights.background[i]) << '\n';
    const SaliencyMap wmap = render_map(r.weights.foreground, r.segmentation, true);
    save_png_gray8(wmap, (out_dir / (stem + "_weights.png")).string());
  }
}

inline std::vector<std::filesystem::path> list_images(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" ||
        ext == ".ppm" || ext == ".pgm")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace detail

/// Single-image driver: writes `<stem>_saliency.png` (plus any debug dumps)
/// into out_dir and returns the MAE when a ground-truth mask is supplied.
struct SingleResult {
  PipelineResult pipeline;
  std::string map_path;
  bool have_mae = false;
  double mae_value = 0;
};

inline SingleResult run_single(const std::string& image_path,
                               const std::string& gt_path,
                               const std::string& out_dir,
                               const PipelineConfig& cfg) {
  const int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();
  SingleResult out;
  try {
    const RgbImage img = load_image(image_path);
    out.pipeline = run_pipeline(img, cfg, threads);
  } catch (const Error& e) {
    throw Error(image_path + ": " + e.what());
  }
  if (out.pipeline.degenerate_foreground)
    std::cerr << "warning: " << image_path
              << ": degenerate foreground estimate, relying on background cue\n";

  std::filesystem::create_directories(out_dir);
  const std::string stem = std::filesystem::path(image_path).stem().string();
  out.map_path = (std::filesystem::path(out_dir) / (stem + "_saliency.png")).string();
  save_png_gray8(out.pipeline.map, out.map_path);
  detail::write_dumps(out.pipeline, cfg, out_dir, stem);

  if (!gt_path.empty()) {
    const GroundTruthMask gt = load_mask(gt_path);
    if (gt.width() != out.pipeline.map.width() ||
        gt.height() != out.pipeline.map.height()) {
      // A resolution mismatch (e.g. a map computed under --max-side) would
      // make the score incomparable, so skip it rather than resample.
      std::cerr << "warning: " << gt_path
                << ": size differs from the saliency map, metrics skipped\n";
    } else {
      out.mae_value = mae(out.pipeline.map, gt);
      out.have_mae = true;
    }
  }
  return out;
}

/// Batch outcome: how many images were processed, what failed, and the
/// metrics over the images that had ground truth.
struct BatchResult {
  int total = 0;
  int failed = 0;
  int with_metrics = 0;
  double mean_seconds = 0;
  DatasetReport report;  // valid iff with_metrics > 0
};

/// Directory driver: runs every image (parallel across images, each pipeline
/// single-threaded), writes maps + dumps, and — for images whose mask is
/// found by filename stem — metrics.json and pr_curve.csv. config_used.json
/// records the exact configuration. Per-image failures are logged and
/// skipped. All artifact bytes are independent of the thread count.
inline BatchResult run_batch(const std::string& image_dir, const std::string& mask_dir,
                             const std::string& out_dir, const PipelineConfig& cfg) {
  const auto images = detail::list_images(image_dir);
  if (images.empty()) throw ParamError("no images found in " + image_dir);

  std::map<std::string, std::filesystem::path> masks;
  if (!mask_dir.empty()) {
    for (const auto& m : detail::list_images(mask_dir))
      masks.emplace(m.stem().string(), m);  // first match per stem wins
  }

  std::filesystem::create_directories(out_dir);
  {
    nlohmann::ordered_json j = cfg;
    std::ofstream f(std::filesystem::path(out_dir) / "config_used.json");
    if (!f) throw IoError("cannot write config_used.json");
    f << j.dump(2) << '\n';
  }

  const int n = static_cast<int>(images.size());
  const int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();

  struct Slot {
    bool ok = false;
    bool has_metrics = false;
    ImageMetrics metrics;
    double seconds = 0;
  };
  std::vector<Slot> slots(n);
  std::mutex log_mutex;

  parallel_for(n, threads, [&](int i) {
    const std::string path = images[i].string();
    const std::string stem = images[i].stem().string();
    Slot& slot = slots[i];
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const RgbImage img = load_image(path);
      PipelineResult r = run_pipeline(img, cfg, /*scoring_threads=*/1);
      const auto t1 = std::chrono::steady_clock::now();
      slot.seconds = std::chrono::duration<double>(t1 - t0).count();

      save_png_gray8(r.map,
                     (std::filesystem::path(out_dir) / (stem + "_saliency.png")).string());
      detail::write_dumps(r, cfg, out_dir, stem);
      slot.ok = true;

      if (r.degenerate_foreground) {
        std::lock_guard<std::mutex> lk(log_mutex);
        std::cerr << "warning: " << path
                  << ": degenerate foreground estimate, relying on background cue\n";
      }

      if (!mask_dir.empty()) {
        const auto it = masks.find(stem);
        if (it == masks.end()) {
          std::lock_guard<std::mutex> lk(log_mutex);
          std::cerr << "warning: no mask for " << stem << ", excluded from metrics\n";
        } else {
          const GroundTruthMask gt = load_mask(it->second.string());
          if (gt.width() != r.map.width() || gt.height() != r.map.height()) {
            std::lock_guard<std::mutex> lk(log_mutex);
            std::cerr << "warning: " << it->second.string()
                      << ": size differs from the saliency map, excluded from "
                         "metrics\n";
          } else {
            slot.metrics.name = stem;
            slot.metrics.mae = mae(r.map, gt);
            slot.metrics.pr = pr_curve(r.map, gt);
            slot.has_metrics = true;
          }
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lk(log_mutex);
      std::cerr << "error: " << path << ": " << e.what() << '\n';
    }
  });

  BatchResult result;
  result.total = n;
  std::vector<ImageMetrics> metrics;
  double time_sum = 0;
  int time_count = 0;
  for (Slot& s : slots) {
    if (!s.ok) {
      ++result.failed;
      continue;
    }
    time_sum += s.seconds;
    ++time_count;
    if (s.has_metrics) metrics.push_back(std::move(s.metrics));
  }
  if (time_count > 0) result.mean_seconds = time_sum / time_count;
  result.with_metrics = static_cast<int>(metrics.size());

  if (!metrics.empty()) {
    result.report = aggregate(std::move(metrics));

    nlohmann::ordered_json j;
    j["mean_mae"] = result.report.mean_mae;
    j["images"] = nlohmann::ordered_json::array();
    for (const ImageMetrics& m : result.report.images)
      j["images"].push_back({{"name", m.name}, {"mae", m.mae}});
    std::ofstream mf(std::filesystem::path(out_dir) / "metrics.json");
    if (!mf) throw IoError("cannot write metrics.json");
    mf << j.dump(2) << '\n';

    std::ofstream cf(std::filesystem::path(out_dir) / "pr_curve.csv");
    if (!cf) throw IoError("cannot write pr_curve.csv");
    cf << "threshold,mean_precision,mean_recall\n";
    for (int t = 0; t < 256; ++t)
      cf << t << ',' << detail::fmt_double(result.report.mean_pr.precision[t]) << ','
         << detail::fmt_double(result.report.mean_pr.recall[t]) << '\n';
  }

  if (time_count > 0)
    std::cout << "processed " << time_count << '/' << n << " images, mean "
              << result.mean_seconds << " s per image\n";
  return result;
}

/// Metrics-only driver for precomputed maps: pairs `<stem>_saliency.png` (or
/// plain `<stem>.png`) files with masks by stem and aggregates MAE + PR.
inline DatasetReport run_eval(const std::string& map_dir, const std::string& mask_dir) {
  const auto maps = detail::list_images(map_dir);
  if (maps.empty()) throw ParamError("no maps found in " + map_dir);

  std::map<std::string, std::filesystem::path> masks;
  for (const auto& m : detail::list_images(mask_dir))
    masks.emplace(m.stem().string(), m);

  std::vector<ImageMetrics> metrics;
  for (const auto& map_path : maps) {
    std::string stem = map_path.stem().string();
    constexpr std::string_view suffix = "_saliency";
    if (stem.size() > suffix.size() &&
        stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)
      stem.resize(stem.size() - suffix.size());

    const auto it = masks.find(stem);
    if (it == masks.end()) {
      std::cerr << "warning: no mask for " << stem << ", skipped\n";
      continue;
    }
    const SaliencyMap s = load_saliency_map(map_path.string());
    const GroundTruthMask g = load_mask(it->second.string());
    if (g.width() != s.width() || g.height() != s.height()) {
      std::cerr << "warning: " << map_path.string()
                << ": size differs from its mask, skipped\n";
      continue;
    }
    ImageMetrics m;
    m.name = stem;
    m.mae = mae(s, g);
    m.pr = pr_curve(s, g);
    metrics.push_back(std::move(m));
  }
  if (metrics.empty()) throw ParamError("no map/mask pairs matched");
  return aggregate(std::move(metrics));
}

}  // namespace fgsal
