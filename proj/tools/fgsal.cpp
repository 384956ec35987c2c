// fgsal — foreground-connectivity salient object detection, batch CLI.
//
//   fgsal run  <image> [--gt <mask>] [--out <dir>] [flags]
//   fgsal batch <imgdir> [--gt <maskdir>] --out <dir> [flags]
//   fgsal eval <mapdir> <maskdir>
//
// Flags override --config (JSON mirroring the config fields); FGSAL_THREADS
// overrides the thread count from either source.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fgsal/fgsal.hpp"

namespace {

struct CliOptions {
  fgsal::PipelineConfig cfg;
  std::string config_path;
  bool no_area_norm = false;
  bool no_normalize = false;
};

// Attach config knobs to a subcommand; values set here win over the file.
void add_config_flags(CLI::App* cmd, CliOptions& opts) {
  fgsal::PipelineConfig& cfg = opts.cfg;
  cmd->add_option("--superpixels", cfg.superpixels, "target superpixel count");
  cmd->add_option("--compactness", cfg.compactness, "SLIC compactness");
  cmd->add_option("--log-sigma", cfg.log_sigma, "scoring filter sigma");
  cmd->add_option("--proposals", cfg.proposals, "proposals kept after NMS");
  cmd->add_option("--nms-iou", cfg.nms_iou, "NMS IoU threshold");
  cmd->add_option("--gaussian-divisor", cfg.gaussian_divisor,
                  "objectness spread divisor");
  cmd->add_option("--epsilon", cfg.epsilon, "connectivity epsilon");
  cmd->add_option("--sigma-clr", cfg.sigma_clr, "color sigma");
  cmd->add_option("--sigma-bndcon", cfg.sigma_bndcon, "boundary-connectivity sigma");
  cmd->add_option("--mu", cfg.mu, "smoothness floor");
  cmd->add_flag("--no-area-norm", opts.no_area_norm,
                "threshold raw region sums instead of per-pixel means");
  cmd->add_flag("--no-normalize", opts.no_normalize,
                "skip min-max stretching of the output map");
  cmd->add_flag("--dump-superpixels", cfg.dump_superpixels,
                "write label map as 16-bit PNG");
  cmd->add_flag("--dump-proposals", cfg.dump_proposals,
                "write proposal windows as CSV");
  cmd->add_flag("--dump-objectness", cfg.dump_objectness,
                "write normalized pixel objectness PNG");
  cmd->add_flag("--dump-weights", cfg.dump_weights,
                "write per-region weight CSV + PNG");
  cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  cmd->add_option("--max-side", cfg.max_side,
                  "downscale longer side to this many pixels (0 = never)");
}

// Base values come from --config when given; CLI11 then re-applies any flag
// the user actually passed on top.
fgsal::PipelineConfig resolve_config(const CLI::App* cmd, const CliOptions& opts) {
  const fgsal::PipelineConfig& cli_values = opts.cfg;
  fgsal::PipelineConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream f(opts.config_path);
    if (!f) throw fgsal::IoError("cannot open config file " + opts.config_path);
    nlohmann::ordered_json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw fgsal::FormatError(opts.config_path + ": " + e.what());
    }
    cfg = j.get<fgsal::PipelineConfig>();
  }

  auto passed = [&](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (passed("--superpixels")) cfg.superpixels = cli_values.superpixels;
  if (passed("--compactness")) cfg.compactness = cli_values.compactness;
  if (passed("--log-sigma")) cfg.log_sigma = cli_values.log_sigma;
  if (passed("--proposals")) cfg.proposals = cli_values.proposals;
  if (passed("--nms-iou")) cfg.nms_iou = cli_values.nms_iou;
  if (passed("--gaussian-divisor")) cfg.gaussian_divisor = cli_values.gaussian_divisor;
  if (passed("--epsilon")) cfg.epsilon = cli_values.epsilon;
  if (passed("--sigma-clr")) cfg.sigma_clr = cli_values.sigma_clr;
  if (passed("--sigma-bndcon")) cfg.sigma_bndcon = cli_values.sigma_bndcon;
  if (passed("--mu")) cfg.mu = cli_values.mu;
  if (passed("--no-area-norm")) cfg.area_normalize = false;
  if (passed("--no-normalize")) cfg.normalize_map = false;
  if (passed("--dump-superpixels")) cfg.dump_superpixels = cli_values.dump_superpixels;
  if (passed("--dump-proposals")) cfg.dump_proposals = cli_values.dump_proposals;
  if (passed("--dump-objectness")) cfg.dump_objectness = cli_values.dump_objectness;
  if (passed("--dump-weights")) cfg.dump_weights = cli_values.dump_weights;
  if (passed("--threads")) cfg.threads = cli_values.threads;
  if (passed("--max-side")) cfg.max_side = cli_values.max_side;

  if (const char* env = std::getenv("FGSAL_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw fgsal::ParamError("FGSAL_THREADS is not an integer");
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foreground-connectivity salient object detection"};
  app.require_subcommand(1);

  std::string image, gt, out = ".", config_path;
  CliOptions run_opts, batch_opts;

  CLI::App* run = app.add_subcommand("run", "process a single image");
  run->add_option("image", image, "input image")->required();
  run->add_option("--gt", gt, "ground-truth mask");
  run->add_option("--out", out, "output directory");
  run->add_option("--config", run_opts.config_path, "JSON config file");
  add_config_flags(run, run_opts);

  std::string img_dir, mask_dir, batch_out;
  CLI::App* batch = app.add_subcommand("batch", "process a directory");
  batch->add_option("imgdir", img_dir, "image directory")->required();
  batch->add_option("--gt", mask_dir, "mask directory");
  batch->add_option("--out", batch_out, "output directory")->required();
  batch->add_option("--config", batch_opts.config_path, "JSON config file");
  add_config_flags(batch, batch_opts);

  std::string map_dir, eval_mask_dir;
  CLI::App* eval = app.add_subcommand("eval", "score precomputed maps");
  eval->add_option("mapdir", map_dir, "saliency map directory")->required();
  eval->add_option("maskdir", eval_mask_dir, "mask directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      const auto cfg = resolve_config(run, run_opts);
      const fgsal::SingleResult r = fgsal::run_single(image, gt, out, cfg);
      std::cout << "wrote " << r.map_path << '\n';
      if (r.have_mae) std::cout << "mae " << r.mae_value << '\n';
    } else if (batch->parsed()) {
      const auto cfg = resolve_config(batch, batch_opts);
      const fgsal::BatchResult r =
          fgsal::run_batch(img_dir, mask_dir, batch_out, cfg);
      if (r.with_metrics > 0)
        std::cout << "mean mae " << r.report.mean_mae << " over " << r.with_metrics
                  << " images\n";
      if (r.failed == r.total) {
        std::cerr << "error: all " << r.total << " images failed\n";
        return 1;
      }
    } else if (eval->parsed()) {
      const fgsal::DatasetReport report = fgsal::run_eval(map_dir, eval_mask_dir);
      nlohmann::ordered_json j;
      j["mean_mae"] = report.mean_mae;
      j["images"] = nlohmann::ordered_json::array();
      for (const fgsal::ImageMetrics& m : report.images)
        j["images"].push_back({{"name", m.name}, {"mae", m.mae}});
      std::cout << j.dump(2) << '\n';
    }
  } catch (const fgsal::ParamError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
