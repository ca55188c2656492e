// Command-line front end: panorama | twin | ablate | bench.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "panofuse/config.hpp"
#include "panofuse/errors.hpp"
#include "panofuse/grid_io.hpp"
#include "panofuse/pipeline.hpp"

namespace fs = std::filesystem;
using namespace panofuse;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::optional<double> lambda;
  std::optional<int> tau;
  std::optional<int> view_stride;
  std::optional<int> cross_stride;
  std::optional<int> interleave;
  std::optional<std::string> variant;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "noise seed");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--workers", o.workers, "parallel denoising workers");
  cmd->add_option("--lambda", o.lambda, "adjacent control factor");
  cmd->add_option("--tau", o.tau, "fusion runs while t > tau");
  cmd->add_option("--view-stride", o.view_stride, "s_v in latent columns");
  cmd->add_option("--cross-stride", o.cross_stride, "s_r in latent columns");
  cmd->add_option("--interleave", o.interleave, "number of interleaved plans r");
  cmd->add_option("--variant", o.variant, "baseline | twin | twin_fixed_reference");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? parse_run_config("{}") : load_run_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.output.dir = *o.out_dir;
  if (o.workers) cfg.parallel_workers = *o.workers;
  if (o.lambda) cfg.fusion.lambda = *o.lambda;
  if (o.tau) cfg.fusion.tau = *o.tau;
  if (o.view_stride) cfg.view_stride = *o.view_stride;
  if (o.cross_stride) cfg.cross_stride = *o.cross_stride;
  if (o.interleave) cfg.interleave = *o.interleave;
  if (o.variant) cfg.fusion.variant = parse_variant(*o.variant);
  return cfg;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v)) throw ConfigError("cannot parse list item '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::ofstream open_csv(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(12);
  return out;
}

int run_panorama(const CommonOptions& o) {
  const RunConfig cfg = resolve_config(o);
  const PanoramaResult result = generate_panorama(cfg);
  const OutputFiles files = write_outputs(result.panorama, cfg.output, &result.seams, &result.timing);
  std::cout << "variant=" << to_string(cfg.fusion.variant) << " seam_ratio=" << result.seams.seam_ratio
            << " residual_at_tau=" << residual_at_tau(result, cfg.fusion.tau)
            << " denoiser_calls=" << result.timing.denoiser_calls
            << " seconds=" << result.timing.total_seconds << "\n"
            << "wrote " << files.raw.string() << ", " << files.pixmap.string() << "\n";
  return 0;
}

int run_twin(const CommonOptions& o) {
  RunConfig cfg = resolve_config(o);
  cfg.mode = RunMode::twin_pair;
  const TwinPairResult twin = generate_twin_pair(cfg);
  const auto stem = cfg.output.stem;
  for (const auto& [suffix, grid] : {std::pair{"_first", &twin.first},
                                     std::pair{"_second_raw", &twin.second_raw},
                                     std::pair{"_second_fused", &twin.second_fused}}) {
    write_outputs(*grid, OutputPaths{cfg.output.dir, stem + suffix});
  }
  const double raw = twin_overlap_mismatch(twin, twin.second_raw);
  const double fused = twin_overlap_mismatch(twin, twin.second_fused);
  auto csv = open_csv(fs::path(cfg.output.dir) / (stem + "_twin.csv"));
  csv << "variant,lambda,tau,mismatch_raw,mismatch_fused\n"
      << to_string(cfg.fusion.variant) << ',' << cfg.fusion.lambda << ',' << cfg.fusion.tau << ','
      << raw << ',' << fused << '\n';
  std::cout << "overlap mismatch raw=" << raw << " fused=" << fused << "\n";
  return 0;
}

int run_ablate(const CommonOptions& o, const std::string& param, const std::string& values_text,
               const std::string& variants_text) {
  const RunConfig base = resolve_config(o);
  std::vector<double> values = parse_list<double>(values_text);
  if (values.empty()) {
    const double steps = base.schedule.steps;
    if (param == "lambda") values = {0.1, 1, 10, 80, 100};
    else if (param == "tau") values = {0, steps / 4, steps / 2, 3 * steps / 4, steps};
    else if (param == "view-stride") values = {4, 8, 16, 24, 32, 40, 48};
    else if (param == "cross-stride") values = {1, 2, 4, 8, 16};
  }
  const auto variants = parse_list<std::string>(variants_text);
  auto csv = open_csv(fs::path(base.output.dir) / ("ablate_" + param + ".csv"));
  csv << "param,value,variant,view_stride,cross_stride,interleave,seam_ratio,residual_at_tau,"
         "denoiser_calls,seconds\n";
  for (double value : values) {
    for (const auto& variant : variants) {
      RunConfig cfg = base;
      cfg.fusion.variant = parse_variant(variant);
      if (param == "lambda") {
        cfg.fusion.lambda = value;
      } else if (param == "tau") {
        cfg.fusion.tau = static_cast<int>(std::lround(value));
      } else if (param == "view-stride") {
        cfg.view_stride = static_cast<int>(std::lround(value));
        cfg.cross_stride = std::min(cfg.cross_stride, cfg.view_stride);
      } else if (param == "cross-stride") {
        // s_r = s_v / r: the interleave count follows the cross stride.
        cfg.cross_stride = static_cast<int>(std::lround(value));
        cfg.interleave = (cfg.view_stride + cfg.cross_stride - 1) / cfg.cross_stride;
      } else {
        throw ConfigError("unknown ablation parameter '" + param + "'");
      }
      const PanoramaResult r = generate_panorama(cfg);
      csv << param << ',' << value << ',' << variant << ',' << cfg.view_stride << ','
          << cfg.cross_stride << ',' << cfg.interleave << ',' << r.seams.seam_ratio << ','
          << residual_at_tau(r, cfg.fusion.tau) << ',' << r.timing.denoiser_calls << ','
          << r.timing.total_seconds << '\n';
      std::cout << param << '=' << value << ' ' << variant << " seam_ratio=" << r.seams.seam_ratio
                << " residual_at_tau=" << residual_at_tau(r, cfg.fusion.tau) << "\n";
    }
  }
  return 0;
}

int run_bench(const CommonOptions& o, const std::string& strides_text, int repetitions,
              std::optional<long long> cost_us, const std::string& variants_text) {
  RunConfig base = resolve_config(o);
  if (cost_us) base.denoiser.simulated_cost = std::chrono::microseconds(*cost_us);
  const auto strides = parse_list<int>(strides_text);
  const auto variants = parse_list<std::string>(variants_text);
  auto csv = open_csv(fs::path(base.output.dir) / "bench.csv");
  csv << "view_stride,variant,interleave,crops_per_step_mean,denoiser_calls,median_seconds,"
         "seam_ratio\n";
  for (const auto& variant : variants) {
    long long previous_calls = -1;
    bool monotone = true;
    for (int stride : strides) {
      RunConfig cfg = base;
      cfg.fusion.variant = parse_variant(variant);
      cfg.view_stride = stride;
      cfg.cross_stride = std::min(cfg.cross_stride, stride);
      double seam_ratio = 0.0;
      const RunTiming timing = time_run(
          [&] {
            PanoramaResult r = generate_panorama(cfg);
            seam_ratio = r.seams.seam_ratio;
            return r.timing;
          },
          repetitions);
      const double mean_crops =
          static_cast<double>(timing.denoiser_calls) / static_cast<double>(timing.timesteps.size());
      if (previous_calls >= 0 && timing.denoiser_calls > previous_calls) monotone = false;
      previous_calls = timing.denoiser_calls;
      csv << stride << ',' << variant << ',' << cfg.interleave << ',' << mean_crops << ','
          << timing.denoiser_calls << ',' << timing.total_seconds << ',' << seam_ratio << '\n';
      std::cout << "s_v=" << stride << ' ' << variant << " calls=" << timing.denoiser_calls
                << " median_seconds=" << timing.total_seconds << "\n";
    }
    std::cout << variant << ": call-count curve " << (monotone ? "monotone" : "NOT monotone")
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crop-wise latent fusion engine for panorama sampling"};
  app.require_subcommand(1);

  CommonOptions pano_opts, twin_opts, ablate_opts, bench_opts;
  auto* pano = app.add_subcommand("panorama", "generate one panorama latent");
  add_common(pano, pano_opts);

  auto* twin = app.add_subcommand("twin", "generate a twin image pair");
  add_common(twin, twin_opts);

  auto* ablate = app.add_subcommand("ablate", "sweep one parameter and emit CSV");
  add_common(ablate, ablate_opts);
  std::string param = "lambda";
  std::string values;
  std::string ablate_variants = "baseline,twin";
  ablate->add_option("--param", param, "lambda | tau | view-stride | cross-stride")
      ->check(CLI::IsMember({"lambda", "tau", "view-stride", "cross-stride"}));
  ablate->add_option("--values", values, "comma-separated values (default grid per parameter)");
  ablate->add_option("--variants", ablate_variants, "comma-separated fusion variants");

  auto* bench = app.add_subcommand("bench", "timing harness over view strides");
  add_common(bench, bench_opts);
  std::string strides = "4,8,16,24,32,40,48";
  int repetitions = 3;
  std::optional<long long> cost_us;
  std::string bench_variants = "baseline,twin";
  bench->add_option("--strides", strides, "comma-separated view strides");
  bench->add_option("--repetitions", repetitions, "runs per point (median reported)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--cost-us", cost_us, "simulated per-call denoiser cost in microseconds");
  bench->add_option("--variants", bench_variants, "comma-separated fusion variants");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pano) return run_panorama(pano_opts);
    if (*twin) return run_twin(twin_opts);
    if (*ablate) return run_ablate(ablate_opts, param, values, ablate_variants);
    if (*bench) return run_bench(bench_opts, strides, repetitions, cost_us, bench_variants);
  } catch (const DenoiserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
