// fiberscan: detect fluorescent security fibers in UV page images, generate
// synthetic corpora, and score the detector against ground truth.
//
// Exit status of `detect`: 0 authentic, 1 fake, 2 error. Other subcommands
// return 0 on success and 2 on error.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fiberscan/error.hpp"
#include "fiberscan/evaluate.hpp"
#include "fiberscan/pipeline.hpp"
#include "fiberscan/serialize.hpp"
#include "fiberscan/synthgen.hpp"

namespace fs = std::filesystem;
using namespace fiberscan;

namespace {

constexpr int kExitError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rect parse_photo_region(const std::string& text) {
  std::vector<int> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string part = text.substr(start, comma - start);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw UsageError("--photo-region: '" + text + "' is not of the form X,Y,W,H");
    }
    values.push_back(v);
    start = comma + 1;
  }
  if (values.size() != 4) {
    throw UsageError("--photo-region: expected 4 comma-separated integers X,Y,W,H, got '" + text +
                     "'");
  }
  if (values[2] < 0 || values[3] < 0) {
    throw UsageError("--photo-region: width and height must be >= 0");
  }
  return Rect{values[0], values[1], values[2], values[3]};
}

DetectorConfig load_config(const std::string& path) {
  if (path.empty()) return DetectorConfig{};
  return config_from_json(read_text_file(path));
}

// Linear rescale of a non-negative field to [0, 1]; returns the divisor.
double write_scaled(const fs::path& path, const GrayImage& img) {
  const auto s = img.samples();
  const double peak = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  const double scale = peak > 0.0 ? peak : 1.0;
  GrayImage out = img;
  for (double& v : out.samples()) v /= scale;
  write_gray(path, out);
  return scale;
}

void dump_debug_maps(const fs::path& dir, const PipelineTrace& trace) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kUnwritable, "cannot create debug-maps directory: " + dir.string());
  write_gray(dir / "i0.pgm", trace.normalization.i0);
  write_gray(dir / "ibg.pgm", trace.normalization.ibg);
  write_gray(dir / "idil.pgm", trace.normalization.idil);
  const double ratio_scale = write_scaled(dir / "ratio.pgm", trace.ridge_input);
  const double strength_scale = write_scaled(dir / "strength.pgm", trace.ridges.strength);
  GrayImage final_map(trace.ridges.final_mask.width(), trace.ridges.final_mask.height());
  for (int y = 0; y < final_map.height(); ++y) {
    for (int x = 0; x < final_map.width(); ++x) {
      final_map.at(x, y) = trace.ridges.final_mask.at(x, y) ? 1.0 : 0.0;
    }
  }
  write_gray(dir / "final.pgm", final_map);
  std::cerr << "debug maps written to " << dir.string() << " (ratio scale " << ratio_scale
            << ", strength scale " << strength_scale << ")\n";
}

struct DetectArgs {
  std::string input;
  std::string config;
  std::string report;
  std::string overlay;
  std::string photo_region;
  std::optional<int> min_fibers;
  std::string debug_maps;
  bool no_timings = false;
};

int cmd_detect(const DetectArgs& a) {
  DetectorConfig config = load_config(a.config);
  if (!a.photo_region.empty()) config.photo_region = parse_photo_region(a.photo_region);
  if (a.min_fibers) config.min_fiber_count = *a.min_fibers;
  config.validate();

  const RasterImage image = read_image(a.input);
  PipelineTrace trace;
  const bool want_trace = !a.debug_maps.empty();
  const DetectionReport report = run_pipeline(image, config, want_trace ? &trace : nullptr);

  if (!a.report.empty()) {
    write_text_file(a.report, report_to_json(report, a.input, !a.no_timings));
  }
  if (!a.overlay.empty()) {
    std::vector<Rect> boxes;
    for (const FiberComponent& f : report.fibers) boxes.push_back(f.bbox);
    write_overlay(a.overlay, image, boxes);
  }
  if (want_trace) dump_debug_maps(a.debug_maps, trace);

  std::cout << "verdict=" << to_string(report.verdict) << " fibers=" << report.fiber_count << "\n";
  return report.verdict == Verdict::kAuthentic ? 0 : 1;
}

struct SynthArgs {
  std::string out;
  int authentic = 0;
  int model = 0;
  std::uint64_t seed = 0;
  std::string spec;
  std::optional<int> width;
  std::optional<int> height;
  std::optional<double> background;
  std::optional<double> noise;
  std::optional<int> text_blocks;
};

int cmd_synth(const SynthArgs& a) {
  SyntheticSpec spec;
  if (!a.spec.empty()) spec = spec_from_json(read_text_file(a.spec));
  if (a.width) spec.width = *a.width;
  if (a.height) spec.height = *a.height;
  if (a.background) spec.background_base = *a.background;
  if (a.noise) spec.noise_sigma = *a.noise;
  if (a.text_blocks) spec.text_blocks = *a.text_blocks;
  spec.model_page = false;
  spec.validate();
  generate_corpus(a.out, a.authentic, a.model, spec, a.seed);
  std::cout << "wrote " << (a.authentic + a.model) << " pages to " << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string corpus;
  std::string config;
  double match_dist = kDefaultMatchDist;
  int jobs = 1;
};

int cmd_eval(const EvalArgs& a) {
  if (!(a.match_dist > 0.0)) throw UsageError("--match-dist must be > 0");
  const DetectorConfig config = load_config(a.config);
  const Metrics m = evaluate_corpus(a.corpus, config, a.match_dist, a.jobs);
  std::cout << metrics_to_json(m) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluorescent security fiber detection for UV document images"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Detect fibers on one page and print a verdict");
  detect_cmd->add_option("--input", detect.input, "Page image (PGM/PPM)")->required();
  detect_cmd->add_option("--config", detect.config, "Detector config JSON");
  detect_cmd->add_option("--report", detect.report, "Write the JSON report here");
  detect_cmd->add_option("--overlay", detect.overlay, "Write a PPM with fiber boxes in red");
  detect_cmd->add_option("--photo-region", detect.photo_region,
                         "Owner photo rectangle X,Y,W,H (masked before ridge detection)");
  detect_cmd->add_option("--min-fibers", detect.min_fibers, "Minimum fiber count for AUTHENTIC");
  detect_cmd->add_option("--debug-maps", detect.debug_maps,
                         "Directory for intermediate maps (i0, ibg, idil, ratio, strength, final)");
  detect_cmd->add_flag("--no-timings", detect.no_timings, "Leave timings_ms empty in the report");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--authentic", synth.authentic, "Number of authentic pages")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--model", synth.model, "Number of model (fake) pages")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth.seed, "Base seed; page i uses seed + i");
  synth_cmd->add_option("--spec", synth.spec, "Synthetic page spec JSON (base for every page)");
  synth_cmd->add_option("--width", synth.width, "Page width in pixels");
  synth_cmd->add_option("--height", synth.height, "Page height in pixels");
  synth_cmd->add_option("--background", synth.background, "Authentic background base intensity");
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise sigma (intensity units)");
  synth_cmd->add_option("--text-blocks", synth.text_blocks, "Text blocks per page");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Run the detector over a corpus and print metrics");
  eval_cmd->add_option("--corpus", eval.corpus, "Corpus directory (images + truth JSON)")
      ->required();
  eval_cmd->add_option("--config", eval.config, "Detector config JSON");
  eval_cmd->add_option("--match-dist", eval.match_dist, "Matching distance in pixels");
  eval_cmd->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    for (const CLI::App* sub : app.get_subcommands()) std::cerr << "\n" << sub->help();
    return kExitError;
  }

  try {
    if (*detect_cmd) return cmd_detect(detect);
    if (*synth_cmd) return cmd_synth(synth);
    if (*eval_cmd) return cmd_eval(eval);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
