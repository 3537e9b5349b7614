// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

// smokefilter: command-line front end (filter, synth, eval, bench, hist).
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smokefilter/errors.hpp"
#include "smokefilter/eval.hpp"
#include "smokefilter/intensity.hpp"
#include "smokefilter/io.hpp"
#include "smokefilter/pipeline.hpp"
#include "smokefilter/spatial_filters.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace smokefilter;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

constexpr double kFramePeriod = 0.1;  // directory streams are replayed at 10 Hz

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<CloudFormat> format_option(const std::string& name) {
  if (name.empty()) return std::nullopt;
  try {
    return parse_format(name);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

template <typename Fn>
void write_text(const fs::path& path, Fn&& body) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  body(out);
  if (!out) throw DataError("failed writing " + path.string());
}

// frame_000001.pcd style files, ascending by name.
std::vector<fs::path> list_frames(const fs::path& dir) {
  static const std::regex pattern(R"(frame_\d+\.(pcd|csv))", std::regex::icase);
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern)) {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

struct FilterArgs {
  std::string input;
  std::string config;
  std::string output;
  std::string rejected;
  std::string rejected_indices;
  std::string report;
  std::string format;
};

int cmd_filter(const FilterArgs& a) {
  const std::optional<CloudFormat> format = format_option(a.format);
  const PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  const fs::path input(a.input);
  if (!fs::exists(input)) throw DataError("input " + input.string() + " does not exist");

  json frames_json = json::array();
  std::size_t total_in = 0, total_kept = 0, total_rejected = 0;

  if (fs::is_directory(input)) {
    const std::vector<fs::path> files = list_frames(input);
    std::vector<PointCloud> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
      PointCloud c = read_cloud(files[i]);
      c.frame_id = files[i].filename().string();
      c.timestamp = kFramePeriod * static_cast<double>(i);
      frames.push_back(std::move(c));
    }
    const std::vector<FrameOutput> outs = run_stream(frames, cfg);
    for (const std::string& dir : {a.output, a.rejected, a.rejected_indices}) {
      if (!dir.empty()) fs::create_directories(dir);
    }
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const fs::path name = files[i].filename();
      if (!a.output.empty()) write_cloud(outs[i].filtered, fs::path(a.output) / name, format);
      if (!a.rejected.empty()) write_cloud(outs[i].rejected, fs::path(a.rejected) / name, format);
      if (!a.rejected_indices.empty()) {
        write_indices(outs[i].rejected_indices, fs::path(a.rejected_indices) / name.stem().concat(".csv"));
      }
      json r = report_to_json(outs[i].report);
      r["frame"] = name.string();
      frames_json.push_back(std::move(r));
      total_in += outs[i].report.input;
      total_kept += outs[i].report.filtered;
      total_rejected += outs[i].report.rejected;
    }
  } else {
    const PointCloud cloud = read_cloud(input);
    const FrameOutput out = process_frame(cloud, cfg, initial_state(cfg));
    if (!a.output.empty()) write_cloud(out.filtered, a.output, format);
    if (!a.rejected.empty()) write_cloud(out.rejected, a.rejected, format);
    if (!a.rejected_indices.empty()) write_indices(out.rejected_indices, a.rejected_indices);
    json r = report_to_json(out.report);
    r["frame"] = input.filename().string();
    frames_json.push_back(std::move(r));
    total_in = out.report.input;
    total_kept = out.report.filtered;
    total_rejected = out.report.rejected;
  }

  if (!a.report.empty()) {
    json doc{{"config_source", a.config.empty() ? "defaults" : a.config},
             {"config", config_to_json(cfg)},
             {"input", total_in},
             {"filtered", total_kept},
             {"rejected", total_rejected},
             {"frames", frames_json}};
    write_json(doc, a.report);
  }
  std::printf("%zu frame(s): %zu points in, %zu kept, %zu rejected\n", frames_json.size(), total_in, total_kept,
              total_rejected);
  return kExitOk;
}

struct SynthArgs {
  std::string output;
  std::string labels;
  std::string scene_spec;
  std::string format;
  std::uint64_t seed = 1;
  std::size_t points = 0;
};

int cmd_synth(const SynthArgs& a) {
  const std::optional<CloudFormat> format = format_option(a.format);
  SceneSpec spec = a.scene_spec.empty() ? default_scene(a.seed) : load_scene_spec(a.scene_spec);
  if (a.scene_spec.empty() && a.points > 0) spec = scene_for_size(a.points, a.seed);
  const LabeledCloud scene = generate_scene(spec);
  write_cloud(scene.cloud, a.output, format);
  fs::path labels = a.labels;
  if (labels.empty()) labels = fs::path(a.output).replace_extension(".labels.csv");
  write_labels(scene.labels, labels);
  const auto aerosol = std::count(scene.labels.begin(), scene.labels.end(), Label::aerosol);
  std::printf("wrote %zu points (%td aerosol) to %s, labels to %s\n", scene.cloud.size(), aerosol, a.output.c_str(),
              labels.string().c_str());
  return kExitOk;
}

struct EvalArgs {
  std::string input;
  std::string labels;
  std::string rejected;
  std::string config;
  std::string output;
  std::vector<std::string> baselines;
  double query_radius = 0.0;
};

int cmd_eval(const EvalArgs& a) {
  LabeledCloud truth;
  truth.cloud = read_cloud(a.input);
  truth.labels = read_labels(a.labels);
  if (truth.labels.size() != truth.cloud.size()) {
    throw DataError("cloud has " + std::to_string(truth.cloud.size()) + " points but " + a.labels + " has " +
                    std::to_string(truth.labels.size()) + " labels");
  }
  const std::string scene = fs::path(a.input).filename().string();
  std::vector<MetricsRow> rows;
  if (!a.rejected.empty()) {
    rows.push_back({scene, "rejected-file", score(read_indices(a.rejected), truth)});
  } else {
    PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
    if (a.query_radius > 0.0) {
      cfg.doscor.query_radius = a.query_radius;
      validate(cfg);
    }
    const FrameOutput out = process_frame(truth.cloud, cfg, initial_state(cfg));
    rows.push_back({scene, "pipeline", score(out.rejected_indices, truth)});
  }
  for (const std::string& name : a.baselines) {
    const BaselineConfig b = baseline_from_name(name);
    rows.push_back({scene, baseline_name(b), score(baseline_filter(truth.cloud, b).rejected, truth)});
  }
  write_text(a.output, [&](std::ostream& out) { write_metrics_csv(out, rows); });
  for (const MetricsRow& r : rows) {
    std::printf("%-14s precision=%.4f recall=%.4f f1=%.4f\n", r.config.c_str(), r.metrics.precision,
                r.metrics.recall, r.metrics.f1);
  }
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::size_t> sizes{10000, 30000, 60000};
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  std::string config;
  std::string output;
};

int cmd_bench(const BenchArgs& a) {
  const PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  const std::vector<LatencyRow> rows = benchmark(a.sizes, cfg, a.reps, a.seed);
  write_text(a.output, [&](std::ostream& out) { write_latency_csv(out, rows); });
  for (const LatencyRow& r : rows) {
    std::printf("%8zu points: median %.2f ms, p95 %.2f ms, %.1f Hz\n", r.size, r.median_ms, r.p95_ms, r.hz);
  }
  return kExitOk;
}

struct HistArgs {
  std::string input;
  std::string output;
  std::size_t bins = 51;
  double clip = 1.0;
  std::string location = "zero";
};

int cmd_hist(const HistArgs& a) {
  const PointCloud cloud = read_cloud(a.input);
  std::vector<double> intensities;
  intensities.reserve(cloud.size());
  for (const Point& p : cloud.points) intensities.push_back(p.intensity);
  const std::vector<double> population = low_intensity_population(intensities, a.clip);
  if (population.empty()) throw DataError(a.input + ": no points to histogram");

  WeibullFitOptions options;
  options.location = a.location == "sample_min" ? WeibullLocation::sample_min : WeibullLocation::zero;
  std::optional<WeibullParams> fit;
  try {
    fit = fit_weibull(population, options);
  } catch (const FitError& e) {
    std::fprintf(stderr, "warning: %s; writing histogram without a fitted curve\n", e.what());
  }
  const Histogram hist = make_histogram(population, a.bins);
  write_text(a.output, [&](std::ostream& out) { write_histogram_csv(out, hist, fit); });
  if (fit) {
    std::printf("%zu samples, %zu bins, weibull alpha=%.6f gamma=%.6f mu=%.6f\n", population.size(), hist.bins(),
                fit->alpha, fit->gamma, fit->mu);
  } else {
    std::printf("%zu samples, %zu bins, no fit\n", population.size(), hist.bins());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerosol point filtration for LiDAR scans"};
  app.require_subcommand(1);

  FilterArgs filter;
  CLI::App* filter_cmd = app.add_subcommand("filter", "Filter a cloud or a directory of frame_*.pcd files");
  filter_cmd->add_option("--input", filter.input, "Cloud file or frame directory")->required();
  filter_cmd->add_option("--config", filter.config, "JSON configuration (defaults when omitted)");
  filter_cmd->add_option("--output", filter.output, "Kept points (file, or directory for streams)");
  filter_cmd->add_option("--rejected", filter.rejected, "Rejected points (file, or directory for streams)");
  filter_cmd->add_option("--rejected-indices", filter.rejected_indices, "CSV of rejected input indices");
  filter_cmd->add_option("--report", filter.report, "JSON report");
  filter_cmd->add_option("--format", filter.format, "Output format: pcd-ascii, pcd-binary or csv");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic tunnel scene");
  synth_cmd->add_option("--output", synth.output, "Cloud file")->required();
  synth_cmd->add_option("--labels", synth.labels, "Label sidecar (default <output>.labels.csv)");
  synth_cmd->add_option("--scene-spec", synth.scene_spec, "JSON scene description");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--points", synth.points, "Approximate total point count of the default scene");
  synth_cmd->add_option("--format", synth.format, "pcd-ascii, pcd-binary or csv");

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a rejection against ground-truth labels");
  eval_cmd->add_option("--input", ev.input, "Cloud file")->required();
  eval_cmd->add_option("--labels", ev.labels, "Label sidecar")->required();
  eval_cmd->add_option("--rejected", ev.rejected, "CSV of rejected indices (runs the pipeline when omitted)");
  eval_cmd->add_option("--config", ev.config, "JSON configuration for the pipeline run");
  eval_cmd->add_option("--query-radius", ev.query_radius, "Override the DOSCOR ball-search radius [m]")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--baseline", ev.baselines, "Also score baselines: ror, sor, dror, dsor, lior");
  eval_cmd->add_option("--output", ev.output, "Metrics CSV")->required();

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Latency of process_frame on synthetic scenes");
  bench_cmd->add_option("--sizes", bench.sizes, "Cloud sizes")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per size")->check(CLI::Range(10, 100000));
  bench_cmd->add_option("--seed", bench.seed, "Scene seed");
  bench_cmd->add_option("--config", bench.config, "JSON configuration");
  bench_cmd->add_option("--output", bench.output, "Latency CSV")->required();

  HistArgs hist;
  CLI::App* hist_cmd = app.add_subcommand("hist", "Intensity histogram with a fitted Weibull curve");
  hist_cmd->add_option("--input", hist.input, "Cloud file")->required();
  hist_cmd->add_option("--output", hist.output, "Histogram CSV")->required();
  hist_cmd->add_option("--bins", hist.bins, "Number of classes")->check(CLI::Range(1, 100000));
  hist_cmd->add_option("--clip", hist.clip, "Fraction of the intensity span to keep")->check(CLI::Range(0.0, 1.0));
  hist_cmd->add_option("--location", hist.location, "Weibull location: zero or sample_min")
      ->check(CLI::IsMember({"zero", "sample_min"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*filter_cmd) return cmd_filter(filter);
    if (*synth_cmd) return cmd_synth(synth);
    if (*eval_cmd) return cmd_eval(ev);
    if (*bench_cmd) return cmd_bench(bench);
    if (*hist_cmd) return cmd_hist(hist);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
