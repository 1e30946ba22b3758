#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emoeeg/evaluate.hpp"
#include "emoeeg/featurize.hpp"
#include "emoeeg/ingest.hpp"
#include "emoeeg/report.hpp"
#include "emoeeg/run_config.hpp"

namespace emoeeg {

/// FNV-1a over the raw sample bytes; identifies the data a report came from.
inline std::uint64_t sample_fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : ds.samples()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline Dataset load_for_config(const RunConfig& cfg) {
  const std::filesystem::path path(cfg.dataset);
  const Format fmt = cfg.format == "auto" ? guess_format(path) : parse_format(cfg.format);
  return trim_leading_samples(load_dataset(path, fmt), cfg.trim_baseline);
}

struct GridRun {
  std::vector<GridReport> reports;
  nlohmann::ordered_json json;
  std::string text;
  std::string csv;
  std::string comparison;
};

inline GridRun run_grid_config(const RunConfig& cfg, const Dataset& ds) {
  cfg.validate();
  std::vector<ClassifierSpec> specs;
  for (auto k : cfg.classifiers) specs.push_back({k, cfg.train});
  std::vector<Region> regions;
  for (const auto& r : cfg.regions) regions.push_back(region_by_name(r));

  std::vector<std::string> channels;
  for (const auto& r : regions)
    for (const auto& c : r.channels)
      if (std::find(channels.begin(), channels.end(), c) == channels.end()) channels.push_back(c);
  const auto features = build_features(ds, channels, cfg.bands, cfg.welch, cfg.jobs);

  GridOptions opts{cfg.folds, cfg.train.seed, cfg.stratify, cfg.standardize, cfg.jobs};
  GridRun run;
  nlohmann::ordered_json config_json = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.to_pairs()) config_json[k] = v;
  run.json["config"] = config_json;
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(sample_fingerprint(ds)));
  run.json["dataset"] = {{"provenance", ds.provenance()},
                         {"n_trials", ds.n_trials()},
                         {"n_channels", ds.n_channels()},
                         {"n_samples", ds.n_samples()},
                         {"sample_rate_hz", ds.sample_rate_hz()},
                         {"sample_fingerprint", fp}};
  run.json["reports"] = nlohmann::ordered_json::array();
  run.text = "# Configuration\n" + cfg.to_text() + "\n";
  run.csv = grid_csv_header();

  nlohmann::json published;
  if (!cfg.compare.empty()) {
    std::ifstream f(cfg.compare);
    if (!f) throw Error(Errc::io, "cannot open comparison file '" + cfg.compare + "'");
    try {
      published = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_header, "invalid comparison json: " + std::string(e.what()));
    }
  }

  for (auto scheme : cfg.schemes) {
    const auto labels = make_labels(ds.ratings(), scheme);
    auto report = run_grid(features, labels, specs, regions, cfg.bands, opts);
    run.json["reports"].push_back(to_json(report));
    run.text += grid_text(report);
    run.csv += grid_csv_rows(report);
    if (!cfg.compare.empty()) run.comparison += compare_text(report, published);
    run.reports.push_back(std::move(report));
  }
  return run;
}

/// Writes report.json, report.txt, report.csv, config.txt and, in comparison
/// mode, compare.txt into the output directory.
inline void write_grid_outputs(const GridRun& run, const RunConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(out_dir / name, std::ios::trunc | std::ios::binary);
    if (!f) throw Error(Errc::io, "cannot write '" + (out_dir / name).string() + "'");
    f << text;
  };
  write("report.json", run.json.dump(2) + "\n");
  write("report.txt", run.text);
  write("report.csv", run.csv);
  write("config.txt", cfg.to_text());
  if (!run.comparison.empty()) write("compare.txt", run.comparison);
}

}  // namespace emoeeg
