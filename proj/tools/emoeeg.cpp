// emoeeg command-line front end: synthesize, validate, convert, inspect and
// classify trial EEG datasets.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emoeeg/emoeeg.hpp"

namespace fs = std::filesystem;
using namespace emoeeg;

namespace {

std::vector<double> parse_doubles(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(text)) out.push_back(detail::parse_number<double>(what, item));
  if (out.size() != expected)
    throw Error(Errc::invalid_argument, std::string(what) + ": expected " + std::to_string(expected) +
                                            " comma-separated values, got " + std::to_string(out.size()));
  return out;
}

Format format_for(const std::string& flag, const fs::path& path) {
  return flag.empty() || flag == "auto" ? guess_format(path) : parse_format(flag);
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw Error(Errc::io, "cannot write '" + path + "'");
  return file;
}

struct SynthArgs {
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  std::size_t trials = 160;
  std::size_t samples = kDeapSamples;
  double rate = kDeapSampleRate;
  double noise = 1.0;
  std::string proportions, carriers, amplitudes, baseline, modulate;
};

int cmd_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.seed = a.seed;
  spec.n_trials = a.trials;
  spec.n_samples = a.samples;
  spec.sample_rate_hz = a.rate;
  spec.noise_sigma = a.noise;
  auto copy4 = [](std::array<double, 4>& dst, const std::vector<double>& src) {
    std::copy(src.begin(), src.end(), dst.begin());
  };
  if (!a.proportions.empty()) copy4(spec.proportions, parse_doubles(a.proportions, 4, "--proportions"));
  if (!a.carriers.empty()) copy4(spec.carriers_hz, parse_doubles(a.carriers, 4, "--carriers"));
  if (!a.baseline.empty()) copy4(spec.baseline_amplitudes, parse_doubles(a.baseline, 4, "--baseline"));
  if (!a.amplitudes.empty()) {
    const auto v = parse_doubles(a.amplitudes, 16, "--amplitudes");
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t b = 0; b < 4; ++b) spec.amplitudes[c][b] = v[c * 4 + b];
  }
  spec.modulated_channels = detail::split_list(a.modulate);
  const auto ds = synth_dataset(spec);
  write_dataset(ds, a.out, format_for(a.format, a.out));
  std::cout << "wrote " << a.out << ": " << ds.n_trials() << " trials x " << ds.n_channels() << " channels x "
            << ds.n_samples() << " samples\n";
  return 0;
}

int cmd_validate(const std::string& path, const std::string& format) {
  const auto ds = load_dataset(path, format_for(format, path));
  const auto counts = ds.n_trials() ? quadrant_labels(ds.ratings()).class_counts() : std::vector<std::size_t>{};
  std::cout << "ok: " << path << "\n"
            << "  sample_rate_hz: " << detail::format_double(ds.sample_rate_hz()) << "\n"
            << "  n_trials: " << ds.n_trials() << "\n"
            << "  n_channels: " << ds.n_channels() << "\n"
            << "  n_samples: " << ds.n_samples() << "\n"
            << "  deap_geometry: " << (ds.deap_shaped() ? "yes" : "no") << "\n"
            << "  provenance: " << ds.provenance() << "\n";
  if (!counts.empty())
    std::cout << "  quadrant_counts (HAHV/LAHV/HALV/LALV): " << counts[0] << "/" << counts[1] << "/" << counts[2]
              << "/" << counts[3] << "\n";
  return 0;
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& in_format,
                const std::string& out_format) {
  const auto ds = load_dataset(in, format_for(in_format, in));
  write_dataset(ds, out, format_for(out_format, out));
  std::cout << "wrote " << out << "\n";
  return 0;
}

struct SpectralArgs {
  std::size_t segment_len = 256;
  std::size_t overlap = 128;
  std::string window = "hann";
  std::size_t trim_baseline = 0;

  spectral::WelchParams params(double fs) const {
    spectral::WelchParams p;
    p.segment_len = segment_len;
    p.overlap = overlap;
    p.sample_rate_hz = fs;
    if (window == "rectangular") p.window = spectral::Window::rectangular;
    else if (window != "hann") throw Error(Errc::invalid_argument, "--window: expected hann or rectangular");
    return p;
  }
};

int cmd_psd(const std::string& path, const std::string& format, std::size_t trial, const std::string& channel,
            const SpectralArgs& sa, const std::string& out) {
  const auto ds = trim_leading_samples(load_dataset(path, format_for(format, path)), sa.trim_baseline);
  if (trial >= ds.n_trials())
    throw Error(Errc::invalid_argument, "trial " + std::to_string(trial) + " out of range (n_trials=" +
                                            std::to_string(ds.n_trials()) + ")");
  const auto psd = spectral::welch_psd(ds.signal(trial, ds.channels().index(channel)), sa.params(ds.sample_rate_hz()));
  std::ofstream file;
  auto& os = open_output(out, file);
  os << "freq_hz,power\n";
  for (std::size_t k = 0; k < psd.freqs.size(); ++k)
    os << detail::format_double(psd.freqs[k]) << ',' << detail::format_double(psd.power[k]) << '\n';
  return 0;
}

int cmd_features(const std::string& path, const std::string& format, const std::string& channels_arg,
                 const std::string& region, const std::string& bands_arg, const std::string& scheme,
                 const SpectralArgs& sa, std::size_t jobs, const std::string& out) {
  const auto ds = trim_leading_samples(load_dataset(path, format_for(format, path)), sa.trim_baseline);
  std::vector<std::string> channels;
  if (!region.empty()) channels = region_by_name(region).channels;
  else if (!channels_arg.empty()) channels = detail::split_list(channels_arg);
  else channels = ds.channels().names();
  std::vector<spectral::BandDef> bands;
  if (bands_arg.empty()) bands.assign(spectral::canonical_bands().begin(), spectral::canonical_bands().end());
  for (const auto& b : detail::split_list(bands_arg)) bands.push_back(detail::parse_band(b));

  const auto fm = build_features(ds, channels, bands, sa.params(ds.sample_rate_hz()), jobs);
  const auto labels = make_labels(ds.ratings(), parse_scheme(scheme));
  std::ofstream file;
  auto& os = open_output(out, file);
  os << "trial";
  for (const auto& c : fm.columns) os << ',' << c.label();
  os << ",label\n";
  for (std::size_t t = 0; t < fm.values.rows(); ++t) {
    os << t;
    for (double v : fm.values.row(t)) os << ',' << detail::format_double(v);
    os << ',' << labels.labels[t] << '\n';
  }
  return 0;
}

int cmd_stats(const std::string& path, const std::string& format) {
  const auto ds = load_dataset(path, format_for(format, path));
  const auto s = rating_stats(ds.ratings());
  auto f = [](double v) { return detail::fixed2(v); };
  std::cout << "trials: " << ds.n_trials() << "\n"
            << "valence: mean=" << f(s.valence_mean) << " median=" << f(s.valence_median) << " std=" << f(s.valence_std)
            << "\n"
            << "arousal: mean=" << f(s.arousal_mean) << " median=" << f(s.arousal_median) << " std=" << f(s.arousal_std)
            << "\n"
            << "std difference |std(valence) - std(arousal)|: " << f(s.std_difference) << "\n"
            << "quadrant counts HAHV/LAHV/HALV/LALV: " << s.quadrant_counts[0] << "/" << s.quadrant_counts[1] << "/"
            << s.quadrant_counts[2] << "/" << s.quadrant_counts[3] << "\n";
  return 0;
}

struct GridArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> dataset, out, classifiers, schemes, regions, bands, compare, format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> folds, trim_baseline, jobs;
  bool no_standardize = false;
  bool no_stratify = false;
};

int cmd_grid(const GridArgs& a) {
  RunConfig cfg;
  cfg.jobs = default_jobs();
  if (!a.config.empty()) cfg.load_file(a.config);
  if (a.dataset) cfg.set("dataset", *a.dataset);
  if (a.format) cfg.set("format", *a.format);
  if (a.classifiers) cfg.set("classifiers", *a.classifiers);
  if (a.schemes) cfg.set("schemes", *a.schemes);
  if (a.regions) cfg.set("regions", *a.regions);
  if (a.bands) cfg.set("bands", *a.bands);
  if (a.compare) cfg.set("compare", *a.compare);
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.folds) cfg.folds = *a.folds;
  if (a.trim_baseline) cfg.trim_baseline = *a.trim_baseline;
  if (a.jobs) cfg.jobs = *a.jobs;
  if (a.no_standardize) cfg.standardize = false;
  if (a.no_stratify) cfg.stratify = false;
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::invalid_config, "--set expects key=value, got '" + kv + "'");
    cfg.set(detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
  if (a.out) cfg.output_dir = *a.out;
  if (cfg.output_dir.empty()) {
    const char* env = std::getenv("EMOEEG_OUT_DIR");
    cfg.output_dir = env && *env ? env : "emoeeg-out";
  }
  cfg.validate();

  const auto ds = load_for_config(cfg);
  const auto run = run_grid_config(cfg, ds);
  write_grid_outputs(run, cfg, cfg.output_dir);
  std::cout << run.text;
  if (!run.comparison.empty()) std::cout << run.comparison;
  std::cout << "reports written to " << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG valence/arousal classification toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a deterministic synthetic dataset");
  s->add_option("--out,-o", synth.out, "Output path (.eegb or .csv)")->required();
  s->add_option("--format", synth.format, "eegb or csv (default: from extension)");
  s->add_option("--seed", synth.seed, "Generator seed");
  s->add_option("--trials", synth.trials, "Number of trials");
  s->add_option("--samples", synth.samples, "Samples per channel");
  s->add_option("--rate", synth.rate, "Sample rate in Hz");
  s->add_option("--noise", synth.noise, "Gaussian noise standard deviation");
  s->add_option("--proportions", synth.proportions, "Class proportions HAHV,LAHV,HALV,LALV");
  s->add_option("--carriers", synth.carriers, "Carrier frequency per band theta,alpha,beta,gamma");
  s->add_option("--amplitudes", synth.amplitudes, "16 class-major band amplitudes");
  s->add_option("--baseline", synth.baseline, "Band amplitudes for unmodulated channels");
  s->add_option("--modulate", synth.modulate, "Channels carrying the class-dependent amplitudes (default all)");

  std::string path, format;
  auto* v = app.add_subcommand("validate", "Check a dataset file and print its geometry");
  v->add_option("path", path)->required();
  v->add_option("--format", format);

  std::string conv_in, conv_out, conv_in_fmt, conv_out_fmt;
  auto* cv = app.add_subcommand("convert", "Convert between eegb and csv");
  cv->add_option("input", conv_in)->required();
  cv->add_option("output", conv_out)->required();
  cv->add_option("--from", conv_in_fmt);
  cv->add_option("--to", conv_out_fmt);

  SpectralArgs sa;
  auto add_spectral = [&](CLI::App* sub) {
    sub->add_option("--segment-len", sa.segment_len, "Welch segment length in samples");
    sub->add_option("--overlap", sa.overlap, "Welch segment overlap in samples");
    sub->add_option("--window", sa.window, "hann or rectangular");
    sub->add_option("--trim-baseline", sa.trim_baseline, "Drop this many leading samples per trial (DEAP: 384)");
  };

  std::size_t trial = 0;
  std::string channel = "Fp1", out;
  auto* p = app.add_subcommand("psd", "Welch PSD of one trial/channel as CSV");
  p->add_option("path", path)->required();
  p->add_option("--format", format);
  p->add_option("--trial", trial);
  p->add_option("--channel", channel);
  p->add_option("--out,-o", out, "Output CSV (default stdout)");
  add_spectral(p);

  std::string channels, region, bands, scheme = "quadrant";
  std::size_t jobs = default_jobs();
  auto* f = app.add_subcommand("features", "Export band-power features and labels as CSV");
  f->add_option("path", path)->required();
  f->add_option("--format", format);
  f->add_option("--channels", channels, "Comma-separated channel names (default all 32)");
  f->add_option("--region", region, "Use a region's channels instead");
  f->add_option("--bands", bands, "Comma-separated bands (name or name:low:high)");
  f->add_option("--scheme", scheme, "arousal, valence or quadrant");
  f->add_option("--jobs", jobs);
  f->add_option("--out,-o", out, "Output CSV (default stdout)");
  add_spectral(f);

  GridArgs grid;
  auto* g = app.add_subcommand("grid", "Cross-validated region x band accuracy grids");
  g->add_option("--config,-c", grid.config, "key = value config file");
  g->add_option("--dataset,-d", grid.dataset);
  g->add_option("--format", grid.format);
  g->add_option("--out,-o", grid.out, "Output directory (default $EMOEEG_OUT_DIR or ./emoeeg-out)");
  g->add_option("--seed", grid.seed);
  g->add_option("--folds", grid.folds);
  g->add_option("--classifiers", grid.classifiers, "Comma list of knn,svm,mlp");
  g->add_option("--schemes", grid.schemes, "Comma list of arousal,valence,quadrant");
  g->add_option("--regions", grid.regions);
  g->add_option("--bands", grid.bands);
  g->add_option("--compare", grid.compare, "Published grid JSON to print deltas against");
  g->add_option("--trim-baseline", grid.trim_baseline);
  g->add_option("--jobs", grid.jobs, "Worker threads (does not change results)");
  g->add_flag("--no-standardize", grid.no_standardize);
  g->add_flag("--no-stratify", grid.no_stratify);
  g->add_option("--set", grid.sets, "Override any config key: key=value");

  auto* st = app.add_subcommand("stats", "Descriptive statistics of the ratings");
  st->add_option("path", path)->required();
  st->add_option("--format", format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*v) return cmd_validate(path, format);
    if (*cv) return cmd_convert(conv_in, conv_out, conv_in_fmt, conv_out_fmt);
    if (*p) return cmd_psd(path, format, trial, channel, sa, out);
    if (*f) return cmd_features(path, format, channels, region, bands, scheme, sa, jobs, out);
    if (*g) return cmd_grid(grid);
    if (*st) return cmd_stats(path, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
