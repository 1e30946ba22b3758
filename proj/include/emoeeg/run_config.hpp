#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emoeeg/classify/train_config.hpp"
#include "emoeeg/error.hpp"
#include "emoeeg/evaluate.hpp"
#include "emoeeg/featurize.hpp"
#include "emoeeg/ingest.hpp"
#include "emoeeg/spectral.hpp"

namespace emoeeg {

/// Resolved settings for a grid run. Layering is defaults, then a key=value
/// config file, then command-line overrides; all go through set().
struct RunConfig {
  std::string dataset;
  std::string format = "auto";
  std::size_t trim_baseline = 0;
  spectral::WelchParams welch;
  std::vector<spectral::BandDef> bands{spectral::canonical_bands().begin(), spectral::canonical_bands().end()};
  std::vector<std::string> regions{"left", "frontal", "right", "central", "parietal", "occipital"};
  std::vector<ClassifierKind> classifiers{ClassifierKind::knn, ClassifierKind::svm, ClassifierKind::mlp};
  std::vector<LabelScheme> schemes{LabelScheme::arousal_binary, LabelScheme::valence_binary};
  std::size_t folds = 10;
  bool stratify = true;
  bool standardize = true;
  TrainConfig train;
  std::string compare;

  // Where and how fast to run; never part of the echoed configuration.
  std::string output_dir;
  std::size_t jobs = 1;

  void set(std::string_view key, std::string_view value);

  /// Echoed configuration, in a fixed key order.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : to_pairs()) out += k + " = " + v + "\n";
    return out;
  }

  void load_file(const std::filesystem::path& path);

  void validate() const {
    if (dataset.empty()) throw Error(Errc::invalid_config, "config: 'dataset' is required");
    if (format != "auto") parse_format(format);
    if (folds < 2) throw Error(Errc::invalid_config, "config: 'folds' must be >= 2");
    if (bands.empty() || regions.empty() || classifiers.empty() || schemes.empty())
      throw Error(Errc::invalid_config, "config: bands, regions, classifiers and schemes must be non-empty");
    for (const auto& r : regions) region_by_name(r);
    train.validate();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T v{};
  const auto* end = value.data() + value.size();
  auto res = std::from_chars(value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw Error(Errc::invalid_config, "config key '" + std::string(key) + "': bad value '" + std::string(value) + "'");
  return v;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(Errc::invalid_config, "config key '" + std::string(key) + "': expected true/false, got '" +
                                        std::string(value) + "'");
}

/// Canonical band name, or `name:low:high` for a custom band.
inline spectral::BandDef parse_band(std::string_view s) {
  const auto c1 = s.find(':');
  if (c1 == std::string_view::npos) return spectral::band_by_name(s);
  const auto c2 = s.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw Error(Errc::invalid_config, "band spec '" + std::string(s) + "': expected name:low:high");
  spectral::BandDef b{std::string(s.substr(0, c1)), parse_number<double>("bands", s.substr(c1 + 1, c2 - c1 - 1)),
                      parse_number<double>("bands", s.substr(c2 + 1))};
  if (b.name.empty() || !(b.low_hz >= 0.0) || !(b.high_hz > b.low_hz))
    throw Error(Errc::invalid_config, "band spec '" + std::string(s) + "': need a name and 0 <= low < high");
  return b;
}

inline std::string band_spec(const spectral::BandDef& b) {
  for (const auto& c : spectral::canonical_bands())
    if (c == b) return b.name;
  return b.name + ":" + format_double(b.low_hz) + ":" + format_double(b.high_hz);
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace detail

inline void RunConfig::set(std::string_view key, std::string_view raw) {
  using namespace detail;
  const std::string value = trim(raw);
  const std::string k(key);
  if (k == "dataset") dataset = value;
  else if (k == "format") { if (value != "auto") parse_format(value); format = value; }
  else if (k == "trim_baseline") trim_baseline = parse_number<std::size_t>(k, value);
  else if (k == "segment_len") welch.segment_len = parse_number<std::size_t>(k, value);
  else if (k == "overlap") welch.overlap = parse_number<std::size_t>(k, value);
  else if (k == "window") {
    if (value == "hann") welch.window = spectral::Window::hann_periodic;
    else if (value == "rectangular") welch.window = spectral::Window::rectangular;
    else throw Error(Errc::invalid_config, "config key 'window': expected hann or rectangular");
  } else if (k == "bands") {
    bands.clear();
    for (const auto& b : split_list(value)) bands.push_back(parse_band(b));
  } else if (k == "regions") {
    regions = split_list(value);
    for (const auto& r : regions) region_by_name(r);
  } else if (k == "classifiers") {
    classifiers.clear();
    for (const auto& c : split_list(value)) classifiers.push_back(parse_classifier(c));
  } else if (k == "schemes") {
    schemes.clear();
    for (const auto& s : split_list(value)) schemes.push_back(parse_scheme(s));
  } else if (k == "folds") folds = parse_number<std::size_t>(k, value);
  else if (k == "stratify") stratify = parse_bool(k, value);
  else if (k == "standardize") standardize = parse_bool(k, value);
  else if (k == "seed") train.seed = parse_number<std::uint64_t>(k, value);
  else if (k == "knn_k") train.knn_k = parse_number<std::size_t>(k, value);
  else if (k == "svm_kernel") train.svm_kernel = parse_kernel(value);
  else if (k == "svm_c") train.svm_c = parse_number<double>(k, value);
  else if (k == "svm_gamma") train.svm_gamma = parse_number<double>(k, value);
  else if (k == "svm_tol") train.svm_tol = parse_number<double>(k, value);
  else if (k == "svm_max_passes") train.svm_max_passes = parse_number<std::size_t>(k, value);
  else if (k == "mlp_hidden") train.mlp_hidden = parse_number<std::size_t>(k, value);
  else if (k == "mlp_lr") train.mlp_learning_rate = parse_number<double>(k, value);
  else if (k == "mlp_batch") train.mlp_batch = parse_number<std::size_t>(k, value);
  else if (k == "mlp_epochs") train.mlp_epochs = parse_number<std::size_t>(k, value);
  else if (k == "compare") compare = value;
  else if (k == "output_dir") output_dir = value;
  else if (k == "jobs") jobs = parse_number<std::size_t>(k, value);
  else throw Error(Errc::invalid_config, "unknown config key '" + k + "'");
}

inline std::vector<std::pair<std::string, std::string>> RunConfig::to_pairs() const {
  using detail::format_double;
  using detail::join;
  return {
      {"dataset", dataset},
      {"format", format},
      {"trim_baseline", std::to_string(trim_baseline)},
      {"segment_len", std::to_string(welch.segment_len)},
      {"overlap", std::to_string(welch.overlap)},
      {"window", welch.window == spectral::Window::hann_periodic ? "hann" : "rectangular"},
      {"bands", join(bands, detail::band_spec)},
      {"regions", join(regions, [](const std::string& s) { return s; })},
      {"classifiers", join(classifiers, [](ClassifierKind c) { return std::string(classifier_name(c)); })},
      {"schemes", join(schemes, [](LabelScheme s) { return std::string(scheme_name(s)); })},
      {"folds", std::to_string(folds)},
      {"stratify", stratify ? "true" : "false"},
      {"standardize", standardize ? "true" : "false"},
      {"seed", std::to_string(train.seed)},
      {"knn_k", std::to_string(train.knn_k)},
      {"svm_kernel", std::string(kernel_name(train.svm_kernel))},
      {"svm_c", format_double(train.svm_c)},
      {"svm_gamma", format_double(train.svm_gamma)},
      {"svm_tol", format_double(train.svm_tol)},
      {"svm_max_passes", std::to_string(train.svm_max_passes)},
      {"mlp_hidden", std::to_string(train.mlp_hidden)},
      {"mlp_lr", format_double(train.mlp_learning_rate)},
      {"mlp_batch", std::to_string(train.mlp_batch)},
      {"mlp_epochs", std::to_string(train.mlp_epochs)},
      {"compare", compare},
  };
}

/// Reads `key = value` lines; '#' starts a comment.
inline void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::io, "cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_config, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set(detail::trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(Errc::invalid_config, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace emoeeg
