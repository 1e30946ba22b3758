#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emoeeg/evaluate.hpp"
#include "emoeeg/featurize.hpp"

namespace emoeeg {

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

inline std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const CvReport& r) {
  nlohmann::ordered_json j{{"classifier", r.classifier}, {"region", r.region},   {"band", r.band},
                           {"fold_accuracies", r.fold_accuracies}, {"mean", r.mean}, {"valid", r.valid}};
  if (!r.valid) j["diagnostic"] = r.diagnostic;
  return j;
}

inline nlohmann::ordered_json to_json(const GridReport& g) {
  nlohmann::ordered_json j;
  j["scheme"] = scheme_name(g.scheme);
  nlohmann::ordered_json thresholds = nlohmann::ordered_json::object();
  if (!std::isnan(g.valence_threshold)) thresholds["valence_median"] = g.valence_threshold;
  if (!std::isnan(g.arousal_threshold)) thresholds["arousal_median"] = g.arousal_threshold;
  j["thresholds"] = thresholds;
  j["class_counts"] = g.class_counts;
  j["bands"] = g.bands;
  j["regions"] = g.regions;
  auto cells = nlohmann::ordered_json::array();
  auto summary = nlohmann::ordered_json::object();
  for (const auto& grid : g.grids) {
    for (const auto& row : grid.cells)
      for (const auto& cell : row) cells.push_back(to_json(cell));
    auto ranked = [](const std::vector<RankedEntry>& v) {
      auto a = nlohmann::ordered_json::array();
      for (const auto& e : v) a.push_back({{"name", e.name}, {"score", e.score}});
      return a;
    };
    summary[grid.classifier] = {{"top_regions", ranked(grid.top_regions)}, {"top_bands", ranked(grid.top_bands)}};
  }
  j["cells"] = std::move(cells);
  j["summary"] = std::move(summary);
  return j;
}

/// Band rows x region columns per classifier, one table per classifier.
inline std::string grid_text(const GridReport& g) {
  using namespace detail;
  std::string out = "Label scheme: " + std::string(scheme_name(g.scheme));
  if (!std::isnan(g.arousal_threshold)) out += "  arousal median=" + fixed2(g.arousal_threshold);
  if (!std::isnan(g.valence_threshold)) out += "  valence median=" + fixed2(g.valence_threshold);
  out += "  class counts=";
  for (std::size_t i = 0; i < g.class_counts.size(); ++i) out += (i ? "/" : "") + std::to_string(g.class_counts[i]);
  out += "\n\n";
  for (const auto& grid : g.grids) {
    out += upper(grid.classifier) + "\n";
    out += pad_right("Bands", 8);
    for (const auto& r : g.regions) out += pad(r, 11);
    out += "\n";
    for (std::size_t b = 0; b < g.bands.size(); ++b) {
      out += pad_right(g.bands[b], 8);
      for (const auto& cell : grid.cells[b]) out += pad(cell.valid ? fixed2(cell.mean) : "n/a", 11);
      out += "\n";
    }
    auto ranked = [](const std::vector<RankedEntry>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].name + " (" + fixed2(v[i].score) + ")";
      return s.empty() ? std::string("none") : s;
    };
    out += "Top regions: " + ranked(grid.top_regions) + "\n";
    out += "Top bands:   " + ranked(grid.top_bands) + "\n";
    for (const auto& row : grid.cells)
      for (const auto& cell : row)
        if (!cell.valid) out += "  invalid " + cell.band + "x" + cell.region + ": " + cell.diagnostic + "\n";
    out += "\n";
  }
  return out;
}

inline std::string grid_csv_header() { return "scheme,classifier,band,region,fold,accuracy\n"; }

/// Long format: one row per fold plus a "mean" row per cell; invalid cells
/// get a single "invalid" row with an empty accuracy.
inline std::string grid_csv_rows(const GridReport& g) {
  std::string out;
  const std::string scheme(scheme_name(g.scheme));
  for (const auto& grid : g.grids)
    for (const auto& row : grid.cells)
      for (const auto& cell : row) {
        const std::string prefix = scheme + "," + cell.classifier + "," + cell.band + "," + cell.region + ",";
        if (!cell.valid) {
          out += prefix + "invalid,\n";
          continue;
        }
        for (std::size_t f = 0; f < cell.fold_accuracies.size(); ++f)
          out += prefix + std::to_string(f) + "," + detail::fixed2(cell.fold_accuracies[f]) + "\n";
        out += prefix + "mean," + detail::fixed2(cell.mean) + "\n";
      }
  return out;
}

/// Side-by-side comparison with published grids. `published` maps
/// scheme -> classifier -> band -> region -> accuracy. Delta = ours - published.
inline std::string compare_text(const GridReport& g, const nlohmann::json& published) {
  using namespace detail;
  const std::string scheme(scheme_name(g.scheme));
  if (!published.contains(scheme)) return "No published values for scheme " + scheme + "\n";
  const auto& pub = published.at(scheme);
  std::string out = "Comparison for " + scheme + " (ours / published / delta)\n\n";
  for (const auto& grid : g.grids) {
    if (!pub.contains(grid.classifier)) continue;
    const auto& pc = pub.at(grid.classifier);
    out += upper(grid.classifier) + "\n" + pad_right("Bands", 8);
    for (const auto& r : g.regions) out += pad(r, 24);
    out += "\n";
    for (std::size_t b = 0; b < g.bands.size(); ++b) {
      out += pad_right(g.bands[b], 8);
      for (std::size_t r = 0; r < g.regions.size(); ++r) {
        const auto& cell = grid.cells[b][r];
        std::string text = cell.valid ? fixed2(cell.mean) : "n/a";
        if (pc.contains(g.bands[b]) && pc.at(g.bands[b]).contains(g.regions[r])) {
          const double p = pc.at(g.bands[b]).at(g.regions[r]).get<double>();
          text += " / " + fixed2(p);
          if (cell.valid) {
            const double d = round2(cell.mean - p);
            text += " / " + std::string(d >= 0 ? "+" : "") + fixed2(d);
          }
        }
        out += pad(text, 24);
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace emoeeg
