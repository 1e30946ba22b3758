#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emoeeg/error.hpp"
#include "emoeeg/ingest.hpp"
#include "emoeeg/matrix.hpp"
#include "emoeeg/parallel.hpp"
#include "emoeeg/spectral.hpp"

namespace emoeeg {

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

struct Region {
  std::string name;
  std::vector<std::string> channels;
};

/// The six scalp regions, in report column order.
inline const std::vector<Region>& regions() {
  static const std::vector<Region> r{
      {"left", {"Fp1", "AF3", "F7", "FC5", "T7"}},
      {"frontal", {"F3", "FC1", "Fz", "F4", "FC2"}},
      {"right", {"Fp2", "AF4", "F8", "FC6", "T8"}},
      {"central", {"CP5", "CP1", "Cz", "C4", "C3", "CP6", "CP2"}},
      {"parietal", {"P3", "P7", "Pz", "P4", "P8"}},
      {"occipital", {"O1", "Oz", "O2", "PO3", "PO4"}},
  };
  return r;
}

inline const Region& region_by_name(std::string_view name) {
  for (const auto& r : regions())
    if (r.name == name) return r;
  throw Error(Errc::invalid_argument, "unknown region '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

struct ColumnMeta {
  std::string channel;
  std::string band;

  std::string label() const { return channel + "_" + band; }
  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

/// Trials x (channel, band) band powers. Columns are channel-major, bands
/// vary fastest within a channel.
struct FeatureMatrix {
  Matrix values;
  std::vector<ColumnMeta> columns;
  spectral::WelchParams params;

  std::size_t column_index(std::string_view channel, std::string_view band) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j].channel == channel && columns[j].band == band) return j;
    throw Error(Errc::invalid_argument, "no feature column " + std::string(channel) + "_" + std::string(band));
  }

  /// Sub-matrix over the named channels and bands, in the same ordering rule.
  FeatureMatrix select(std::span<const std::string> channels, std::span<const spectral::BandDef> bands) const {
    std::vector<std::size_t> idx;
    FeatureMatrix out;
    out.params = params;
    for (const auto& c : channels)
      for (const auto& b : bands) {
        idx.push_back(column_index(c, b.name));
        out.columns.push_back({c, b.name});
      }
    out.values = values.select_cols(idx);
    return out;
  }
};

inline FeatureMatrix build_features(const Dataset& ds, std::span<const std::string> channels,
                                    std::span<const spectral::BandDef> bands, const spectral::WelchParams& params,
                                    std::size_t jobs = 1) {
  std::vector<std::size_t> ch_idx;
  for (const auto& c : channels) ch_idx.push_back(ds.channels().index(c));
  if (bands.empty()) throw Error(Errc::invalid_argument, "build_features: no bands selected");
  spectral::WelchParams p = params;
  p.sample_rate_hz = ds.sample_rate_hz();
  p.validate(ds.n_samples());
  for (const auto& b : bands)
    if (!(b.low_hz >= 0.0 && b.high_hz > b.low_hz && b.high_hz <= p.sample_rate_hz / 2.0))
      throw Error(Errc::invalid_argument, "build_features: band '" + b.name + "' outside [0, fs/2]");

  FeatureMatrix fm;
  fm.params = p;
  for (const auto& c : channels)
    for (const auto& b : bands) fm.columns.push_back({c, b.name});
  fm.values = Matrix(ds.n_trials(), fm.columns.size());

  parallel_for(ds.n_trials() * ch_idx.size(), jobs, [&](std::size_t task) {
    const std::size_t t = task / ch_idx.size();
    const std::size_t ci = task % ch_idx.size();
    const auto psd = spectral::welch_psd(ds.signal(t, ch_idx[ci]), p);
    for (std::size_t bi = 0; bi < bands.size(); ++bi)
      fm.values(t, ci * bands.size() + bi) = spectral::band_power(psd, bands[bi]);
  });
  return fm;
}

/// All 32 channels x the four canonical bands (128 columns).
inline FeatureMatrix build_all_features(const Dataset& ds, const spectral::WelchParams& params, std::size_t jobs = 1) {
  const auto& bands = spectral::canonical_bands();
  return build_features(ds, ds.channels().names(), bands, params, jobs);
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

enum class LabelScheme { arousal_binary, valence_binary, quadrant };

inline std::string_view scheme_name(LabelScheme s) {
  switch (s) {
    case LabelScheme::arousal_binary: return "arousal-binary";
    case LabelScheme::valence_binary: return "valence-binary";
    case LabelScheme::quadrant: return "quadrant-4";
  }
  return "?";
}

inline LabelScheme parse_scheme(std::string_view s) {
  if (s == "arousal" || s == "arousal-binary") return LabelScheme::arousal_binary;
  if (s == "valence" || s == "valence-binary") return LabelScheme::valence_binary;
  if (s == "quadrant" || s == "quadrant-4") return LabelScheme::quadrant;
  throw Error(Errc::invalid_argument, "unknown label scheme '" + std::string(s) + "'");
}

enum class Dimension { valence, arousal };

struct LabelVector {
  std::vector<int> labels;
  LabelScheme scheme = LabelScheme::arousal_binary;
  /// Valence median is NaN for arousal-only labels and vice versa.
  double valence_threshold = std::nan("");
  double arousal_threshold = std::nan("");

  std::size_t n_classes() const { return scheme == LabelScheme::quadrant ? 4 : 2; }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    return counts;
  }
};

/// Median; even counts average the two middle order statistics.
inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(Errc::invalid_argument, "median of empty sequence");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

/// Label 1 iff the rating is strictly above the median of all ratings.
inline LabelVector median_split_labels(std::span<const RatingRecord> ratings, Dimension dim) {
  if (ratings.empty()) throw Error(Errc::invalid_argument, "median_split_labels: no ratings");
  std::vector<double> v;
  v.reserve(ratings.size());
  for (const auto& r : ratings) v.push_back(dim == Dimension::valence ? r.valence : r.arousal);
  const double m = median(v);
  LabelVector out;
  out.scheme = dim == Dimension::valence ? LabelScheme::valence_binary : LabelScheme::arousal_binary;
  (dim == Dimension::valence ? out.valence_threshold : out.arousal_threshold) = m;
  out.labels.reserve(v.size());
  for (double x : v) out.labels.push_back(x > m ? 1 : 0);
  return out;
}

/// 0 HAHV, 1 LAHV, 2 HALV, 3 LALV.
inline LabelVector quadrant_labels(std::span<const RatingRecord> ratings) {
  const auto a = median_split_labels(ratings, Dimension::arousal);
  const auto v = median_split_labels(ratings, Dimension::valence);
  LabelVector out;
  out.scheme = LabelScheme::quadrant;
  out.arousal_threshold = a.arousal_threshold;
  out.valence_threshold = v.valence_threshold;
  out.labels.reserve(ratings.size());
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const bool ha = a.labels[i] == 1;
    const bool hv = v.labels[i] == 1;
    out.labels.push_back(hv ? (ha ? HAHV : LAHV) : (ha ? HALV : LALV));
  }
  return out;
}

inline LabelVector make_labels(std::span<const RatingRecord> ratings, LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::arousal_binary: return median_split_labels(ratings, Dimension::arousal);
    case LabelScheme::valence_binary: return median_split_labels(ratings, Dimension::valence);
    case LabelScheme::quadrant: return quadrant_labels(ratings);
  }
  throw Error(Errc::invalid_argument, "bad label scheme");
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// Per-column z-scoring with population statistics from the training rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;
  /// Columns whose spread was zero; their std is forced to 1.
  std::vector<bool> degenerate;

  Matrix apply(const Matrix& m) const {
    if (m.cols() != mean.size()) throw Error(Errc::dimension_mismatch, "standardizer: column count mismatch");
    Matrix out = m;
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = (out(r, c) - mean[c]) / stddev[c];
    return out;
  }

  Matrix invert(const Matrix& z) const {
    if (z.cols() != mean.size()) throw Error(Errc::dimension_mismatch, "standardizer: column count mismatch");
    Matrix out = z;
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = out(r, c) * stddev[c] + mean[c];
    return out;
  }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

inline Standardizer fit_standardizer(const Matrix& train) {
  if (train.rows() == 0) throw Error(Errc::invalid_argument, "fit_standardizer: no training rows");
  const std::size_t n = train.rows();
  Standardizer s;
  s.mean.assign(train.cols(), 0.0);
  s.stddev.assign(train.cols(), 1.0);
  s.degenerate.assign(train.cols(), false);
  for (std::size_t c = 0; c < train.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += train(r, c);
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (train(r, c) - mu) * (train(r, c) - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[c] = mu;
    if (!(sd > 1e-12 * std::abs(mu))) {
      s.degenerate[c] = true;
    } else {
      s.stddev[c] = sd;
    }
  }
  return s;
}

inline Standardizer fit_standardizer(const FeatureMatrix& train) { return fit_standardizer(train.values); }

inline FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& m) {
  FeatureMatrix out = m;
  out.values = s.apply(m.values);
  return out;
}

// ---------------------------------------------------------------------------
// Rating statistics
// ---------------------------------------------------------------------------

struct RatingStats {
  double valence_mean, valence_median, valence_std;
  double arousal_mean, arousal_median, arousal_std;
  /// |std(valence) - std(arousal)|.
  double std_difference;
  std::vector<std::size_t> quadrant_counts;
};

inline RatingStats rating_stats(std::span<const RatingRecord> ratings) {
  if (ratings.empty()) throw Error(Errc::invalid_argument, "rating_stats: no ratings");
  auto describe = [&](Dimension d, double& mean, double& med, double& sd) {
    std::vector<double> v;
    for (const auto& r : ratings) v.push_back(d == Dimension::valence ? r.valence : r.arousal);
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size()));
    med = median(std::move(v));
  };
  RatingStats s{};
  describe(Dimension::valence, s.valence_mean, s.valence_median, s.valence_std);
  describe(Dimension::arousal, s.arousal_mean, s.arousal_median, s.arousal_std);
  s.std_difference = std::abs(s.valence_std - s.arousal_std);
  s.quadrant_counts = quadrant_labels(ratings).class_counts();
  return s;
}

}  // namespace emoeeg
