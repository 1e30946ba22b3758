#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emoeeg/classify.hpp"
#include "emoeeg/error.hpp"
#include "emoeeg/featurize.hpp"
#include "emoeeg/matrix.hpp"
#include "emoeeg/parallel.hpp"
#include "emoeeg/random.hpp"

namespace emoeeg {

// ---------------------------------------------------------------------------
// Accuracy
// ---------------------------------------------------------------------------

/// Half-up rounding to two decimals.
inline double round2(double x) { return std::floor(x * 100.0 + 0.5) / 100.0; }

/// Percent of matching entries, rounded half-up to two decimals. Computed in
/// integers so values like 2/3 -> 66.67 are exact.
inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw Error(Errc::dimension_mismatch, "accuracy: length mismatch");
  if (pred.empty()) throw Error(Errc::invalid_argument, "accuracy: empty input");
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  const std::uint64_t total = pred.size();
  const std::uint64_t hundredths = (20000 * hits + total) / (2 * total);
  return static_cast<double>(hundredths) / 100.0;
}

// ---------------------------------------------------------------------------
// Fold plans
// ---------------------------------------------------------------------------

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;
  bool stratified = true;

  std::size_t k() const { return folds.size(); }

  /// Rows outside fold `f`, in plan order.
  std::vector<std::size_t> train_indices(std::size_t f) const {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
    return out;
  }

  /// Same plan with every index mapped through `perm` (old index -> new index).
  FoldPlan remapped(std::span<const std::size_t> perm) const {
    FoldPlan out = *this;
    for (auto& f : out.folds)
      for (auto& i : f) i = perm[i];
    return out;
  }
};

/// Shuffles rows with the seed, then deals them round-robin into k folds.
/// Stratified plans shuffle within each class and deal the classes one after
/// another, continuing the round-robin position, which keeps both overall
/// fold sizes and per-class counts within one of each other.
inline FoldPlan kfold_split(std::size_t n, std::size_t k, std::span<const int> labels, std::uint64_t seed,
                            bool stratified) {
  if (k < 2) throw Error(Errc::invalid_argument, "kfold: k must be >= 2");
  if (k > n) throw Error(Errc::invalid_argument, "kfold: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  if (stratified && labels.size() != n) throw Error(Errc::dimension_mismatch, "kfold: label count mismatch");

  SplitMix64 rng(seed);
  std::vector<std::size_t> dealt;
  dealt.reserve(n);
  if (stratified) {
    int max_label = 0;
    for (int l : labels) {
      if (l < 0) throw Error(Errc::invalid_argument, "kfold: labels must be non-negative");
      max_label = std::max(max_label, l);
    }
    for (int c = 0; c <= max_label; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i)
        if (labels[i] == c) members.push_back(i);
      rng.shuffle(std::span<std::size_t>(members));
      dealt.insert(dealt.end(), members.begin(), members.end());
    }
  } else {
    dealt.resize(n);
    std::iota(dealt.begin(), dealt.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(dealt));
  }
  FoldPlan plan;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.folds.resize(k);
  for (std::size_t p = 0; p < dealt.size(); ++p) plan.folds[p % k].push_back(dealt[p]);
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

/// True when the folds partition 0..n-1 exactly.
inline bool is_partition(const FoldPlan& plan, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& f : plan.folds)
    for (std::size_t i : f) {
      if (i >= n || seen[i]++) return false;
    }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

// ---------------------------------------------------------------------------
// Classifiers behind one interface
// ---------------------------------------------------------------------------

enum class ClassifierKind { knn, svm, mlp };

inline std::string_view classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::mlp: return "mlp";
  }
  return "?";
}

inline ClassifierKind parse_classifier(std::string_view s) {
  if (s == "knn") return ClassifierKind::knn;
  if (s == "svm") return ClassifierKind::svm;
  if (s == "mlp") return ClassifierKind::mlp;
  throw Error(Errc::invalid_argument, "unknown classifier '" + std::string(s) + "'");
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::knn;
  TrainConfig config;
};

using TrainedModel = std::variant<KnnModel, SvmModel, MlpModel>;

/// Everything fitted on one fold's training rows.
struct FoldModel {
  std::optional<Standardizer> standardizer;
  TrainedModel model;
};

struct CvOptions {
  bool standardize = true;
  /// Number of classes in the label scheme (2 for binary splits).
  std::size_t n_classes = 2;
};

inline Matrix prepare_rows(const FoldModel& fm, const Matrix& rows) {
  return fm.standardizer ? fm.standardizer->apply(rows) : rows;
}

/// Trains one classifier on `train` rows (labels 0..K-1).
inline TrainedModel fit_classifier(const ClassifierSpec& spec, const Matrix& x, std::span<const int> y,
                                   std::size_t n_classes) {
  switch (spec.kind) {
    case ClassifierKind::knn:
      return knn_fit(x, std::vector<int>(y.begin(), y.end()), std::min(spec.config.knn_k, x.rows()));
    case ClassifierKind::svm: {
      if (n_classes != 2) throw Error(Errc::invalid_argument, "svm is binary-only; use knn or mlp for quadrant labels");
      std::vector<int> signed_y;
      signed_y.reserve(y.size());
      for (int l : y) signed_y.push_back(l == 1 ? 1 : -1);
      return svm_train(x, signed_y, spec.config);
    }
    case ClassifierKind::mlp: return mlp_train(x, y, spec.config, n_classes);
  }
  throw Error(Errc::invalid_argument, "bad classifier kind");
}

inline std::vector<int> predict(const TrainedModel& model, const Matrix& rows) {
  return std::visit(
      [&](const auto& m) -> std::vector<int> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KnnModel>) {
          return knn_predict(m, rows);
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          auto signed_pred = svm_predict(m, rows);
          for (int& p : signed_pred) p = p == 1 ? 1 : 0;
          return signed_pred;
        } else {
          return mlp_predict(m, rows);
        }
      },
      model);
}

inline FoldModel train_fold(const Matrix& features, std::span<const int> labels, const ClassifierSpec& spec,
                            std::span<const std::size_t> train_idx, const CvOptions& opts = {}) {
  const Matrix raw = features.select_rows(train_idx);
  std::vector<int> y;
  y.reserve(train_idx.size());
  for (std::size_t i : train_idx) y.push_back(labels[i]);
  FoldModel fm{std::nullopt, KnnModel{}};
  if (opts.standardize) fm.standardizer = fit_standardizer(raw);
  fm.model = fit_classifier(spec, prepare_rows(fm, raw), y, opts.n_classes);
  return fm;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct CvReport {
  std::string classifier;
  std::string region;
  std::string band;
  std::vector<double> fold_accuracies;
  /// Arithmetic mean of fold_accuracies, rounded half-up to two decimals.
  double mean = 0.0;
  bool valid = true;
  std::string diagnostic;
};

inline double mean_of_folds(std::span<const double> folds) {
  if (folds.empty()) return 0.0;
  double sum = 0.0;
  for (double f : folds) sum += f;
  return round2(sum / static_cast<double>(folds.size()));
}

/// Generic k-fold loop. `fit_predict(train_x, train_y, test_x)` returns test
/// predictions; features are z-scored with training-row statistics first
/// when opts.standardize is set. A training fold with one class marks the
/// report invalid instead of scoring it.
template <class FitPredict>
CvReport cross_validate_with(const Matrix& features, std::span<const int> labels, FitPredict&& fit_predict,
                             const FoldPlan& folds, const CvOptions& opts = {}) {
  if (features.rows() != labels.size()) throw Error(Errc::dimension_mismatch, "cross_validate: row/label mismatch");
  CvReport report;
  for (std::size_t f = 0; f < folds.k(); ++f) {
    const auto train_idx = folds.train_indices(f);
    const auto& test_idx = folds.folds[f];
    if (test_idx.empty() || train_idx.empty()) {
      report.valid = false;
      report.diagnostic = "fold " + std::to_string(f) + " is empty";
      break;
    }
    std::vector<int> ytr, yte;
    for (std::size_t i : train_idx) ytr.push_back(labels[i]);
    for (std::size_t i : test_idx) yte.push_back(labels[i]);
    if (std::all_of(ytr.begin(), ytr.end(), [&](int l) { return l == ytr[0]; })) {
      report.valid = false;
      report.diagnostic = "training fold " + std::to_string(f) + " contains a single class (" +
                          std::to_string(ytr[0]) + ")";
      break;
    }
    Matrix xtr = features.select_rows(train_idx);
    Matrix xte = features.select_rows(test_idx);
    if (opts.standardize) {
      const auto s = fit_standardizer(xtr);
      xtr = s.apply(xtr);
      xte = s.apply(xte);
    }
    const std::vector<int> pred = fit_predict(xtr, std::span<const int>(ytr), xte);
    report.fold_accuracies.push_back(accuracy(pred, yte));
  }
  if (!report.valid) report.fold_accuracies.clear();
  report.mean = report.valid ? mean_of_folds(report.fold_accuracies) : 0.0;
  return report;
}

inline CvReport cross_validate(const Matrix& features, std::span<const int> labels, const ClassifierSpec& spec,
                               const FoldPlan& folds, const CvOptions& opts = {}) {
  CvReport r;
  try {
    r = cross_validate_with(
        features, labels,
        [&](const Matrix& xtr, std::span<const int> ytr, const Matrix& xte) {
          return predict(fit_classifier(spec, xtr, ytr, opts.n_classes), xte);
        },
        folds, opts);
  } catch (const Error& e) {
    r = CvReport{};
    r.valid = false;
    r.diagnostic = e.what();
  }
  r.classifier = std::string(classifier_name(spec.kind));
  return r;
}

// ---------------------------------------------------------------------------
// Region x band grids
// ---------------------------------------------------------------------------

struct RankedEntry {
  std::string name;
  double score = 0.0;
};

struct ClassifierGrid {
  std::string classifier;
  /// cells[band][region], in the order of GridReport::bands / regions.
  std::vector<std::vector<CvReport>> cells;
  std::vector<RankedEntry> top_regions;
  std::vector<RankedEntry> top_bands;
};

struct GridReport {
  LabelScheme scheme = LabelScheme::arousal_binary;
  double valence_threshold = std::nan("");
  double arousal_threshold = std::nan("");
  std::vector<std::size_t> class_counts;
  std::vector<std::string> regions;
  std::vector<std::string> bands;
  std::vector<ClassifierGrid> grids;
};

struct GridOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  bool standardize = true;
  std::size_t jobs = 1;
};

/// Descending by score; equal scores keep their input order.
inline std::vector<RankedEntry> top_k(std::vector<RankedEntry> entries, std::size_t k) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const RankedEntry& a, const RankedEntry& b) { return a.score > b.score; });
  if (entries.size() > k) entries.resize(k);
  return entries;
}

/// Each region's score is its best valid cell over bands, and each band's is
/// its best valid cell over regions. Regions or bands with no valid cell are left out.
inline void summarize(ClassifierGrid& g, std::span<const std::string> regions, std::span<const std::string> bands) {
  std::vector<RankedEntry> by_region, by_band;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::optional<double> best;
    for (std::size_t b = 0; b < bands.size(); ++b)
      if (g.cells[b][r].valid) best = std::max(best.value_or(-1.0), g.cells[b][r].mean);
    if (best) by_region.push_back({regions[r], *best});
  }
  for (std::size_t b = 0; b < bands.size(); ++b) {
    std::optional<double> best;
    for (std::size_t r = 0; r < regions.size(); ++r)
      if (g.cells[b][r].valid) best = std::max(best.value_or(-1.0), g.cells[b][r].mean);
    if (best) by_band.push_back({bands[b], *best});
  }
  g.top_regions = top_k(std::move(by_region), 3);
  g.top_bands = top_k(std::move(by_band), 2);
}

/// One CvReport per (classifier, band, region) from a precomputed feature
/// matrix that holds every needed (channel, band) column. All cells share one
/// FoldPlan built from the scheme's labels.
inline GridReport run_grid(const FeatureMatrix& features, const LabelVector& labels,
                           std::span<const ClassifierSpec> classifiers, std::span<const Region> regions,
                           std::span<const spectral::BandDef> bands, const GridOptions& opts) {
  if (features.values.rows() != labels.labels.size())
    throw Error(Errc::dimension_mismatch, "run_grid: feature/label row mismatch");
  GridReport report;
  report.scheme = labels.scheme;
  report.valence_threshold = labels.valence_threshold;
  report.arousal_threshold = labels.arousal_threshold;
  report.class_counts = labels.class_counts();
  for (const auto& r : regions) report.regions.push_back(r.name);
  for (const auto& b : bands) report.bands.push_back(b.name);

  const FoldPlan plan = kfold_split(labels.labels.size(), opts.folds, labels.labels, opts.seed, opts.stratified);
  const CvOptions cv{opts.standardize, labels.n_classes()};

  const std::size_t n_cells = classifiers.size() * bands.size() * regions.size();
  std::vector<CvReport> flat(n_cells);
  parallel_for(n_cells, opts.jobs, [&](std::size_t cell) {
    const std::size_t c = cell / (bands.size() * regions.size());
    const std::size_t b = (cell / regions.size()) % bands.size();
    const std::size_t r = cell % regions.size();
    const auto sub = features.select(regions[r].channels, bands.subspan(b, 1));
    CvReport rep = cross_validate(sub.values, labels.labels, classifiers[c], plan, cv);
    rep.region = regions[r].name;
    rep.band = bands[b].name;
    flat[cell] = std::move(rep);
  });

  for (std::size_t c = 0; c < classifiers.size(); ++c) {
    ClassifierGrid g;
    g.classifier = std::string(classifier_name(classifiers[c].kind));
    g.cells.resize(bands.size());
    for (std::size_t b = 0; b < bands.size(); ++b)
      for (std::size_t r = 0; r < regions.size(); ++r)
        g.cells[b].push_back(std::move(flat[(c * bands.size() + b) * regions.size() + r]));
    summarize(g, report.regions, report.bands);
    report.grids.push_back(std::move(g));
  }
  return report;
}

/// Dataset-level entry point: builds the features for every channel the
/// regions use, labels the trials, then runs the grid.
inline GridReport run_grid(const Dataset& ds, std::span<const ClassifierSpec> classifiers,
                           std::span<const Region> regions, std::span<const spectral::BandDef> bands,
                           const spectral::WelchParams& params, LabelScheme scheme, const GridOptions& opts) {
  std::vector<std::string> channels;
  for (const auto& r : regions)
    for (const auto& c : r.channels)
      if (std::find(channels.begin(), channels.end(), c) == channels.end()) channels.push_back(c);
  const auto features = build_features(ds, channels, bands, params, opts.jobs);
  const auto labels = make_labels(ds.ratings(), scheme);
  return run_grid(features, labels, classifiers, regions, bands, opts);
}

}  // namespace emoeeg
