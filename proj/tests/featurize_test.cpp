#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "emoeeg/featurize.hpp"
#include "emoeeg/ingest.hpp"
#include "oracles.hpp"

using namespace emoeeg;

namespace {

Dataset small_dataset(std::uint64_t seed = 1, std::size_t trials = 8) {
  SynthSpec s;
  s.seed = seed;
  s.n_trials = trials;
  s.n_samples = 1024;
  return synth_dataset(s);
}

std::vector<RatingRecord> valence_only(std::initializer_list<double> v) {
  std::vector<RatingRecord> out;
  for (double x : v) out.push_back({x, 5.0});
  return out;
}

}  // namespace

TEST(Regions, MatchListedChannels) {
  const ChannelMap channels;
  ASSERT_EQ(regions().size(), 6u);
  std::vector<std::string> all;
  for (const auto& r : regions()) {
    EXPECT_EQ(r.channels.size(), r.name == "central" ? 7u : 5u) << r.name;
    for (const auto& c : r.channels) {
      EXPECT_TRUE(channels.find(c).has_value()) << c;
      all.push_back(c);
    }
  }
  EXPECT_EQ(region_by_name("left").channels, (std::vector<std::string>{"Fp1", "AF3", "F7", "FC5", "T7"}));
  EXPECT_EQ(region_by_name("occipital").channels, (std::vector<std::string>{"O1", "Oz", "O2", "PO3", "PO4"}));
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end()) << "regions overlap";
  EXPECT_THROW(region_by_name("temporal"), Error);
}

TEST(BuildFeatures, AllChannelsAllBands) {
  const auto ds = small_dataset();
  const auto fm = build_all_features(ds, spectral::WelchParams{});
  EXPECT_EQ(fm.values.rows(), 8u);
  EXPECT_EQ(fm.values.cols(), 128u);
  EXPECT_EQ(fm.columns[0], (ColumnMeta{"Fp1", "theta"}));
  EXPECT_EQ(fm.columns[3], (ColumnMeta{"Fp1", "gamma"}));
  EXPECT_EQ(fm.columns[4], (ColumnMeta{"AF3", "theta"}));
  EXPECT_EQ(fm.columns[127], (ColumnMeta{"O2", "gamma"}));
}

TEST(BuildFeatures, RegionSingleBand) {
  const auto ds = small_dataset();
  const std::vector<spectral::BandDef> alpha{spectral::band_by_name("alpha")};
  const auto fm = build_features(ds, region_by_name("left").channels, alpha, spectral::WelchParams{});
  EXPECT_EQ(fm.values.cols(), 5u);
}

TEST(BuildFeatures, CellEqualsBandPowerOfWelch) {
  const auto ds = small_dataset(3, 2);
  const auto fm = build_all_features(ds, spectral::WelchParams{});
  const auto psd = spectral::welch_psd(ds.signal(1, ds.channels().index("Cz")), spectral::WelchParams{});
  EXPECT_EQ(fm.values(1, fm.column_index("Cz", "beta")), spectral::band_power(psd, spectral::band_by_name("beta")));
}

TEST(BuildFeatures, ZeroSignal) {
  const Dataset ds(128.0, 3, 512, std::vector<double>(3 * 32 * 512, 0.0), {{1, 1}, {2, 2}, {3, 3}});
  const auto fm = build_all_features(ds, spectral::WelchParams{});
  for (double v : fm.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(BuildFeatures, UnknownChannel) {
  const auto ds = small_dataset();
  const std::vector<std::string> ch{"Fp1", "EOG1"};
  const auto& bands = spectral::canonical_bands();
  try {
    build_features(ds, ch, bands, spectral::WelchParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_channel);
  }
}

TEST(BuildFeatures, DeterministicAcrossThreadCounts) {
  const auto ds = small_dataset(4, 6);
  const auto a = build_all_features(ds, spectral::WelchParams{}, 1);
  const auto b = build_all_features(ds, spectral::WelchParams{}, 4);
  EXPECT_EQ(a.columns, b.columns);
  EXPECT_EQ(a.values, b.values);
}

TEST(MedianSplit, EvenCount) {
  const auto lv = median_split_labels(valence_only({1, 2, 3, 9}), Dimension::valence);
  EXPECT_DOUBLE_EQ(lv.valence_threshold, 2.5);
  EXPECT_EQ(lv.labels, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(lv.scheme, LabelScheme::valence_binary);
}

TEST(MedianSplit, TiesGoLow) {
  const auto lv = median_split_labels(valence_only({4, 4, 4}), Dimension::valence);
  EXPECT_EQ(lv.labels, (std::vector<int>{0, 0, 0}));
}

TEST(MedianSplit, OddCountAgainstSortOracle) {
  const auto r = valence_only({5, 1, 8, 8, 3});
  EXPECT_DOUBLE_EQ(oracle::sorted_median({5, 1, 8, 8, 3}), 5.0);
  const auto lv = median_split_labels(r, Dimension::valence);
  EXPECT_DOUBLE_EQ(lv.valence_threshold, 5.0);
  EXPECT_EQ(lv.labels, (std::vector<int>{0, 0, 1, 1, 0}));
}

TEST(MedianSplit, RandomAgainstSortOracle) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RatingRecord> r;
    std::vector<double> v;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::round(rng.uniform(0.0, 9.0) * 4.0) / 4.0;  // quarter steps force ties
      r.push_back({5.0, x});
      v.push_back(x);
    }
    const auto lv = median_split_labels(r, Dimension::arousal);
    const double m = oracle::sorted_median(v);
    ASSERT_DOUBLE_EQ(lv.arousal_threshold, m);
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(lv.labels[i], v[i] > m ? 1 : 0);
    // Both labels appear iff not all ratings sit on one side.
    const bool mixed = std::any_of(v.begin(), v.end(), [&](double x) { return x > m; });
    const bool has_one = std::count(lv.labels.begin(), lv.labels.end(), 1) > 0;
    ASSERT_EQ(mixed, has_one);
  }
}

TEST(MedianSplit, EmptyInput) {
  EXPECT_THROW(median_split_labels({}, Dimension::valence), Error);
  EXPECT_THROW(quadrant_labels({}), Error);
}

TEST(Quadrants, PlaneCorners) {
  const std::vector<RatingRecord> r{{9, 9}, {1, 9}, {9, 1}, {1, 1}};  // {valence, arousal}
  const auto q = quadrant_labels(r);
  EXPECT_EQ(q.labels, (std::vector<int>{0, 2, 1, 3}));
  EXPECT_EQ(q.scheme, LabelScheme::quadrant);
}

TEST(Quadrants, ConsistentWithBinarySplits) {
  const auto ds = small_dataset(21, 40);
  const auto q = quadrant_labels(ds.ratings());
  const auto a = median_split_labels(ds.ratings(), Dimension::arousal);
  const auto v = median_split_labels(ds.ratings(), Dimension::valence);
  for (std::size_t i = 0; i < q.labels.size(); ++i) {
    EXPECT_EQ(quadrant_high_arousal(q.labels[i]), a.labels[i] == 1);
    EXPECT_EQ(quadrant_high_valence(q.labels[i]), v.labels[i] == 1);
  }
}

TEST(Quadrants, SingleQuadrant) {
  // All ratings identical: both splits are all-low, so every trial is LALV.
  const std::vector<RatingRecord> r(5, {3.0, 3.0});
  const auto counts = quadrant_labels(r).class_counts();
  EXPECT_EQ(counts, (std::vector<std::size_t>{0, 0, 0, 5}));
}

TEST(Standardizer, ZScoresTrainingColumns) {
  SplitMix64 rng(3);
  Matrix m(50, 4);
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = rng.uniform(-10.0, 10.0) * (c + 1) + 100.0 * c;
  const auto s = fit_standardizer(m);
  const auto z = s.apply(m);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < 50; ++r) mean += z(r, c);
    mean /= 50.0;
    for (std::size_t r = 0; r < 50; ++r) ss += (z(r, c) - mean) * (z(r, c) - mean);
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt(ss / 50.0), 1.0, 1e-12);
    EXPECT_FALSE(s.degenerate[c]);
  }
  const auto back = s.invert(z);
  for (std::size_t i = 0; i < m.data().size(); ++i) EXPECT_NEAR(back.data()[i], m.data()[i], 1e-12);
}

TEST(Standardizer, ConstantColumnIsFlagged) {
  Matrix m(4, 2);
  for (std::size_t r = 0; r < 4; ++r) {
    m(r, 0) = 7.25;
    m(r, 1) = static_cast<double>(r);
  }
  const auto s = fit_standardizer(m);
  EXPECT_TRUE(s.degenerate[0]);
  EXPECT_EQ(s.stddev[0], 1.0);
  const auto z = s.apply(m);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(z(r, 0), 0.0);
}

TEST(Standardizer, StatisticsIgnoreRowsOutsideTraining) {
  SplitMix64 rng(8);
  Matrix all(30, 3);
  for (double& v : all.data()) v = rng.uniform();
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < 20; ++i) train_idx.push_back(i);
  const auto before = fit_standardizer(all.select_rows(train_idx));
  for (std::size_t r = 20; r < 30; ++r)
    for (std::size_t c = 0; c < 3; ++c) all(r, c) = 1e6;
  EXPECT_TRUE(fit_standardizer(all.select_rows(train_idx)) == before);
}

TEST(Standardizer, EmptyTrain) { EXPECT_THROW(fit_standardizer(Matrix(0, 3)), Error); }

TEST(RatingStats, Basic) {
  const std::vector<RatingRecord> r{{1, 2}, {3, 2}, {5, 8}, {7, 8}};
  const auto s = rating_stats(r);
  EXPECT_DOUBLE_EQ(s.valence_median, 4.0);
  EXPECT_DOUBLE_EQ(s.arousal_median, 5.0);
  EXPECT_DOUBLE_EQ(s.valence_std, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(s.arousal_std, 3.0);
  EXPECT_NEAR(s.std_difference, 3.0 - std::sqrt(5.0), 1e-15);
}
