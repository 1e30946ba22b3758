#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "emoeeg/error.hpp"
#include "emoeeg/matrix.hpp"

namespace emoeeg {

/// Stored-sample k-nearest-neighbour classifier with Euclidean distance.
struct KnnModel {
  Matrix train;
  std::vector<int> labels;
  std::size_t k = 5;

  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

inline KnnModel knn_fit(Matrix train, std::vector<int> labels, std::size_t k) {
  if (train.rows() != labels.size()) throw Error(Errc::dimension_mismatch, "knn: row/label count mismatch");
  if (k == 0 || k > train.rows())
    throw Error(Errc::invalid_argument, "knn: k=" + std::to_string(k) + " must be in [1, n_train=" +
                                            std::to_string(train.rows()) + "]");
  for (double v : train.data())
    if (!std::isfinite(v)) throw Error(Errc::non_finite, "knn: non-finite training value");
  for (int l : labels)
    if (l < 0) throw Error(Errc::invalid_argument, "knn: labels must be non-negative");
  return {std::move(train), std::move(labels), k};
}

/// Majority vote over the k nearest rows. Equal distances order by training
/// row index; among labels tied on votes, the one whose nearest member ranks
/// first wins, which is the single nearest neighbour's label whenever that
/// label is part of the tie.
inline std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries) {
  if (queries.cols() != model.train.cols()) throw Error(Errc::dimension_mismatch, "knn: query dimension mismatch");
  const std::size_t n = model.train.rows();
  const std::size_t k = model.k;
  int max_label = 0;
  for (int l : model.labels) max_label = std::max(max_label, l);

  std::vector<std::pair<double, std::size_t>> dist(n);
  std::vector<std::size_t> votes(static_cast<std::size_t>(max_label) + 1);
  std::vector<std::size_t> first_rank(votes.size());
  std::vector<int> out;
  out.reserve(queries.rows());

  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto x = queries.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = model.train.row(i);
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = x[j] - t[j];
        d += diff * diff;
      }
      dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::fill(votes.begin(), votes.end(), 0);
    std::fill(first_rank.begin(), first_rank.end(), k);
    for (std::size_t r = 0; r < k; ++r) {
      const auto l = static_cast<std::size_t>(model.labels[dist[r].second]);
      ++votes[l];
      first_rank[l] = std::min(first_rank[l], r);
    }
    std::size_t best = 0;
    for (std::size_t l = 1; l < votes.size(); ++l)
      if (votes[l] > votes[best] || (votes[l] == votes[best] && first_rank[l] < first_rank[best])) best = l;
    out.push_back(static_cast<int>(best));
  }
  return out;
}

}  // namespace emoeeg
