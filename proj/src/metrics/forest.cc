#include "vda/metrics/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace vda::metrics {

namespace {

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += c * c;
  return 1.0 - s / (total * total);
}

struct Builder {
  const Matrix& x;
  const std::vector<int>& y;
  std::size_t k;
  const ForestConfig& cfg;
  std::size_t mtry;
  std::mt19937_64& rng;

  template <class Tree>
  std::size_t grow(Tree& tree, std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t id = tree.size();
    tree.emplace_back();
    std::vector<double> counts(k, 0.0);
    for (std::size_t r : rows) counts[static_cast<std::size_t>(y[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    tree[id].dist = counts;
    for (double& c : tree[id].dist) c /= n;
    const double parent = gini(counts, n);
    if (depth >= cfg.max_depth || rows.size() < 2 * cfg.min_leaf || parent == 0.0) return id;

    std::vector<std::size_t> feats(x.cols);
    std::iota(feats.begin(), feats.end(), 0);
    for (std::size_t i = 0; i < mtry; ++i) std::swap(feats[i], feats[i + rng() % (feats.size() - i)]);
    double best_gain = 1e-12, best_thr = 0.0;
    int best_f = -1;
    std::vector<std::pair<double, int>> vals(rows.size());
    for (std::size_t fi = 0; fi < mtry; ++fi) {
      const std::size_t f = feats[fi];
      for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = {x.at(rows[i], f), y[rows[i]]};
      std::sort(vals.begin(), vals.end());
      std::vector<double> left(k, 0.0), right = counts;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left[static_cast<std::size_t>(vals[i].second)] += 1.0;
        right[static_cast<std::size_t>(vals[i].second)] -= 1.0;
        if (vals[i].first == vals[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        const double gain = parent - (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_thr = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }
    if (best_f < 0) return id;
    std::vector<std::size_t> l, r;
    for (std::size_t row : rows) (x.at(row, static_cast<std::size_t>(best_f)) <= best_thr ? l : r).push_back(row);
    rows.clear();
    rows.shrink_to_fit();
    tree[id].feature = best_f;
    tree[id].threshold = best_thr;
    const std::size_t li = grow(tree, l, depth + 1);
    const std::size_t ri = grow(tree, r, depth + 1);
    tree[id].left = li;
    tree[id].right = ri;
    return id;
  }
};

}  // namespace

void RandomForest::fit(const Matrix& x, const std::vector<int>& y, std::size_t k, const ForestConfig& cfg) {
  if (x.rows == 0 || x.rows != y.size()) throw std::invalid_argument("RandomForest: empty or misaligned data");
  if (cfg.n_trees == 0 || cfg.min_leaf == 0) throw std::invalid_argument("RandomForest: bad config");
  k_ = k;
  trees_.assign(cfg.n_trees, {});
  std::size_t mtry = cfg.max_features ? cfg.max_features
                                      : static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(x.cols))));
  mtry = std::clamp<std::size_t>(mtry, 1, x.cols);
  std::mt19937_64 rng(cfg.seed);
  Builder b{x, y, k, cfg, mtry, rng};
  for (auto& tree : trees_) {
    std::vector<std::size_t> rows(x.rows);
    for (auto& r : rows) r = rng() % x.rows;
    b.grow(tree, rows, 0);
  }
}

Matrix RandomForest::predict_proba(const Matrix& x) const {
  if (trees_.empty()) throw std::logic_error("RandomForest: not fitted");
  Matrix p(x.rows, k_);
  for (const auto& tree : trees_)
    for (std::size_t r = 0; r < x.rows; ++r) {
      std::size_t node = 0;
      while (tree[node].feature >= 0)
        node = x.at(r, static_cast<std::size_t>(tree[node].feature)) <= tree[node].threshold ? tree[node].left
                                                                                               : tree[node].right;
      for (std::size_t c = 0; c < k_; ++c) p.at(r, c) += tree[node].dist[c];
    }
  for (double& v : p.data) v /= static_cast<double>(trees_.size());
  return p;
}

std::vector<int> RandomForest::predict(const Matrix& x) const {
  const Matrix p = predict_proba(x);
  std::vector<int> out(p.rows);
  for (std::size_t r = 0; r < p.rows; ++r) out[r] = static_cast<int>(std::max_element(p.row(r), p.row(r) + p.cols) - p.row(r));
  return out;
}

}  // namespace vda::metrics
