#include "vda/metrics/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vda::metrics {

Interval ci95(const std::vector<double>& v) {
  Interval out;
  out.n = v.size();
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  const double half = 1.96 * out.sd / std::sqrt(static_cast<double>(v.size()));
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

nlohmann::json to_json(const Interval& i) {
  return {{"mean", i.mean}, {"sd", i.sd}, {"ci95_lo", i.lo}, {"ci95_hi", i.hi}, {"n", i.n}};
}

double accuracy(const std::vector<int>& y, const std::vector<int>& pred) {
  if (y.size() != pred.size() || y.empty()) throw std::invalid_argument("accuracy: size mismatch or empty");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += y[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

namespace {

// Per-class (f1, support).
std::vector<std::pair<double, std::size_t>> per_class_f1(const std::vector<int>& y, const std::vector<int>& pred,
                                                         std::size_t k) {
  if (y.size() != pred.size()) throw std::invalid_argument("f1: size mismatch");
  std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0), support(k, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto a = static_cast<std::size_t>(y[i]), p = static_cast<std::size_t>(pred[i]);
    if (a >= k || p >= k) throw std::out_of_range("f1: label out of range");
    ++support[a];
    if (a == p) ++tp[a];
    else {
      ++fp[p];
      ++fn[a];
    }
  }
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t c = 0; c < k; ++c) {
    if (support[c] == 0) continue;
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    out.emplace_back(denom > 0 ? 2.0 * tp[c] / denom : 0.0, support[c]);
  }
  return out;
}

}  // namespace

double f1_weighted(const std::vector<int>& y, const std::vector<int>& pred, std::size_t k) {
  double acc = 0.0, n = 0.0;
  for (auto [f, s] : per_class_f1(y, pred, k)) {
    acc += f * static_cast<double>(s);
    n += static_cast<double>(s);
  }
  return n > 0 ? acc / n : 0.0;
}

double f1_macro(const std::vector<int>& y, const std::vector<int>& pred, std::size_t k) {
  const auto pc = per_class_f1(y, pred, k);
  double acc = 0.0;
  for (auto [f, s] : pc) acc += f;
  return pc.empty() ? 0.0 : acc / static_cast<double>(pc.size());
}

double auroc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw std::invalid_argument("auroc: size mismatch");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with mid-ranks.
  double rank_sum = 0.0;
  std::size_t npos = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t t = i; t < j; ++t)
      if (positive[idx[t]]) {
        rank_sum += mid;
        ++npos;
      }
    i = j;
  }
  const std::size_t nneg = scores.size() - npos;
  if (npos == 0 || nneg == 0) return 0.5;
  const double u = rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0;
  return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

}  // namespace vda::metrics
