#include "vda/metrics/mi.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace vda::metrics {

std::vector<int> discretize(const std::vector<double>& col, int bins) {
  if (bins < 2) throw std::invalid_argument("discretize: need at least 2 bins");
  std::vector<int> out(col.size(), 0);
  if (col.empty()) return out;
  const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
  const double a = *lo, w = *hi - *lo;
  if (!(w > 0.0)) return out;
  for (std::size_t i = 0; i < col.size(); ++i)
    out[i] = std::min(bins - 1, static_cast<int>(std::floor((col[i] - a) / w * bins)));
  return out;
}

double discrete_entropy(const std::vector<int>& a) {
  std::map<int, double> c;
  for (int v : a) c[v] += 1.0;
  const double n = static_cast<double>(a.size());
  double h = 0.0;
  for (const auto& [k, v] : c) h -= v / n * std::log(v / n);
  return h;
}

double discrete_mi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("discrete_mi: size mismatch");
  if (a.empty()) return 0.0;
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> cab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    cab[{a[i], b[i]}] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (const auto& [k, v] : cab) mi += v / n * std::log(v * n / (ca[k.first] * cb[k.second]));
  return std::max(0.0, mi);
}

MiResult mi_matrix(const Matrix& z, int bins) {
  MiResult r;
  r.mi = Matrix(z.cols, z.cols);
  r.constant.assign(z.cols, false);
  std::vector<std::vector<int>> codes(z.cols);
  for (std::size_t j = 0; j < z.cols; ++j) {
    const auto col = z.column(j);
    r.constant[j] = col.empty() || *std::max_element(col.begin(), col.end()) == *std::min_element(col.begin(), col.end());
    codes[j] = discretize(col, bins);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < z.cols; ++i) {
    r.mi.at(i, i) = r.constant[i] ? 0.0 : discrete_entropy(codes[i]);
    for (std::size_t j = i + 1; j < z.cols; ++j) {
      const double m = r.constant[i] || r.constant[j] ? 0.0 : discrete_mi(codes[i], codes[j]);
      r.mi.at(i, j) = r.mi.at(j, i) = m;
      acc += 2.0 * m;
    }
  }
  if (z.cols > 1) r.mean_offdiag = acc / static_cast<double>(z.cols * (z.cols - 1));
  return r;
}

}  // namespace vda::metrics
