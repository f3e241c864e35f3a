#include "vda/metrics/svm.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "vda/kernels.h"

namespace vda::metrics {

void LinearSvm::fit(const Matrix& x_raw, const std::vector<int>& y, std::size_t k, const SvmConfig& cfg) {
  if (x_raw.rows == 0 || x_raw.rows != y.size()) throw std::invalid_argument("LinearSvm: empty or misaligned data");
  if (k < 2 || !(cfg.C > 0)) throw std::invalid_argument("LinearSvm: need k >= 2 and C > 0");
  scaler_.fit(x_raw);
  const Matrix xs = scaler_.apply(x_raw);
  const std::size_t n = xs.rows, d = xs.cols + 1;
  Matrix x(n, d, 1.0);
  for (std::size_t r = 0; r < n; ++r) std::copy_n(xs.row(r), xs.cols, x.data.begin() + static_cast<std::ptrdiff_t>(r * d));
  std::vector<double> qii(n);
  for (std::size_t r = 0; r < n; ++r) qii[r] = kernels::dot(x.row(r), x.row(r), d);

  k_ = k;
  pairs_.clear();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) pairs_.emplace_back(a, b);
  w_ = Matrix(pairs_.size(), d);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> rows;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [pa, pb] = pairs_[p];
    rows.clear();
    for (std::size_t r = 0; r < n; ++r)
      if (y[r] == static_cast<int>(pa) || y[r] == static_cast<int>(pb)) rows.push_back(r);
    double* w = w_.data.data() + p * d;
    std::vector<double> alpha(n, 0.0);
    for (int ep = 0; ep < cfg.max_epochs && !rows.empty(); ++ep) {
      for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng() % i]);
      double pg_max = 0.0;
      for (std::size_t r : rows) {
        const double yi = y[r] == static_cast<int>(pa) ? 1.0 : -1.0;
        const double g = yi * kernels::dot(w, x.row(r), d) - 1.0;
        double pg = g;
        if (alpha[r] == 0.0) pg = std::min(g, 0.0);
        else if (alpha[r] == cfg.C) pg = std::max(g, 0.0);
        pg_max = std::max(pg_max, std::abs(pg));
        if (pg == 0.0) continue;
        const double old = alpha[r];
        alpha[r] = std::clamp(old - g / qii[r], 0.0, cfg.C);
        kernels::axpy((alpha[r] - old) * yi, x.row(r), w, d);
      }
      if (pg_max < cfg.tol) break;
    }
  }
}

Matrix LinearSvm::decision(const Matrix& x_raw) const {
  if (w_.rows == 0) throw std::logic_error("LinearSvm: not fitted");
  const Matrix xs = scaler_.apply(x_raw);
  Matrix votes(xs.rows, k_), conf(xs.rows, k_);
  const std::size_t d = w_.cols;
  for (std::size_t r = 0; r < xs.rows; ++r)
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [a, b] = pairs_[p];
      const double f = kernels::dot(w_.row(p), xs.row(r), d - 1) + w_.at(p, d - 1);
      votes.at(r, f > 0.0 ? a : b) += 1.0;
      conf.at(r, a) += f;
      conf.at(r, b) -= f;
    }
  // Votes decide; the squashed confidence sum only breaks ties.
  for (std::size_t i = 0; i < votes.data.size(); ++i)
    votes.data[i] += conf.data[i] / (3.0 * (std::abs(conf.data[i]) + 1.0));
  return votes;
}

std::vector<int> LinearSvm::predict(const Matrix& x) const {
  const Matrix s = decision(x);
  std::vector<int> out(s.rows);
  for (std::size_t r = 0; r < s.rows; ++r) out[r] = static_cast<int>(std::max_element(s.row(r), s.row(r) + s.cols) - s.row(r));
  return out;
}

}  // namespace vda::metrics
