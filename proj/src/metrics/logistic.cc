#include "vda/metrics/logistic.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vda/kernels.h"

namespace vda::metrics {

namespace {

// Largest eigenvalue of [x 1]^T [x 1] / n by power iteration.
double gram_norm(const Matrix& x) {
  const std::size_t n = x.rows, d = x.cols;
  std::vector<double> v(d + 1, 1.0 / std::sqrt(static_cast<double>(d + 1))), xv(n), w(d + 1);
  double lam = 1.0;
  for (int it = 0; it < 50; ++it) {
    for (std::size_t r = 0; r < n; ++r) xv[r] = kernels::dot(x.row(r), v.data(), d) + v[d];
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      kernels::axpy(xv[r], x.row(r), w.data(), d);
      w[d] += xv[r];
    }
    double norm = 0.0;
    for (double& e : w) {
      e /= static_cast<double>(n);
      norm += e * e;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) return 1.0;
    lam = norm;
    for (std::size_t i = 0; i <= d; ++i) v[i] = w[i] / norm;
  }
  return lam;
}

void softmax_rows(Matrix& s) {
  for (std::size_t r = 0; r < s.rows; ++r) {
    double* row = s.data.data() + r * s.cols;
    const double m = *std::max_element(row, row + s.cols);
    double z = 0.0;
    for (std::size_t c = 0; c < s.cols; ++c) z += row[c] = std::exp(row[c] - m);
    for (std::size_t c = 0; c < s.cols; ++c) row[c] /= z;
  }
}

}  // namespace

void Logistic::fit(const Matrix& x_raw, const std::vector<int>& y, std::size_t k, const LogisticConfig& cfg) {
  if (x_raw.rows == 0 || x_raw.rows != y.size()) throw std::invalid_argument("Logistic: empty or misaligned data");
  if (k < 2) throw std::invalid_argument("Logistic: need at least two classes");
  for (int l : y)
    if (l < 0 || static_cast<std::size_t>(l) >= k) throw std::out_of_range("Logistic: label out of range");
  scaler_.fit(x_raw);
  const Matrix x = scaler_.apply(x_raw);
  const std::size_t n = x.rows, d = x.cols;
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool l2 = cfg.penalty == Penalty::kL2;
  const double L = 0.5 * gram_norm(x) + (l2 ? cfg.lambda : 0.0);
  const double step = 1.0 / L;

  // theta = [W | b] stored as k rows of d + 1.
  const std::size_t width = d + 1;
  std::vector<double> theta(k * width, 0.0), prev = theta, ymom = theta, grad(k * width);
  Matrix w(k, d), s(n, k), gw(k, d);
  double t = 1.0;
  iters_ = 0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    ++iters_;
    for (std::size_t c = 0; c < k; ++c) std::copy_n(ymom.begin() + c * width, d, w.data.begin() + c * d);
    kernels::gemm_nt(x.data.data(), w.data.data(), s.data.data(), n, k, d);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < k; ++c) s.at(r, c) += ymom[c * width + d];
    softmax_rows(s);
    for (std::size_t r = 0; r < n; ++r) s.at(r, static_cast<std::size_t>(y[r])) -= 1.0;
    std::fill(gw.data.begin(), gw.data.end(), 0.0);
    kernels::gemm_tn(s.data.data(), x.data.data(), gw.data.data(), k, d, n);
    for (std::size_t c = 0; c < k; ++c) {
      double gb = 0.0;
      for (std::size_t r = 0; r < n; ++r) gb += s.at(r, c);
      for (std::size_t j = 0; j < d; ++j)
        grad[c * width + j] = gw.at(c, j) * inv_n + (l2 ? cfg.lambda * ymom[c * width + j] : 0.0);
      grad[c * width + d] = gb * inv_n;
    }
    std::vector<double> next(k * width);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = ymom[i] - step * grad[i];
    if (!l2) {
      const double thr = step * cfg.lambda;
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j) {
          double& v = next[c * width + j];
          v = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
        }
    }
    // Momentum restarts when the step points uphill.
    double uphill = 0.0, change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      uphill += grad[i] * (next[i] - theta[i]);
      change = std::max(change, std::abs(next[i] - theta[i]));
    }
    const double t_next = uphill > 0.0 ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = uphill > 0.0 ? 0.0 : (t - 1.0) / t_next;
    prev = theta;
    theta = next;
    for (std::size_t i = 0; i < theta.size(); ++i) ymom[i] = theta[i] + beta * (theta[i] - prev[i]);
    t = t_next;
    if (change < cfg.tol) break;
  }
  w_ = Matrix(k, d);
  b_.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(theta.begin() + c * width, d, w_.data.begin() + c * d);
    b_[c] = theta[c * width + d];
  }
}

Matrix Logistic::decision(const Matrix& x_raw) const {
  if (w_.rows == 0) throw std::logic_error("Logistic: not fitted");
  const Matrix x = scaler_.apply(x_raw);
  Matrix s(x.rows, w_.rows);
  kernels::gemm_nt(x.data.data(), w_.data.data(), s.data.data(), x.rows, w_.rows, x.cols);
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t c = 0; c < s.cols; ++c) s.at(r, c) += b_[c];
  return s;
}

Matrix Logistic::predict_proba(const Matrix& x) const {
  Matrix s = decision(x);
  softmax_rows(s);
  return s;
}

std::vector<int> Logistic::predict(const Matrix& x) const {
  const Matrix s = decision(x);
  std::vector<int> out(s.rows);
  for (std::size_t r = 0; r < s.rows; ++r) {
    const double* row = s.row(r);
    out[r] = static_cast<int>(std::max_element(row, row + s.cols) - row);
  }
  return out;
}

}  // namespace vda::metrics
