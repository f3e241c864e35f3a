#pragma once

#include <cstddef>
#include <vector>

#include "vda/metrics/table.h"

namespace vda::metrics {

enum class Penalty { kL2, kL1 };

struct LogisticConfig {
  Penalty penalty = Penalty::kL2;
  // Penalty weight added to the mean cross-entropy: lambda/2 |W|^2 or lambda |W|_1.
  double lambda = 1e-3;
  int max_iter = 500;
  // Stop when the largest coefficient change of an iteration falls below tol.
  double tol = 1e-6;
};

// Multinomial logistic regression on standardized inputs, fitted by
// accelerated proximal gradient descent. Biases are not penalized.
class Logistic {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, std::size_t k, const LogisticConfig& cfg = {});

  // Class scores [rows x k] before the softmax.
  Matrix decision(const Matrix& x) const;
  Matrix predict_proba(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x) const;

  // [k x cols] weights on the standardized features.
  const Matrix& coef() const { return w_; }
  int iterations() const { return iters_; }

 private:
  Standardizer scaler_;
  Matrix w_;
  std::vector<double> b_;
  int iters_ = 0;
};

}  // namespace vda::metrics
