#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "vda/metrics/table.h"

namespace vda::metrics {

struct SvmConfig {
  double C = 1.0;
  int max_epochs = 200;
  double tol = 1e-4;
  std::uint64_t seed = 0;
};

// One-vs-one linear SVM with majority voting (hinge loss, L2 penalty) on standardized inputs,
// solved by dual coordinate descent. The bias is an extra constant feature.
class LinearSvm {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, std::size_t k, const SvmConfig& cfg = {});
  Matrix decision(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x) const;

 private:
  Standardizer scaler_;
  std::size_t k_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  Matrix w_;  // one row per class pair, cols + 1 wide
};

}  // namespace vda::metrics
