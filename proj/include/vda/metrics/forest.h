#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vda/metrics/table.h"

namespace vda::metrics {

struct ForestConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 12;
  std::size_t min_leaf = 1;
  // Features tried per split; 0 means round(sqrt(cols)).
  std::size_t max_features = 0;
  std::uint64_t seed = 0;
};

// Bagged CART trees with Gini splits; prediction is the majority vote of the
// trees' leaf class distributions averaged.
class RandomForest {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, std::size_t k, const ForestConfig& cfg = {});
  Matrix predict_proba(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x) const;

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    std::vector<double> dist;
  };
  using Tree = std::vector<Node>;

  std::size_t k_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace vda::metrics
