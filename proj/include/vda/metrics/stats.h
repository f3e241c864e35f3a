#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace vda::metrics {

// Normal-approximation 95 % interval: mean +- 1.96 sd / sqrt(n), with the
// sample standard deviation.
struct Interval {
  double mean = 0.0;
  double sd = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

Interval ci95(const std::vector<double>& values);
nlohmann::json to_json(const Interval& i);

double accuracy(const std::vector<int>& y, const std::vector<int>& pred);
// Class-frequency weighted and unweighted means of per-class F1 over classes
// present in y (labels 0..k-1).
double f1_weighted(const std::vector<int>& y, const std::vector<int>& pred, std::size_t k);
double f1_macro(const std::vector<int>& y, const std::vector<int>& pred, std::size_t k);

// Area under the ROC curve of `scores` for the positive class; ties count one
// half. Returns 0.5 when one of the classes is absent.
double auroc(const std::vector<double>& scores, const std::vector<bool>& positive);

}  // namespace vda::metrics
