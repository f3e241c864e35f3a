#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "vda/metrics/stats.h"
#include "vda/metrics/table.h"

namespace vda::metrics {

struct IrsConfig {
  int folds = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  // Per-factor scores use the top_k dimensions by MI with that factor; 0 = all.
  std::size_t top_k = 0;
  int bins = 30;
};

// Interventional robustness on one set of rows. For factor f and each of its
// values, the largest absolute deviation of each dimension from its
// conditional mean is averaged over values and divided by the dimension's
// largest deviation from the global mean; the score is one minus that ratio.
struct IrsValues {
  double irs = 1.0;                 // weighted mean over dims of the best factor's score
  std::vector<double> per_factor;   // weighted mean over (top-k) dims for each factor
  Matrix matrix;                    // dims x factors
  bool zero_informative = false;    // every dimension constant
  double coverage = 1.0;            // observed (factor, value) cells / expected cells
};

IrsValues irs_values(const Matrix& z, const FactorTable& factors, std::size_t top_k = 0, int bins = 30,
                     std::size_t expected_cells = 0);

struct IrsReport {
  Interval irs;
  std::vector<Interval> per_factor;
  std::vector<std::string> factors;
  bool zero_informative = false;
  double coverage = 1.0;  // minimum over runs
};

// irs_values over the training rows of stratified folds (first factor).
IrsReport irs_score(const Matrix& z, const FactorTable& factors, const IrsConfig& cfg = {});

nlohmann::json to_json(const IrsReport& r);

}  // namespace vda::metrics
