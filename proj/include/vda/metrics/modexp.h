#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "vda/metrics/stats.h"
#include "vda/metrics/table.h"

namespace vda::metrics {

struct ModExpConfig {
  int bins = 30;
  int folds = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  // L2 weight of the logistic probes behind explicitness.
  double lambda = 1e-3;
  int max_iter = 400;
};

// MI between each discretized dimension and each factor, [dims x factors].
Matrix factor_mi(const Matrix& z, const FactorTable& factors, int bins);

// Mean over dimensions of 1 - sum_{f != f*} MI(d,f)^2 / (theta_d^2 (F - 1)),
// theta_d = max_f MI(d,f). Dimensions with theta_d = 0 are skipped and
// listed in `skipped`.
double modularity_from_mi(const Matrix& mi, std::vector<std::size_t>* skipped = nullptr);

struct ModExpReport {
  Interval modularity;
  Interval explicitness;
  std::vector<std::size_t> skipped_dims;  // uninformative on the full data
};

// Both scores over the training/test rows of stratified folds (stratified on
// the first factor): modularity from the training rows' MI, explicitness as
// the held-out one-vs-rest AUROC of a logistic probe, mapped from [0.5, 1]
// to [0, 1] and averaged over classes and factors.
ModExpReport modularity_explicitness(const Matrix& z, const FactorTable& factors, const ModExpConfig& cfg = {});

nlohmann::json to_json(const ModExpReport& r);

}  // namespace vda::metrics
