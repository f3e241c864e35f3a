#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vda/metrics/stats.h"
#include "vda/metrics/table.h"

namespace vda::metrics {

struct DciConfig {
  int folds = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  // L1 weight of the per-factor multinomial logistic probes.
  double lambda = 1e-2;
  int max_iter = 400;
};

struct DciReport {
  std::optional<Interval> disentanglement;  // needs >= 2 usable factors
  Interval completeness;
  Interval informativeness;
  Matrix importance;  // dims x factors, averaged over runs
  std::vector<std::string> factors;
  std::vector<std::string> excluded;  // single-class factors
  std::vector<double> factor_informativeness;
};

// Entropy-based scores of an importance matrix R [dims x factors]: D weights
// each dimension's 1 - H_K(R_d / sum R_d) by its share of total importance;
// C averages 1 - H_D(R_f / sum R_f) over factors.
double dci_disentanglement(const Matrix& r);
double dci_completeness(const Matrix& r);

DciReport dci_scores(const Matrix& z, const FactorTable& factors, const DciConfig& cfg = {});

nlohmann::json to_json(const DciReport& r);

}  // namespace vda::metrics
