#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vda/metrics/table.h"

namespace vda::metrics {

struct TraversalRow {
  int varied_value = 0;
  std::size_t subspace = 0;
  std::size_t dim = 0;       // index within the subspace
  std::string role;          // "max_var" or "min_var"
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

struct TraversalResult {
  std::string fixed_factor, varied_factor;
  std::vector<TraversalRow> rows;
};

// z holds every subspace side by side ([rows x views * z_dim]). For each
// subspace the dimensions with the largest and smallest variance over the
// probe rows are selected, and their mean amplitude and spread are reported
// per value of the varied factor. Throws when the fixed factor is not
// constant over the probe rows.
TraversalResult latent_traversal_response(const Matrix& z, std::size_t views, const FactorTable& factors,
                                          const std::string& fixed, const std::string& varied);

// Header varied_value,subspace,dim,role,mean,sd,count; written atomically.
void write_traversal_csv(const std::string& path, const TraversalResult& r);

}  // namespace vda::metrics
