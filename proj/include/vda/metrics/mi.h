#pragma once

#include <cstddef>
#include <vector>

#include "vda/metrics/table.h"

namespace vda::metrics {

// Equal-width bins over the column's observed [min, max]; the maximum falls in
// the last bin. A constant column maps to bin 0.
std::vector<int> discretize(const std::vector<double>& column, int bins);

// Plug-in entropy and mutual information of integer codes, in nats.
double discrete_entropy(const std::vector<int>& a);
double discrete_mi(const std::vector<int>& a, const std::vector<int>& b);

struct MiResult {
  Matrix mi;  // dims x dims; the diagonal holds each dimension's entropy
  double mean_offdiag = 0.0;
  std::vector<bool> constant;  // flagged dimensions (MI 0)
};

// Pairwise histogram MI between latent dimensions (default 30 bins).
MiResult mi_matrix(const Matrix& z, int bins = 30);

}  // namespace vda::metrics
