#pragma once

#include <cstddef>
#include <vector>

#include "vda/dsp/signal.h"

namespace vda::dsp {

struct CorrelationMatrix {
  std::size_t n = 0;
  std::vector<double> r;  // n x n, row-major
  // Set when some channel has zero variance; its correlations are 0.
  bool zero_variance = false;

  double at(std::size_t i, std::size_t j) const { return r[i * n + j]; }
  double mean_abs_offdiag() const;
  // Same, restricted to component pairs (indices >= 1).
  double mean_abs_offdiag_components() const;
};

// Pearson correlations between the original (index 0) and every component.
CorrelationMatrix component_correlation_matrix(const ComponentSet& cs);

}  // namespace vda::dsp
