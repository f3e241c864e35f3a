#pragma once

#include "vda/metrics/table.h"

namespace vda::metrics {

struct GcnResult {
  double tc = 0.0;                 // total correlation of the fitted Gaussian, nats
  double mean_abs_offdiag = 0.0;   // mean |covariance| off the diagonal
  double gcn = 0.0;                // tc / (dims * max(mean_abs_offdiag, 1e-8))
  bool ridge_added = false;        // covariance was singular; 1e-6 I added
};

// Throws std::invalid_argument with fewer than dims + 1 rows.
GcnResult gcn_score(const Matrix& z);

}  // namespace vda::metrics
