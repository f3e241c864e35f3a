#pragma once

#include "vda/metrics/table.h"

namespace vda::cli {

// Projection onto the leading principal components of the centred rows.
// Each component's sign is fixed so its largest-magnitude loading is
// positive, which keeps plots identical across runs. Components beyond the
// data rank (or a single row) project to zero.
metrics::Matrix pca_project(const metrics::Matrix& x, std::size_t k);

}  // namespace vda::cli
