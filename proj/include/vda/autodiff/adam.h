#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vda/autodiff/tensor.h"

namespace vda::ad {

struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update of every tensor in `params`, using their
// accumulated gradients. Moment buffers are allocated on the first call.
// Throws std::invalid_argument when a parameter has no gradient or the
// parameter list no longer matches the state.
void adam_step(std::span<Tensor* const> params, AdamState& state);

void zero_grads(std::span<Tensor* const> params);

}  // namespace vda::ad
