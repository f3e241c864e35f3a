#include "vda/autodiff/adam.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vda::ad {

void adam_step(std::span<Tensor* const> params, AdamState& state) {
  if (!(state.lr > 0.0) || !(state.beta1 > 0.0 && state.beta1 < 1.0) ||
      !(state.beta2 > 0.0 && state.beta2 < 1.0) || !(state.eps > 0.0))
    throw std::invalid_argument("adam_step: invalid hyperparameters");
  for (std::size_t p = 0; p < params.size(); ++p)
    if (!params[p]->has_grad())
      throw std::invalid_argument("adam_step: parameter " + std::to_string(p) + " " +
                                  shape_str(params[p]->shape) + " has no gradient");
  if (state.m.empty()) {
    for (const Tensor* t : params) {
      state.m.emplace_back(t->numel(), 0.0);
      state.v.emplace_back(t->numel(), 0.0);
    }
  }
  if (state.m.size() != params.size())
    throw std::invalid_argument("adam_step: parameter count changed between steps");
  ++state.step;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    auto& m = state.m[p];
    auto& v = state.v[p];
    if (m.size() != t.numel()) throw std::invalid_argument("adam_step: moment size mismatch");
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double g = t.grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double mhat = m[i] / c1, vhat = v[i] / c2;
      t.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

void zero_grads(std::span<Tensor* const> params) {
  for (Tensor* t : params) t->zero_grad();
}

}  // namespace vda::ad
