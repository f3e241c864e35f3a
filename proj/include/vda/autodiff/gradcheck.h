#pragma once

#include <functional>

#include "vda/autodiff/tape.h"

namespace vda::ad {

// Scalar-valued function of one tensor argument, built on the given tape.
using ScalarFn = std::function<Var(Tape&, const Var& x)>;

// Max over coordinates of |analytic - central difference| / max(|analytic|, 1e-8).
// h must lie in [1e-7, 1e-3].
double finite_difference_check(const ScalarFn& f, const Tensor& x, double h = 1e-5);

// Analytic gradient of f at x via one backward pass.
std::vector<double> analytic_gradient(const ScalarFn& f, const Tensor& x);

}  // namespace vda::ad
