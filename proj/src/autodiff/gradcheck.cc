#include "vda/autodiff/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vda::ad {

std::vector<double> analytic_gradient(const ScalarFn& f, const Tensor& x) {
  Tape tape;
  Var xv = tape.variable(x);
  Var y = f(tape, xv);
  tape.backward(y);
  auto g = xv.grad();
  if (g.empty()) return std::vector<double>(x.numel(), 0.0);
  return {g.begin(), g.end()};
}

double finite_difference_check(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h >= 1e-7 && h <= 1e-3))
    throw std::invalid_argument("finite_difference_check: h must lie in [1e-7, 1e-3]");
  const std::vector<double> analytic = analytic_gradient(f, x);
  auto eval = [&](const Tensor& at) {
    Tape tape;
    return f(tape, tape.constant(at)).item();
  };
  double worst = 0.0;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double orig = probe.data[i];
    probe.data[i] = orig + h;
    const double fp = eval(probe);
    probe.data[i] = orig - h;
    const double fm = eval(probe);
    probe.data[i] = orig;
    const double numeric = (fp - fm) / (2.0 * h);
    const double err = std::abs(analytic[i] - numeric) / std::max(std::abs(analytic[i]), 1e-8);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace vda::ad
