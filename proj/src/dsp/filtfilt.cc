#include <algorithm>
#include <stdexcept>
#include <string>

#include "vda/dsp/filter.h"

namespace vda::dsp {
namespace {

// Transposed direct form II, in place, from state zi scaled by x0.
void run(const Sos& sos, std::vector<double>& x, const std::vector<std::array<double, 2>>* zi, double x0) {
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const auto& q = sos[s];
    double z0 = zi ? (*zi)[s][0] * x0 : 0.0;
    double z1 = zi ? (*zi)[s][1] * x0 : 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = q.b[0] * in + z0;
      z0 = q.b[1] * in - q.a[0] * out + z1;
      z1 = q.b[2] * in - q.a[1] * out;
      v = out;
    }
  }
}

// Per-section state reached after a unit step, including the DC gain of the
// preceding sections.
std::vector<std::array<double, 2>> steady_state(const Sos& sos) {
  std::vector<std::array<double, 2>> zi(sos.size());
  double scale = 1.0;
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const auto& q = sos[s];
    const double g = (q.b[0] + q.b[1] + q.b[2]) / (1.0 + q.a[0] + q.a[1]);
    const double z1 = q.b[2] - q.a[1] * g;
    const double z0 = q.b[1] - q.a[0] * g + z1;
    zi[s] = {z0 * scale, z1 * scale};
    scale *= g;
  }
  return zi;
}

}  // namespace

std::vector<double> sos_filter(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run(sos, y, nullptr, 0.0);
  return y;
}

std::size_t filtfilt_padlen(const Sos& sos) { return 3 * (2 * sos.size() + 1); }

std::vector<double> sos_filtfilt(const Sos& sos, std::span<const double> x) {
  if (sos.empty()) return {x.begin(), x.end()};
  const std::size_t pad = filtfilt_padlen(sos);
  if (x.size() <= pad)
    throw std::invalid_argument("signal of " + std::to_string(x.size()) +
                                " samples is shorter than the filter warm-up of " + std::to_string(pad + 1));
  const std::size_t n = x.size();
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = steady_state(sos);
  run(sos, ext, &zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  run(sos, ext, &zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace vda::dsp
