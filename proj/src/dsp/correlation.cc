#include "vda/dsp/correlation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vda::dsp {

double CorrelationMatrix::mean_abs_offdiag() const {
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) acc += std::abs(at(i, j));
  return acc / static_cast<double>(n * (n - 1));
}

double CorrelationMatrix::mean_abs_offdiag_components() const {
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j)
      if (i != j) acc += std::abs(at(i, j));
  return acc / static_cast<double>((n - 1) * (n - 2));
}

CorrelationMatrix component_correlation_matrix(const ComponentSet& cs) {
  std::vector<const std::vector<double>*> ch{&cs.original.samples};
  for (const auto& c : cs.components) {
    if (c.size() != cs.original.size())
      throw std::invalid_argument("component_correlation_matrix: component length differs from original");
    ch.push_back(&c.samples);
  }
  const std::size_t k = ch.size(), len = cs.original.size();
  std::vector<std::vector<double>> centered(k);
  std::vector<double> norm(k);
  for (std::size_t i = 0; i < k; ++i) {
    double mean = 0.0;
    for (double v : *ch[i]) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(len, 1));
    centered[i].resize(len);
    double ss = 0.0, raw = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      centered[i][t] = (*ch[i])[t] - mean;
      ss += centered[i][t] * centered[i][t];
      raw += (*ch[i])[t] * (*ch[i])[t];
    }
    // Rounding in the mean leaves ~1e-17 residue on constant channels.
    norm[i] = std::sqrt(ss) <= 1e-12 * std::sqrt(raw) ? 0.0 : std::sqrt(ss);
  }
  CorrelationMatrix out;
  out.n = k;
  out.r.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    out.r[i * k + i] = 1.0;
    if (norm[i] == 0.0) out.zero_variance = true;
    for (std::size_t j = i + 1; j < k; ++j) {
      double r = 0.0;
      if (norm[i] > 0.0 && norm[j] > 0.0) {
        double dot = 0.0;
        for (std::size_t t = 0; t < len; ++t) dot += centered[i][t] * centered[j][t];
        r = std::clamp(dot / (norm[i] * norm[j]), -1.0, 1.0);
      }
      out.r[i * k + j] = out.r[j * k + i] = r;
    }
  }
  return out;
}

}  // namespace vda::dsp
