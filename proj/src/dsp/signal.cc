#include "vda/dsp/signal.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vda::dsp {

void validate(const Signal& s) {
  if (s.samples.empty()) throw std::invalid_argument("signal is empty");
  if (s.sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  for (double v : s.samples)
    if (!std::isfinite(v)) throw std::invalid_argument("signal contains a non-finite sample");
}

void validate(const DecompositionConfig& cfg, int sample_rate) {
  if (cfg.C < 2) throw std::invalid_argument("decomposition needs C >= 2, got " + std::to_string(cfg.C));
  if (!(cfg.peak_prominence > 0.0 && cfg.peak_prominence < 1.0))
    throw std::invalid_argument("peak_prominence must lie in (0, 1)");
  if (!(cfg.ewt_gamma > 0.0 && cfg.ewt_gamma < 1.0))
    throw std::invalid_argument("ewt_gamma must lie in (0, 1)");
  if (cfg.method == Method::kFD) {
    const auto& e = cfg.fd_band_edges;
    if (e.size() < static_cast<std::size_t>(cfg.C) + 1)
      throw std::invalid_argument("fd_band_edges needs at least C+1 entries");
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] < 0.0 || e[i] > sample_rate / 2.0)
        throw std::invalid_argument("fd_band_edges must lie within [0, sample_rate/2]");
      if (i > 0 && e[i] <= e[i - 1])
        throw std::invalid_argument("fd_band_edges must be strictly increasing");
    }
  }
}

const char* method_name(Method m) { return m == Method::kFD ? "FD" : "EWT"; }

Method parse_method(const std::string& s) {
  if (s == "FD" || s == "fd") return Method::kFD;
  if (s == "EWT" || s == "ewt") return Method::kEWT;
  throw std::invalid_argument("unknown decomposition method '" + s + "' (expected FD or EWT)");
}

const char* merge_strategy_name(MergeStrategy m) {
  return m == MergeStrategy::kHighFrequency ? "merge_high_frequency" : "merge_nearest_neighbor";
}

MergeStrategy parse_merge_strategy(const std::string& s) {
  if (s == "merge_high_frequency") return MergeStrategy::kHighFrequency;
  if (s == "merge_nearest_neighbor") return MergeStrategy::kNearestNeighbor;
  throw std::invalid_argument("unknown merge strategy '" + s + "'");
}

}  // namespace vda::dsp
