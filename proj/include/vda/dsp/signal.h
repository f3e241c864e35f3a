#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace vda::dsp {

struct Signal {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Throws std::invalid_argument on an empty signal, non-positive rate or a
// non-finite sample.
void validate(const Signal& s);

enum class Method { kFD, kEWT };
enum class MergeStrategy { kHighFrequency, kNearestNeighbor };

struct DecompositionConfig {
  Method method = Method::kFD;
  int C = 3;
  std::vector<double> fd_band_edges = {0, 250, 500, 1000, 2000, 4000, 8000};
  MergeStrategy merge_strategy = MergeStrategy::kNearestNeighbor;
  double peak_prominence = 0.3;
  double ewt_gamma = 0.1;
};

void validate(const DecompositionConfig& cfg, int sample_rate);

// Original signal plus C band-limited components of the same length and rate.
struct ComponentSet {
  Signal original;
  std::vector<Signal> components;
  // Frequency band [lo, hi] in Hz assigned to each component.
  std::vector<std::pair<double, double>> bands;

  std::size_t C() const { return components.size(); }
};

const char* method_name(Method m);
Method parse_method(const std::string& s);
const char* merge_strategy_name(MergeStrategy m);
MergeStrategy parse_merge_strategy(const std::string& s);

}  // namespace vda::dsp
