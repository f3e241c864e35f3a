#include "vda/dsp/framing.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vda::dsp {

std::size_t frame_length_samples(double ms, int sample_rate) {
  return static_cast<std::size_t>(std::llround(ms * sample_rate / 1000.0));
}

std::vector<Signal> frame_sequence(const Signal& s, double frame_ms, double hop_ms) {
  if (!(frame_ms > 0.0)) throw std::invalid_argument("frame_sequence: frame_ms must be positive");
  if (!(hop_ms > 0.0)) throw std::invalid_argument("frame_sequence: hop_ms must be positive");
  const std::size_t len = frame_length_samples(frame_ms, s.sample_rate);
  const std::size_t hop = frame_length_samples(hop_ms, s.sample_rate);
  if (len == 0 || hop == 0) throw std::invalid_argument("frame_sequence: frame or hop rounds to zero samples");
  const std::size_t n = s.size();
  const std::size_t count = n <= len ? 1 : 1 + (n - len + hop - 1) / hop;
  std::vector<Signal> frames(count, Signal{std::vector<double>(len, 0.0), s.sample_rate});
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t start = f * hop;
    const std::size_t stop = std::min(n, start + len);
    if (start < stop) std::copy(s.samples.begin() + start, s.samples.begin() + stop, frames[f].samples.begin());
  }
  return frames;
}

}  // namespace vda::dsp
