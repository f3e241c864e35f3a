#pragma once

#include <vector>

#include "vda/dsp/signal.h"

namespace vda::dsp {

std::size_t frame_length_samples(double frame_ms, int sample_rate);

// Splits s into frames of frame_ms every hop_ms; the last partial frame is
// zero-padded.
std::vector<Signal> frame_sequence(const Signal& s, double frame_ms, double hop_ms);

}  // namespace vda::dsp
