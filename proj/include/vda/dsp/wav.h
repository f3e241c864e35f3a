#pragma once

#include <string>
#include <vector>

#include "vda/dsp/signal.h"

namespace vda::dsp {

// PCM16 little-endian WAV. Samples are clipped to [-1, 1].
void write_wav(const std::string& path, const Signal& s);
void write_wav_multichannel(const std::string& path, const std::vector<Signal>& channels);
// Channel 0 is the original, channels 1..C the components.
void write_component_wav(const std::string& path, const ComponentSet& cs);

// Reads a PCM16 WAV; multichannel files are returned one Signal per channel.
std::vector<Signal> read_wav_channels(const std::string& path);
Signal read_wav(const std::string& path);

}  // namespace vda::dsp
