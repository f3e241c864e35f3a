#pragma once

#include <cstdint>
#include <string>

#include "vda/dsp/signal.h"
#include "vda/model/config.h"
#include "vda/model/encoder.h"

namespace vda::model {

// A trained model with the configuration it was trained under.
struct Checkpoint {
  DecVAE model;
  TrainingConfig training;
  dsp::DecompositionConfig decomposition;
  std::uint64_t seed = 0;
  int epoch = 0;
};

// One JSON header line (configs, seed, epoch and a name/shape/offset entry
// per parameter) followed by the little-endian float32 payload. Written to a
// temporary file and renamed into place.
void save_checkpoint(const std::string& path, const DecVAE& model, const TrainingConfig& t,
                     const dsp::DecompositionConfig& dcfg, std::uint64_t seed, int epoch);

// Throws std::runtime_error on malformed files.
Checkpoint load_checkpoint(const std::string& path);

// Copies parameter values between models with identical parameter lists.
void copy_parameters(const DecVAE& from, DecVAE& to);

}  // namespace vda::model
