#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "vda/autodiff/tensor.h"
#include "vda/dsp/signal.h"
#include "vda/model/config.h"

namespace vda::model {

// Log-Mel features of every view of every frame of one utterance, stored as
// float [views][frames][rows][M]. View 0 is the original.
struct ViewFeatures {
  std::size_t views = 0, frames = 0, rows = 0, M = 0;
  std::vector<float> data;

  std::size_t frame_size() const { return rows * M; }
  const float* at(std::size_t view, std::size_t frame) const {
    return data.data() + (view * frames + frame) * frame_size();
  }
};

// Discards signals shorter than d_min (returns nullopt), zero-pads up to
// d_max, crops longer ones to a random d_max window, then standardizes to
// zero mean and unit variance.
std::optional<dsp::Signal> preprocess(const dsp::Signal& s, const TrainingConfig& t, std::mt19937_64& rng);

// Standardization only, for inference on whole utterances.
dsp::Signal standardize(const dsp::Signal& s);

// Frames the signal, decomposes each frame with `dcfg` (skipped when
// `decompose` is false, giving a single view) and extracts M log-Mel bands.
ViewFeatures utterance_features(const dsp::Signal& s, const dsp::DecompositionConfig& dcfg, double frame_ms,
                                std::size_t M, bool decompose = true);

std::size_t mask_size(std::size_t frames, double l_ssl);

// round(l_ssl * frames) >= 1 distinct frame indices, uniformly without
// replacement, sorted.
std::vector<std::size_t> sample_mask(std::size_t frames, double l_ssl, std::mt19937_64& rng);

// Encoder input for a batch: x is [B * V * K, rows, M] ordered (item, view,
// masked frame); `mask[b]` lists the K frames used for item b.
struct BatchViews {
  std::size_t B = 0, V = 0, K = 0, rows = 0, M = 0;
  ad::Tensor x;
  std::vector<std::vector<std::size_t>> mask;
};

BatchViews gather_batch(const std::vector<const ViewFeatures*>& items,
                        const std::vector<std::vector<std::size_t>>& masks);

// Decomposition, masking and Mel extraction for a batch of preprocessed
// signals; masks are drawn from rng, fresh per call.
BatchViews decompose_and_mask(const std::vector<dsp::Signal>& batch, const dsp::DecompositionConfig& dcfg,
                              const TrainingConfig& t, std::size_t M, bool decompose, std::mt19937_64& rng);

}  // namespace vda::model
