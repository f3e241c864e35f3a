#include "vda/model/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vda/dsp/decompose.h"
#include "vda/dsp/framing.h"
#include "vda/dsp/mel.h"

namespace vda::model {

dsp::Signal standardize(const dsp::Signal& s) {
  dsp::Signal out = s;
  if (s.samples.empty()) return out;
  const double n = static_cast<double>(s.size());
  const double mean = std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / n;
  double var = 0.0;
  for (double v : s.samples) var += (v - mean) * (v - mean);
  var /= n;
  const double inv = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  for (double& v : out.samples) v = (v - mean) * inv;
  return out;
}

std::optional<dsp::Signal> preprocess(const dsp::Signal& s, const TrainingConfig& t, std::mt19937_64& rng) {
  const auto dmin = static_cast<std::size_t>(std::llround(t.d_min_s * s.sample_rate));
  const auto dmax = static_cast<std::size_t>(std::llround(t.d_max_s * s.sample_rate));
  if (s.size() < dmin || s.size() == 0) return std::nullopt;
  dsp::Signal out{std::vector<double>(dmax, 0.0), s.sample_rate};
  if (s.size() <= dmax) {
    std::copy(s.samples.begin(), s.samples.end(), out.samples.begin());
  } else {
    const std::size_t start = static_cast<std::size_t>(rng() % (s.size() - dmax + 1));
    std::copy_n(s.samples.begin() + static_cast<std::ptrdiff_t>(start), dmax, out.samples.begin());
  }
  return standardize(out);
}

ViewFeatures utterance_features(const dsp::Signal& s, const dsp::DecompositionConfig& dcfg, double frame_ms,
                                std::size_t M, bool decompose) {
  const auto frames = dsp::frame_sequence(s, frame_ms, frame_ms);
  ViewFeatures f;
  f.views = decompose ? static_cast<std::size_t>(dcfg.C) + 1 : 1;
  f.frames = frames.size();
  f.rows = dsp::mel_rows(frames[0].size(), s.sample_rate);
  f.M = M;
  f.data.assign(f.views * f.frames * f.frame_size(), 0.0f);
  auto put = [&](std::size_t view, std::size_t frame, const dsp::Signal& x) {
    const auto mel = dsp::mel_features(x, M);
    float* dst = f.data.data() + (view * f.frames + frame) * f.frame_size();
    for (std::size_t i = 0; i < mel.data.size(); ++i) dst[i] = static_cast<float>(mel.data[i]);
  };
  for (std::size_t fr = 0; fr < f.frames; ++fr) {
    put(0, fr, frames[fr]);
    if (!decompose) continue;
    const auto cs = dsp::decompose(frames[fr], dcfg);
    for (std::size_t c = 0; c < cs.C(); ++c) put(c + 1, fr, cs.components[c]);
  }
  return f;
}

std::size_t mask_size(std::size_t frames, double l_ssl) {
  const auto k = static_cast<std::size_t>(std::llround(l_ssl * static_cast<double>(frames)));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(frames, 1));
}

std::vector<std::size_t> sample_mask(std::size_t frames, double l_ssl, std::mt19937_64& rng) {
  if (frames == 0) throw std::invalid_argument("sample_mask: no frames");
  std::vector<std::size_t> idx(frames);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t k = mask_size(frames, l_ssl);
  // Partial Fisher-Yates with explicit draws keeps the stream portable.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (frames - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BatchViews gather_batch(const std::vector<const ViewFeatures*>& items,
                        const std::vector<std::vector<std::size_t>>& masks) {
  if (items.empty() || items.size() != masks.size()) throw std::invalid_argument("gather_batch: bad batch");
  BatchViews b;
  b.B = items.size();
  b.V = items[0]->views;
  b.K = masks[0].size();
  b.rows = items[0]->rows;
  b.M = items[0]->M;
  for (std::size_t i = 0; i < b.B; ++i)
    if (items[i]->views != b.V || items[i]->rows != b.rows || items[i]->M != b.M || masks[i].size() != b.K)
      throw std::invalid_argument("gather_batch: items differ in view layout or mask size");
  const std::size_t fs = b.rows * b.M;
  b.x = ad::Tensor({b.B * b.V * b.K, b.rows, b.M});
  double* dst = b.x.data.data();
  for (std::size_t i = 0; i < b.B; ++i)
    for (std::size_t v = 0; v < b.V; ++v)
      for (std::size_t k : masks[i]) {
        if (k >= items[i]->frames) throw std::out_of_range("gather_batch: mask index beyond frame count");
        const float* src = items[i]->at(v, k);
        for (std::size_t e = 0; e < fs; ++e) *dst++ = src[e];
      }
  b.mask = masks;
  return b;
}

BatchViews decompose_and_mask(const std::vector<dsp::Signal>& batch, const dsp::DecompositionConfig& dcfg,
                              const TrainingConfig& t, std::size_t M, bool decompose, std::mt19937_64& rng) {
  std::vector<ViewFeatures> feats;
  feats.reserve(batch.size());
  std::vector<const ViewFeatures*> ptrs;
  std::vector<std::vector<std::size_t>> masks;
  for (const auto& s : batch) feats.push_back(utterance_features(s, dcfg, t.frame_ms, M, decompose));
  for (const auto& f : feats) {
    ptrs.push_back(&f);
    masks.push_back(sample_mask(f.frames, t.l_ssl, rng));
  }
  return gather_batch(ptrs, masks);
}

}  // namespace vda::model
