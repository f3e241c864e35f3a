#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vda/dsp/signal.h"

namespace vda::model {

struct ConvLayer {
  std::size_t channels = 64;
  std::size_t kernel = 3;
  std::size_t stride = 1;
};

enum class AggKind { kSingleSubspace, kConcatComponents, kConcatAll, kLearnedProjection };

struct Aggregation {
  AggKind kind = AggKind::kConcatAll;
  int index = 0;               // single_subspace only
  std::size_t proj_dim = 64;   // learned_projection output size
  std::size_t proj_hidden = 128;
};

std::string aggregation_name(const Aggregation& a);
// "concat_all", "concat_components", "single_subspace(2)", "learned_projection(64)".
Aggregation parse_aggregation(const std::string& s);

struct EncoderConfig {
  std::vector<ConvLayer> conv_layers = {{64, 3, 1}, {64, 3, 1}, {64, 3, 1}};
  std::size_t n_mels = 80;
  std::size_t v = 128;
  std::size_t d = 128;
  std::size_t z_dim = 16;
  int C = 3;
  Aggregation aggregation;
  // Sequence (S) branch with its own recognition parameters.
  bool dual = false;

  std::size_t views() const { return static_cast<std::size_t>(C) + 1; }
  // Z width produced by the aggregation.
  std::size_t aggregated_dim() const;
};

void validate(const EncoderConfig& c);

// kDelbo is the full objective. kPriorOnly disables the decomposition (every
// view is the original signal) and the contrastive terms, keeping beta * KL.
enum class Objective { kDelbo, kPriorOnly };

struct TrainingConfig {
  Objective objective = Objective::kDelbo;
  double beta = 0.1;
  double beta_S = 0.1;
  std::vector<double> w_pos;  // per component; empty means all 1
  std::vector<double> w_neg;  // per pair (i<j, row-major); empty means all 1
  double l_ssl = 0.5;
  double epsilon = 1e-4;
  double batch_seconds = 60.0;
  double lr_Z = 8e-5;
  double lr_S = 1e-4;
  int warmup_epochs = 20;
  int t_max = 150;
  int tau_warmup = 100;
  double tau_delta = 0.002;
  int tau_patience = 5;
  double d_min_s = 1.0;
  double d_max_s = 4.0;
  double frame_ms = 200.0;
  double logvar_clamp = 20.0;
  std::uint64_t seed = 0;
  std::uint64_t dev_mask_seed = 12345;

  double w_pos_at(std::size_t i) const { return w_pos.empty() ? 1.0 : w_pos.at(i); }
  double w_neg_at(std::size_t pair) const { return w_neg.empty() ? 1.0 : w_neg.at(pair); }
};

void validate(const TrainingConfig& t, const EncoderConfig& e);

nlohmann::json to_json(const EncoderConfig& c);
nlohmann::json to_json(const TrainingConfig& c);
nlohmann::json to_json(const dsp::DecompositionConfig& c);
EncoderConfig encoder_from_json(const nlohmann::json& j);
TrainingConfig training_from_json(const nlohmann::json& j);
dsp::DecompositionConfig decomposition_from_json(const nlohmann::json& j);

}  // namespace vda::model
