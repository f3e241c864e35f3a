#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "vda/autodiff/ops.h"
#include "vda/autodiff/tensor.h"
#include "vda/model/config.h"

namespace vda::model {

// Named parameters with stable addresses, in registration order.
class ParamStore {
 public:
  ad::Tensor& add(const std::string& name, ad::Shape shape);
  ad::Tensor& get(const std::string& name);
  const ad::Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::size_t size() const { return tensors_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  ad::Tensor& at(std::size_t i) { return tensors_.at(i); }
  const ad::Tensor& at(std::size_t i) const { return tensors_.at(i); }
  // Parameters whose name starts with `prefix`.
  std::vector<ad::Tensor*> with_prefix(const std::string& prefix);
  std::size_t numel() const;

 private:
  std::deque<ad::Tensor> tensors_;
  std::vector<std::string> names_;
};

enum class Branch { kZ, kS };

// Hidden embeddings and posterior parameters of one branch.
// H is [B, V, K, d]; mu and logvar are [B, V, K, z_dim]. For the S branch K = 1.
struct Latents {
  ad::Var H;
  ad::Var mu;
  ad::Var logvar;
};

class DecVAE {
 public:
  DecVAE(EncoderConfig cfg, std::uint64_t seed);

  const EncoderConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Frame branch parameters (encoder, projector, heads and the aggregation
  // network) and the sequence branch parameters.
  std::vector<ad::Tensor*> z_parameters();
  std::vector<ad::Tensor*> s_parameters();

  // x is [B * Vin * K, rows, M] ordered (item, view, frame) with Vin either
  // C+1 or 1. A single input view is shared by every latent head. When
  // `grads` is false parameters enter the tape as constants.
  Latents encode(ad::Tape& tape, const ad::Tensor& x, std::size_t B, std::size_t K, Branch branch,
                 double logvar_clamp, bool grads) const;

  // z is [N, C+1, z_dim]; returns [N, aggregated_dim].
  ad::Var aggregate(ad::Tape& tape, const ad::Var& z, bool grads) const;

 private:
  ad::Var bind(ad::Tape& tape, const std::string& name, bool grads) const;
  ad::Var hidden(ad::Tape& tape, const ad::Var& x, const std::string& prefix, bool grads) const;

  EncoderConfig cfg_;
  mutable ParamStore params_;
};

// Mean over the frame axis of [B, V, K, d], keeping it as size 1.
ad::Var sequence_pool(const ad::Var& H);

// mu + exp(logvar / 2) * eps with eps ~ N(0, I) drawn from rng.
ad::Var reparameterize(const ad::Var& mu, const ad::Var& logvar, std::mt19937_64& rng);

}  // namespace vda::model
