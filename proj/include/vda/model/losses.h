#pragma once

#include "vda/autodiff/ops.h"
#include "vda/model/config.h"
#include "vda/model/encoder.h"

namespace vda::model {

// JSD between softmax(a) and softmax(b) along the last axis, divided by ln 2
// so that it lies in [0, 1].
ad::Var pairwise_jsd(const ad::Var& a, const ad::Var& b);

// Binary cross-entropy of JSD values s against target 0 (positive pairs) or 1
// (negative pairs), with s clamped to [epsilon, 1 - epsilon].
ad::Var bce_to_zero(const ad::Var& s, double epsilon);
ad::Var bce_to_one(const ad::Var& s, double epsilon);

// H is [B, V, K, d] with view 0 the original. Component i is pulled toward the
// original with weight w_pos[i-1]; each unordered component pair is pushed
// apart with weight w_neg. Both average over items and frames. The optional
// out-parameter receives the mean raw JSD of the pairs involved.
ad::Var loss_recon(const ad::Var& H, const TrainingConfig& t, double* jsd_mean = nullptr);
ad::Var loss_ortho(const ad::Var& H, const TrainingConfig& t, double* jsd_mean = nullptr);

// Closed-form KL to N(0, I) summed over subspaces and dimensions, averaged over
// items and frames. mu and logvar are [B, V, K, z].
ad::Var loss_prior(const ad::Var& mu, const ad::Var& logvar);

struct LossTerms {
  ad::Var total;
  ad::Var recon;
  ad::Var ortho;
  ad::Var prior;
  double jsd_pos_mean = 0.0;
  double jsd_neg_mean = 0.0;
};

// recon + ortho + beta * prior. With `contrastive` false the recon and ortho
// terms are constant zero and only the prior is trained.
LossTerms delbo_loss(const Latents& z, const TrainingConfig& t, double beta, bool contrastive = true);

// Frame branch with beta plus sequence branch with beta_S. Reported JSD means
// are those of the frame branch.
LossTerms dual_delbo_loss(const Latents& z, const Latents& s, const TrainingConfig& t, bool contrastive = true);

}  // namespace vda::model
