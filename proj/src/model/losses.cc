#include "vda/model/losses.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vda::model {

namespace {

double value_mean(const ad::Var& v) {
  double s = 0.0;
  for (double x : v.value().data) s += x;
  return s / static_cast<double>(v.numel());
}

void check_hidden(const ad::Var& H, const char* who) {
  if (H.shape().size() != 4 || H.shape()[1] < 2)
    throw std::invalid_argument(std::string(who) + ": expected H [B, V>=2, K, d], got " +
                                ad::shape_str(H.shape()));
}

ad::Var view(const ad::Var& H, std::size_t v) { return ad::slice(H, 1, v, v + 1); }

ad::Var zero(const ad::Var& like) { return like.tape()->constant(ad::Tensor::scalar(0.0)); }

}  // namespace

ad::Var pairwise_jsd(const ad::Var& a, const ad::Var& b) {
  return ad::mul_scalar(ad::jsd(a, b), 1.0 / std::numbers::ln2);
}

ad::Var bce_to_zero(const ad::Var& s, double epsilon) {
  return ad::neg(ad::log(ad::rsub_scalar(1.0, ad::clamp(s, epsilon, 1.0 - epsilon))));
}

ad::Var bce_to_one(const ad::Var& s, double epsilon) {
  return ad::neg(ad::log(ad::clamp(s, epsilon, 1.0 - epsilon)));
}

ad::Var loss_recon(const ad::Var& H, const TrainingConfig& t, double* jsd_mean) {
  check_hidden(H, "loss_recon");
  const std::size_t V = H.shape()[1];
  ad::Var total = zero(H);
  double acc = 0.0;
  const ad::Var h0 = view(H, 0);
  for (std::size_t i = 1; i < V; ++i) {
    ad::Var s = pairwise_jsd(view(H, i), h0);
    acc += value_mean(s);
    total = ad::add(total, ad::mul_scalar(ad::mean(bce_to_zero(s, t.epsilon)), t.w_pos_at(i - 1)));
  }
  if (jsd_mean) *jsd_mean = acc / static_cast<double>(V - 1);
  return total;
}

ad::Var loss_ortho(const ad::Var& H, const TrainingConfig& t, double* jsd_mean) {
  check_hidden(H, "loss_ortho");
  const std::size_t V = H.shape()[1];
  if (V < 3) throw std::invalid_argument("loss_ortho: needs at least two components");
  ad::Var total = zero(H);
  double acc = 0.0;
  std::size_t pair = 0;
  for (std::size_t i = 1; i < V; ++i)
    for (std::size_t j = i + 1; j < V; ++j, ++pair) {
      ad::Var s = pairwise_jsd(view(H, i), view(H, j));
      acc += value_mean(s);
      total = ad::add(total, ad::mul_scalar(ad::mean(bce_to_one(s, t.epsilon)), t.w_neg_at(pair)));
    }
  if (jsd_mean) *jsd_mean = acc / static_cast<double>(pair);
  return total;
}

ad::Var loss_prior(const ad::Var& mu, const ad::Var& logvar) {
  const auto& s = mu.shape();
  if (s != logvar.shape() || s.size() != 4)
    throw std::invalid_argument("loss_prior: expected matching [B, V, K, z], got " + ad::shape_str(s) + " and " +
                                ad::shape_str(logvar.shape()));
  ad::Var kl = ad::sub(ad::add_scalar(ad::add(ad::exp(logvar), ad::square(mu)), -1.0), logvar);
  return ad::mul_scalar(ad::sum(kl), 0.5 / static_cast<double>(s[0] * s[2]));
}

LossTerms delbo_loss(const Latents& z, const TrainingConfig& t, double beta, bool contrastive) {
  LossTerms out;
  if (contrastive) {
    out.recon = loss_recon(z.H, t, &out.jsd_pos_mean);
    out.ortho = loss_ortho(z.H, t, &out.jsd_neg_mean);
  } else {
    out.recon = zero(z.H);
    out.ortho = zero(z.H);
  }
  out.prior = loss_prior(z.mu, z.logvar);
  out.total = ad::add(ad::add(out.recon, out.ortho), ad::mul_scalar(out.prior, beta));
  return out;
}

LossTerms dual_delbo_loss(const Latents& z, const Latents& s, const TrainingConfig& t, bool contrastive) {
  LossTerms a = delbo_loss(z, t, t.beta, contrastive);
  LossTerms b = delbo_loss(s, t, t.beta_S, contrastive);
  LossTerms out;
  out.recon = ad::add(a.recon, b.recon);
  out.ortho = ad::add(a.ortho, b.ortho);
  out.prior = ad::add(a.prior, b.prior);
  out.total = ad::add(a.total, b.total);
  out.jsd_pos_mean = a.jsd_pos_mean;
  out.jsd_neg_mean = a.jsd_neg_mean;
  return out;
}

}  // namespace vda::model
