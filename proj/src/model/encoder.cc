#include "vda/model/encoder.h"

#include <cmath>
#include <stdexcept>

namespace vda::model {

ad::Tensor& ParamStore::add(const std::string& name, ad::Shape shape) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  tensors_.emplace_back(std::move(shape));
  tensors_.back().requires_grad = true;
  names_.push_back(name);
  return tensors_.back();
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

ad::Tensor& ParamStore::get(const std::string& name) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return tensors_[i];
  throw std::out_of_range("no parameter '" + name + "'");
}

const ad::Tensor& ParamStore::get(const std::string& name) const {
  return const_cast<ParamStore*>(this)->get(name);
}

std::vector<ad::Tensor*> ParamStore::with_prefix(const std::string& prefix) {
  std::vector<ad::Tensor*> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i].rfind(prefix, 0) == 0) out.push_back(&tensors_[i]);
  return out;
}

std::size_t ParamStore::numel() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.numel();
  return n;
}

namespace {

// He-normal weights for GELU layers, zero biases, unit LayerNorm gains.
void he_init(ad::Tensor& w, std::size_t fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (double& v : w.data) v = nd(rng);
}

void add_encoder(ParamStore& p, const EncoderConfig& c, const std::string& pre, std::mt19937_64& rng) {
  std::size_t cin = c.n_mels;
  for (std::size_t l = 0; l < c.conv_layers.size(); ++l) {
    const auto& L = c.conv_layers[l];
    const std::string n = pre + "conv" + std::to_string(l);
    he_init(p.add(n + ".W", {L.channels, L.kernel, cin}), L.kernel * cin, rng);
    p.add(n + ".b", {L.channels});
    p.add(n + ".ln.g", {L.channels}).data.assign(L.channels, 1.0);
    p.add(n + ".ln.b", {L.channels});
    cin = L.channels;
  }
  he_init(p.add(pre + "proj.W", {c.v, cin}), cin, rng);
  p.add(pre + "proj.b", {c.v});
  he_init(p.add(pre + "fH.W", {c.d, c.v}), c.v, rng);
  p.add(pre + "fH.b", {c.d});
  for (std::size_t v = 0; v < c.views(); ++v) {
    const std::string n = pre + "head" + std::to_string(v);
    // Small heads start the posteriors near the prior.
    std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(static_cast<double>(c.d)));
    for (const char* part : {".mu.W", ".lv.W"}) {
      auto& w = p.add(n + part, {c.z_dim, c.d});
      for (double& x : w.data) x = nd(rng);
    }
    p.add(n + ".mu.b", {c.z_dim});
    p.add(n + ".lv.b", {c.z_dim});
  }
}

}  // namespace

DecVAE::DecVAE(EncoderConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  validate(cfg_);
  std::mt19937_64 rng(seed);
  add_encoder(params_, cfg_, "z.", rng);
  if (cfg_.aggregation.kind == AggKind::kLearnedProjection) {
    const std::size_t in = static_cast<std::size_t>(cfg_.C) * cfg_.z_dim;
    const std::size_t h = cfg_.aggregation.proj_hidden;
    he_init(params_.add("g.W1", {h, in}), in, rng);
    params_.add("g.b1", {h});
    he_init(params_.add("g.W2", {cfg_.aggregation.proj_dim, h}), h, rng);
    params_.add("g.b2", {cfg_.aggregation.proj_dim});
  }
  if (cfg_.dual) add_encoder(params_, cfg_, "s.", rng);
}

std::vector<ad::Tensor*> DecVAE::z_parameters() {
  auto out = params_.with_prefix("z.");
  for (auto* t : params_.with_prefix("g.")) out.push_back(t);
  return out;
}

std::vector<ad::Tensor*> DecVAE::s_parameters() { return params_.with_prefix("s."); }

ad::Var DecVAE::bind(ad::Tape& tape, const std::string& name, bool grads) const {
  ad::Tensor& t = params_.get(name);
  return grads ? tape.parameter(t) : tape.constant(ad::Tensor(t.shape, t.data));
}

ad::Var DecVAE::hidden(ad::Tape& tape, const ad::Var& x, const std::string& pre, bool grads) const {
  ad::Var h = x;
  for (std::size_t l = 0; l < cfg_.conv_layers.size(); ++l) {
    const auto& L = cfg_.conv_layers[l];
    const std::string n = pre + "conv" + std::to_string(l);
    h = ad::conv1d(h, bind(tape, n + ".W", grads), bind(tape, n + ".b", grads), L.stride, L.kernel / 2);
    h = ad::gelu(ad::layer_norm(h, bind(tape, n + ".ln.g", grads), bind(tape, n + ".ln.b", grads)));
  }
  h = ad::mean_axis(h, 1);
  h = ad::gelu(ad::linear(h, bind(tape, pre + "proj.W", grads), bind(tape, pre + "proj.b", grads)));
  return ad::gelu(ad::linear(h, bind(tape, pre + "fH.W", grads), bind(tape, pre + "fH.b", grads)));
}

Latents DecVAE::encode(ad::Tape& tape, const ad::Tensor& x, std::size_t B, std::size_t K, Branch branch,
                       double logvar_clamp, bool grads) const {
  if (branch == Branch::kS && !cfg_.dual) throw std::logic_error("encode: sequence branch is disabled");
  if (x.rank() != 3 || x.dim(2) != cfg_.n_mels || B == 0 || K == 0 || x.dim(0) % (B * K) != 0)
    throw std::invalid_argument("encode: input shape " + ad::shape_str(x.shape) + " does not match B=" +
                                std::to_string(B) + " K=" + std::to_string(K) + " M=" +
                                std::to_string(cfg_.n_mels));
  const std::size_t V = cfg_.views();
  const std::size_t vin = x.dim(0) / (B * K);
  if (vin != V && vin != 1)
    throw std::invalid_argument("encode: expected " + std::to_string(V) + " or 1 views, got " +
                                std::to_string(vin));
  const std::string pre = branch == Branch::kZ ? "z." : "s.";
  ad::Var h = hidden(tape, tape.constant(x), pre, grads);
  for (double v : h.value().data)
    if (!std::isfinite(v)) throw std::runtime_error("encode: non-finite hidden activation");
  h = ad::reshape(h, {B, vin, K, cfg_.d});
  if (vin == 1 && V > 1) {
    std::vector<ad::Var> copies(V, h);
    h = ad::concat(copies, 1);
  }
  ad::Var src = branch == Branch::kS ? sequence_pool(h) : h;
  std::vector<ad::Var> mus, lvs;
  for (std::size_t v = 0; v < V; ++v) {
    const std::string n = pre + "head" + std::to_string(v);
    ad::Var hv = ad::slice(src, 1, v, v + 1);
    mus.push_back(ad::linear(hv, bind(tape, n + ".mu.W", grads), bind(tape, n + ".mu.b", grads)));
    lvs.push_back(ad::clamp(ad::linear(hv, bind(tape, n + ".lv.W", grads), bind(tape, n + ".lv.b", grads)),
                            -logvar_clamp, logvar_clamp));
  }
  return {src, ad::concat(mus, 1), ad::concat(lvs, 1)};
}

ad::Var DecVAE::aggregate(ad::Tape& tape, const ad::Var& z, bool grads) const {
  const std::size_t V = cfg_.views(), zd = cfg_.z_dim;
  if (z.shape().size() != 3 || z.shape()[1] != V || z.shape()[2] != zd)
    throw std::invalid_argument("aggregate: expected [N, " + std::to_string(V) + ", " + std::to_string(zd) +
                                "], got " + ad::shape_str(z.shape()));
  const std::size_t N = z.shape()[0];
  const auto& a = cfg_.aggregation;
  switch (a.kind) {
    case AggKind::kSingleSubspace:
      return ad::reshape(ad::slice(z, 1, static_cast<std::size_t>(a.index), a.index + 1), {N, zd});
    case AggKind::kConcatComponents:
      return ad::reshape(ad::slice(z, 1, 1, V), {N, (V - 1) * zd});
    case AggKind::kConcatAll:
      return ad::reshape(z, {N, V * zd});
    case AggKind::kLearnedProjection: {
      ad::Var in = ad::reshape(ad::slice(z, 1, 1, V), {N, (V - 1) * zd});
      ad::Var h = ad::gelu(ad::linear(in, bind(tape, "g.W1", grads), bind(tape, "g.b1", grads)));
      return ad::linear(h, bind(tape, "g.W2", grads), bind(tape, "g.b2", grads));
    }
  }
  throw std::logic_error("aggregate: unknown mode");
}

ad::Var sequence_pool(const ad::Var& H) {
  const auto& s = H.shape();
  if (s.size() != 4 || s[2] == 0) throw std::invalid_argument("sequence_pool: expected [B, V, K>=1, d]");
  return ad::reshape(ad::mean_axis(H, 2), {s[0], s[1], 1, s[3]});
}

ad::Var reparameterize(const ad::Var& mu, const ad::Var& logvar, std::mt19937_64& rng) {
  if (mu.shape() != logvar.shape())
    throw std::invalid_argument("reparameterize: mu " + ad::shape_str(mu.shape()) + " vs logvar " +
                                ad::shape_str(logvar.shape()));
  ad::Tensor eps(mu.shape());
  std::normal_distribution<double> nd(0.0, 1.0);
  for (double& e : eps.data) e = nd(rng);
  ad::Tape& t = *mu.tape();
  return ad::add(mu, ad::mul(ad::exp(ad::mul_scalar(logvar, 0.5)), t.constant(std::move(eps))));
}

}  // namespace vda::model
