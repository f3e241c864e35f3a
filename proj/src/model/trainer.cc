#include "vda/model/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vda/autodiff/adam.h"
#include "vda/dsp/wav.h"
#include "vda/model/checkpoint.h"
#include "vda/model/features.h"
#include "vda/model/losses.h"

namespace vda::model {

double lr_z_at(const TrainingConfig& t, int epoch) {
  if (t.warmup_epochs <= 0 || epoch >= t.warmup_epochs) return t.lr_Z;
  return t.lr_Z * static_cast<double>(epoch) / t.warmup_epochs;
}

double lr_s_at(const TrainingConfig& t, int epoch) {
  if (t.warmup_epochs > 0 && epoch < t.warmup_epochs) return t.lr_S * static_cast<double>(epoch) / t.warmup_epochs;
  const int span = std::max(1, t.t_max - t.warmup_epochs + 1);
  const int left = std::max(1, t.t_max - epoch + 1);
  return t.lr_S * static_cast<double>(left) / span;
}

std::size_t batch_size(const TrainingConfig& t) {
  return static_cast<std::size_t>(std::max(1LL, std::llround(t.batch_seconds / t.d_max_s)));
}

bool uses_decomposition(const TrainingConfig& t) { return t.objective == Objective::kDelbo; }

std::string log_header() { return "epoch,loss_total,loss_recon,loss_ortho,loss_prior,jsd_pos_mean,jsd_neg_mean,lr_Z,lr_S"; }

std::string log_row(const EpochLog& e) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", e.epoch, e.loss_total, e.loss_recon,
                e.loss_ortho, e.loss_prior, e.jsd_pos_mean, e.jsd_neg_mean, e.lr_Z, e.lr_S);
  return buf;
}

namespace {

void write_log(const std::string& path, const std::vector<EpochLog>& log) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write log '" + tmp + "'");
    f << log_header() << '\n';
    for (const auto& e : log) f << log_row(e) << '\n';
  }
  std::filesystem::rename(tmp, p);
}

// Loads, preprocesses and featurizes utterances, keeping the results when
// preprocessing is deterministic (no random crop) and the budget allows.
class FeatureSource {
 public:
  FeatureSource(const sim::Manifest& m, std::vector<const sim::ManifestRow*> rows, const TrainingConfig& t,
                const dsp::DecompositionConfig& dcfg, std::size_t n_mels, std::size_t budget, std::size_t cached_before)
      : m_(m), rows_(std::move(rows)), t_(t), dcfg_(dcfg), n_mels_(n_mels), cache_(rows_.size()),
        skip_(rows_.size(), false), budget_(budget), used_(cached_before) {}

  std::size_t size() const { return rows_.size(); }
  bool skipped(std::size_t i) const { return skip_[i]; }
  std::size_t used() const { return used_; }

  // nullptr when the utterance is shorter than d_min.
  const ViewFeatures* get(std::size_t i, std::mt19937_64& rng) {
    if (skip_[i]) return nullptr;
    if (cache_[i]) return &*cache_[i];
    const dsp::Signal raw = dsp::read_wav(m_.resolve(*rows_[i]));
    const auto dmax = static_cast<std::size_t>(std::llround(t_.d_max_s * raw.sample_rate));
    auto s = preprocess(raw, t_, rng);
    if (!s) {
      skip_[i] = true;
      return nullptr;
    }
    scratch_ = utterance_features(*s, dcfg_, t_.frame_ms, n_mels_, uses_decomposition(t_));
    const std::size_t bytes = scratch_.data.size() * sizeof(float);
    if (raw.size() <= dmax && used_ + bytes <= budget_) {
      used_ += bytes;
      cache_[i] = std::move(scratch_);
      return &*cache_[i];
    }
    return &scratch_;
  }

 private:
  const sim::Manifest& m_;
  std::vector<const sim::ManifestRow*> rows_;
  const TrainingConfig& t_;
  const dsp::DecompositionConfig& dcfg_;
  std::size_t n_mels_;
  std::vector<std::optional<ViewFeatures>> cache_;
  std::vector<bool> skip_;
  std::size_t budget_, used_;
  ViewFeatures scratch_;
};

struct BatchLoss {
  LossTerms terms;
  std::size_t items = 0;
};

// Gathers the next batch from `order` starting at `pos`; features are copied
// into the batch so uncached scratch buffers can be reused.
std::optional<BatchViews> next_batch(FeatureSource& src, const std::vector<std::size_t>& order, std::size_t& pos,
                                     std::size_t B, double l_ssl, std::mt19937_64& data_rng,
                                     std::mt19937_64& mask_rng) {
  std::vector<ViewFeatures> owned;
  std::vector<std::vector<std::size_t>> masks;
  while (pos < order.size() && owned.size() < B) {
    const ViewFeatures* f = src.get(order[pos++], data_rng);
    if (!f) continue;
    owned.push_back(*f);
    masks.push_back(sample_mask(f->frames, l_ssl, mask_rng));
  }
  if (owned.empty()) return std::nullopt;
  std::vector<const ViewFeatures*> ptrs;
  for (const auto& f : owned) ptrs.push_back(&f);
  return gather_batch(ptrs, masks);
}

LossTerms forward(ad::Tape& tape, const DecVAE& model, const BatchViews& b, const TrainingConfig& t, bool grads) {
  const bool contrastive = uses_decomposition(t);
  Latents z = model.encode(tape, b.x, b.B, b.K, Branch::kZ, t.logvar_clamp, grads);
  if (!model.config().dual) return delbo_loss(z, t, t.beta, contrastive);
  Latents s = model.encode(tape, b.x, b.B, b.K, Branch::kS, t.logvar_clamp, grads);
  return dual_delbo_loss(z, s, t, contrastive);
}

std::vector<std::vector<double>> snapshot(const DecVAE& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.params().size(); ++i) out.push_back(m.params().at(i).data);
  return out;
}

void restore(DecVAE& m, const std::vector<std::vector<double>>& s) {
  for (std::size_t i = 0; i < s.size(); ++i) m.params().at(i).data = s[i];
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

TrainResult train_decvae(const sim::Manifest& manifest, const EncoderConfig& enc, const TrainingConfig& t,
                         const dsp::DecompositionConfig& dcfg, const TrainOptions& opt) {
  validate(enc);
  validate(t, enc);
  if (uses_decomposition(t)) {
    if (dcfg.C != enc.C)
      throw std::invalid_argument("decomposition C=" + std::to_string(dcfg.C) + " differs from encoder C=" +
                                  std::to_string(enc.C));
    dsp::validate(dcfg, 16000);
  }
  const auto train_rows = manifest.split("train");
  if (train_rows.empty()) throw std::invalid_argument("training split is empty");

  TrainResult res{DecVAE(enc, t.seed), {}, 0, 0.0, false};
  DecVAE& model = res.model;
  if (opt.init) copy_parameters(*opt.init, model);

  FeatureSource train(manifest, train_rows, t, dcfg, enc.n_mels, opt.cache_bytes, 0);
  std::optional<FeatureSource> dev;
  if (!manifest.split("dev").empty())
    dev.emplace(manifest, manifest.split("dev"), t, dcfg, enc.n_mels, opt.cache_bytes, 0);

  auto zp = model.z_parameters();
  auto sp = model.s_parameters();
  ad::AdamState adam_z, adam_s;
  std::mt19937_64 data_rng(sim::derive_seed(t.seed, 1)), mask_rng(sim::derive_seed(t.seed, 2));
  const std::size_t B = batch_size(t);

  auto best = snapshot(model);
  double best_dev = 0.0;
  bool have_best = false;
  int stale = 0;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= t.t_max; ++epoch) {
    EpochLog e;
    e.epoch = epoch;
    e.lr_Z = adam_z.lr = lr_z_at(t, epoch);
    e.lr_S = adam_s.lr = lr_s_at(t, epoch);
    const auto good = snapshot(model);
    shuffle(order, mask_rng);
    std::size_t pos = 0, batches = 0;
    while (auto b = next_batch(train, order, pos, B, t.l_ssl, data_rng, mask_rng)) {
      ad::Tape tape;
      LossTerms L = forward(tape, model, *b, t, true);
      const double total = L.total.item();
      if (!std::isfinite(total)) {
        restore(model, good);
        if (!opt.checkpoint_path.empty()) save_checkpoint(opt.checkpoint_path, model, t, dcfg, t.seed, epoch - 1);
        throw std::runtime_error("non-finite training loss at epoch " + std::to_string(epoch) +
                                 "; last good weights restored");
      }
      ad::zero_grads(zp);
      ad::zero_grads(sp);
      tape.backward(L.total);
      ad::adam_step(zp, adam_z);
      if (!sp.empty()) ad::adam_step(sp, adam_s);
      e.loss_total += total;
      e.loss_recon += L.recon.item();
      e.loss_ortho += L.ortho.item();
      e.loss_prior += L.prior.item();
      e.jsd_pos_mean += L.jsd_pos_mean;
      e.jsd_neg_mean += L.jsd_neg_mean;
      ++batches;
    }
    if (batches == 0) throw std::invalid_argument("no training utterance reaches d_min");
    for (double* v : {&e.loss_total, &e.loss_recon, &e.loss_ortho, &e.loss_prior, &e.jsd_pos_mean, &e.jsd_neg_mean})
      *v /= static_cast<double>(batches);

    e.dev_total = e.loss_total;
    if (dev) {
      std::mt19937_64 dev_data(t.dev_mask_seed), dev_mask(sim::derive_seed(t.dev_mask_seed, 1));
      std::vector<std::size_t> dev_order(dev->size());
      for (std::size_t i = 0; i < dev_order.size(); ++i) dev_order[i] = i;
      double acc = 0.0;
      std::size_t n = 0, dpos = 0;
      while (auto b = next_batch(*dev, dev_order, dpos, B, t.l_ssl, dev_data, dev_mask)) {
        ad::Tape tape;
        acc += forward(tape, model, *b, t, false).total.item() * static_cast<double>(b->B);
        n += b->B;
      }
      if (n > 0) e.dev_total = acc / static_cast<double>(n);
    }
    if (!std::isfinite(e.dev_total)) throw std::runtime_error("non-finite dev loss at epoch " + std::to_string(epoch));

    res.log.push_back(e);
    if (!opt.log_path.empty()) write_log(opt.log_path, res.log);
    if (opt.on_epoch) opt.on_epoch(e);

    // Improvement-only early stopping, active after tau_warmup epochs.
    const bool improved = !have_best || (best_dev - e.dev_total) > t.tau_delta * std::abs(best_dev);
    if (improved || (epoch <= t.tau_warmup && e.dev_total < best_dev)) {
      best_dev = e.dev_total;
      best = snapshot(model);
      res.best_epoch = epoch;
      have_best = true;
    }
    if (epoch > t.tau_warmup) {
      stale = improved ? 0 : stale + 1;
      if (stale >= t.tau_patience) {
        res.early_stopped = true;
        break;
      }
    }
  }
  restore(model, best);
  res.best_dev = best_dev;
  if (!opt.checkpoint_path.empty()) save_checkpoint(opt.checkpoint_path, model, t, dcfg, t.seed, res.best_epoch);
  return res;
}

}  // namespace vda::model
