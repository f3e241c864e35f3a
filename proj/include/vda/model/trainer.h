#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "vda/dsp/signal.h"
#include "vda/model/config.h"
#include "vda/model/encoder.h"
#include "vda/simvowels/simvowels.h"

namespace vda::model {

struct EpochLog {
  int epoch = 0;
  double loss_total = 0.0;
  double loss_recon = 0.0;
  double loss_ortho = 0.0;
  double loss_prior = 0.0;
  double jsd_pos_mean = 0.0;
  double jsd_neg_mean = 0.0;
  double lr_Z = 0.0;
  double lr_S = 0.0;
  double dev_total = 0.0;
};

struct TrainOptions {
  // Best-dev weights are written here at the end; also the last good weights
  // when training aborts on a non-finite loss. Empty skips the file.
  std::string checkpoint_path;
  // Per-epoch CSV, rewritten atomically after every epoch. Empty skips it.
  std::string log_path;
  // Features of every train/dev utterance are kept in memory when they fit.
  std::size_t cache_bytes = std::size_t{1} << 31;
  // Starting weights (transfer learning); must match the encoder config.
  const DecVAE* init = nullptr;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  DecVAE model;  // best-dev weights
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_dev = 0.0;
  bool early_stopped = false;
};

// Warm-up to lr_Z over warmup_epochs, then constant. Epochs count from 1.
double lr_z_at(const TrainingConfig& t, int epoch);
// Linear warm-up to lr_S, then linear decay toward zero at t_max.
double lr_s_at(const TrainingConfig& t, int epoch);

std::size_t batch_size(const TrainingConfig& t);

bool uses_decomposition(const TrainingConfig& t);

std::string log_header();
std::string log_row(const EpochLog& e);

// Fits the model on the train split with early stopping on the dev split.
// Throws on an empty train split and on a non-finite loss.
TrainResult train_decvae(const sim::Manifest& manifest, const EncoderConfig& enc, const TrainingConfig& t,
                         const dsp::DecompositionConfig& dcfg, const TrainOptions& opt = {});

}  // namespace vda::model
