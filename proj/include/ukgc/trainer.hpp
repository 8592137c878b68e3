#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "ukgc/backward.hpp"
#include "ukgc/error.hpp"
#include "ukgc/eval.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/model.hpp"
#include "ukgc/optimizer.hpp"
#include "ukgc/propagation.hpp"

namespace ukgc {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double l_f = 0.0;       // per-batch means over the epoch
  double l_c = 0.0;
  double l_ind_g = 0.0;
  double l_ind_f = 0.0;
  double total = 0.0;
  double val_recall20 = 0.0;
  double wall_seconds = 0.0;
};

struct FitOptions {
  Scorer val_scorer = Scorer::Tie;
  // Replaces validation Recall@20 when set (used to pin early-stopping behaviour).
  std::function<double(const ModelParams&, std::size_t epoch)> val_metric;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct FitResult {
  ModelParams params;  // best-validation parameters
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  bool stopped_early = false;
};

inline constexpr double kDivergenceThreshold = 1e6;

inline double validation_recall20(const ModelParams& params, const ModelGraphs& graphs,
                                  const DatasetSplit& split, const ModelDims& dims,
                                  Scorer scorer) {
  const FinalEmbeddings finals = forward(params, graphs, split.train, dims);
  EvalOptions opts;
  opts.target = EvalTarget::Validation;
  opts.ks = {20};
  opts.compute_auc = false;
  const MetricsReport r = evaluate(finals, split, scorer, opts);
  return r.defined ? r.recall.front() : 0.0;
}

// Epochs of (sample → forward → loss → backward → Adam) with early stopping on
// validation Recall@20. The batch stream is derived from `seed`, so a run is
// fully determined by its inputs.
inline FitResult fit(const DatasetSplit& split, const ModelGraphs& graphs, const ModelDims& dims,
                     const HyperParams& hp, std::uint64_t seed, const FitOptions& opts = {}) {
  hp.validate();
  FitResult result;
  ModelParams params = init_params(dims, seed);
  result.params = params;
  if (hp.max_epochs == 0) return result;

  AdamState adam = adam_init(params);
  const AdamConfig adam_cfg{hp.lr, hp.adam_beta1, hp.adam_beta2, hp.adam_eps};
  Rng rng(derive_seed(seed, stream::kBatches));
  const std::size_t n_batches =
      (split.train_pairs.size() + hp.batch_size - 1) / hp.batch_size;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const auto batch = sample_bpr_batch(split, hp.batch_size, rng);
      LossAndGradients lg = compute_gradients(batch, params, graphs, split.train, dims, hp);
      if (!(lg.loss.total <= kDivergenceThreshold)) {
        throw Error(ErrorCode::DivergedLoss, "loss " + std::to_string(lg.loss.total) +
                                                 " at epoch " + std::to_string(epoch));
      }
      adam_step(params, lg.grads, adam, adam_cfg);
      rec.l_f += lg.loss.l_f;
      rec.l_c += lg.loss.l_c;
      rec.l_ind_g += lg.loss.l_ind_g;
      rec.l_ind_f += lg.loss.l_ind_f;
      rec.total += lg.loss.total;
    }
    const auto nb = static_cast<double>(n_batches);
    rec.l_f /= nb;
    rec.l_c /= nb;
    rec.l_ind_g /= nb;
    rec.l_ind_f /= nb;
    rec.total /= nb;
    rec.val_recall20 = opts.val_metric
                           ? opts.val_metric(params, epoch)
                           : validation_recall20(params, graphs, split, dims, opts.val_scorer);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(rec);

    if (rec.val_recall20 > result.best_val) {
      result.best_val = rec.val_recall20;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= hp.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace ukgc
