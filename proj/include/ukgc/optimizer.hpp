#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "ukgc/matrix.hpp"
#include "ukgc/model.hpp"

namespace ukgc {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ModelParams m;
  ModelParams v;
  std::uint64_t step = 0;
};

inline AdamState adam_init(const ModelParams& params) {
  return {zeros_like(params), zeros_like(params), 0};
}

inline void adam_update(Matrix& x, const Matrix& g, Matrix& m, Matrix& v, const AdamConfig& cfg,
                        double bias1, double bias2) {
  auto xs = x.flat();
  auto gs = g.flat();
  auto ms = m.flat();
  auto vs = v.flat();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ms[i] = cfg.beta1 * ms[i] + (1.0 - cfg.beta1) * gs[i];
    vs[i] = cfg.beta2 * vs[i] + (1.0 - cfg.beta2) * gs[i] * gs[i];
    const double m_hat = ms[i] / bias1;
    const double v_hat = vs[i] / bias2;
    xs[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

// Bias-corrected Adam over all six tensors.
inline void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
                      const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  adam_update(params.geo.embeddings, grads.geo.embeddings, state.m.geo.embeddings,
              state.v.geo.embeddings, cfg, bias1, bias2);
  adam_update(params.geo.relations, grads.geo.relations, state.m.geo.relations,
              state.v.geo.relations, cfg, bias1, bias2);
  adam_update(params.geo.intent_scores, grads.geo.intent_scores, state.m.geo.intent_scores,
              state.v.geo.intent_scores, cfg, bias1, bias2);
  adam_update(params.func.embeddings, grads.func.embeddings, state.m.func.embeddings,
              state.v.func.embeddings, cfg, bias1, bias2);
  adam_update(params.func.relations, grads.func.relations, state.m.func.relations,
              state.v.func.relations, cfg, bias1, bias2);
  adam_update(params.func.intent_scores, grads.func.intent_scores, state.m.func.intent_scores,
              state.v.func.intent_scores, cfg, bias1, bias2);
}

}  // namespace ukgc
