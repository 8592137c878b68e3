#pragma once

// Reverse pass of the full objective, derived by hand.
//
// Because users never feed back into POIs, a user's final row unrolls to
//   u^(L) = u^(0) + (1/|N_u|) c_u ⊙ Σ_{l<L} Σ_{p∈N_u} p^(l),  c_u = (1/|I|) Σ_j β_uj e_j
// so the user side needs no per-layer tape. The KG side is linear in the
// node state for fixed relations and is replayed layer by layer.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ukgc/error.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/loss.hpp"
#include "ukgc/matrix.hpp"
#include "ukgc/model.hpp"
#include "ukgc/propagation.hpp"

namespace ukgc {

struct LossAndGradients {
  LossBreakdown loss;
  Gradients grads;
};

namespace detail {

// Gradient of one chunk given ∂L/∂(final user rows) and ∂L/∂(final POI rows).
// `ind_scale` is the weight of this chunk's independence loss; returns its value.
inline double backprop_channel(const ChannelParams& ch, const ChannelTrace& tr,
                               const AdjacencyIndex& adj, const InteractionSet& train,
                               const Matrix& grad_user_final, const Matrix& grad_poi_final,
                               double ind_scale, ChannelParams& grad) {
  const std::size_t n_users = train.n_users();
  const std::size_t n_nodes = adj.node_count();
  const std::size_t dim = ch.embeddings.cols();
  const std::size_t n_layers = tr.node_layers.size() - 1;
  const Matrix& intents = tr.intents.intents;
  const std::size_t n_intents = intents.rows();

  Matrix grad_gates(n_users, dim);
  Matrix inject(n_nodes, dim);  // added to ∂L/∂node^(l) for every l < L
  std::vector<double> pooled(dim);
  std::vector<double> msg(dim);
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto g_u = grad_user_final.row(u);
    axpy(1.0, g_u, grad.embeddings.row(u));
    const auto items = train.positives(static_cast<UserId>(u));
    if (items.empty() || n_layers == 0) continue;
    const double w = 1.0 / static_cast<double>(items.size());
    std::fill(pooled.begin(), pooled.end(), 0.0);
    for (std::size_t l = 0; l < n_layers; ++l) {
      for (PoiId p : items) axpy(1.0, tr.node_layers[l].row(p), pooled);
    }
    add_hadamard(w, g_u, pooled, grad_gates.row(u));
    const auto c_u = tr.gates.row(u);
    for (std::size_t k = 0; k < dim; ++k) msg[k] = w * c_u[k] * g_u[k];
    for (PoiId p : items) axpy(1.0, msg, inject.row(p));
  }

  // Node side: G^(L) from the scores, then G^(l-1) = G^(l) + Aᵀ G^(l) + inject.
  Matrix g_nodes(n_nodes, dim);
  for (std::size_t p = 0; p < grad_poi_final.rows(); ++p) {
    std::copy(grad_poi_final.row(p).begin(), grad_poi_final.row(p).end(),
              g_nodes.row(p).begin());
  }
  for (std::size_t l = n_layers; l >= 1; --l) {
    const Matrix& prev = tr.node_layers[l - 1];
    Matrix g_prev = g_nodes;
    for (std::size_t v = 0; v < n_nodes; ++v) {
      const auto nbrs = adj.neighbors(v);
      if (nbrs.empty()) continue;
      const double w = 1.0 / static_cast<double>(nbrs.size());
      const auto g_v = g_nodes.row(v);
      for (const AdjacencyEntry& e : nbrs) {
        add_hadamard(w, ch.relations.row(e.relation), g_v, g_prev.row(e.neighbor));
        add_hadamard(w, prev.row(e.neighbor), g_v, grad.relations.row(e.relation));
      }
    }
    for (std::size_t v = 0; v < n_nodes; ++v) axpy(1.0, inject.row(v), g_prev.row(v));
    g_nodes = std::move(g_prev);
  }
  for (std::size_t v = 0; v < n_nodes; ++v) {
    axpy(1.0, g_nodes.row(v), grad.embeddings.row(n_users + v));
  }

  // Gates c_u = (1/|I|) Σ_j β_uj e_j and β_u = softmax_j(e_j · u0).
  Matrix grad_intents(n_intents, dim);
  std::vector<double> g_beta(n_intents);
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto gc = grad_gates.row(u);
    const auto beta = tr.beta.row(u);
    double mean = 0.0;
    for (std::size_t j = 0; j < n_intents; ++j) {
      g_beta[j] = dot(intents.row(j), gc) / static_cast<double>(n_intents);
      axpy(beta[j] / static_cast<double>(n_intents), gc, grad_intents.row(j));
      mean += beta[j] * g_beta[j];
    }
    const auto u0 = tr.user_layers.front().row(u);
    for (std::size_t j = 0; j < n_intents; ++j) {
      const double g_logit = beta[j] * (g_beta[j] - mean);
      if (g_logit == 0.0) continue;
      axpy(g_logit, u0, grad_intents.row(j));
      axpy(g_logit, intents.row(j), grad.embeddings.row(u));
    }
  }

  const double ind = independence_loss_backward(tr.intents, ind_scale, grad_intents);

  // intents = α R, α = row-softmax(S).
  const Matrix& alpha = tr.intents.alpha;
  for (std::size_t i = 0; i < n_intents; ++i) {
    double mean = 0.0;
    std::vector<double> g_alpha(alpha.cols());
    for (std::size_t r = 0; r < alpha.cols(); ++r) {
      axpy(alpha(i, r), grad_intents.row(i), grad.relations.row(r));
      g_alpha[r] = dot(grad_intents.row(i), ch.relations.row(r));
      mean += alpha(i, r) * g_alpha[r];
    }
    for (std::size_t r = 0; r < alpha.cols(); ++r) {
      grad.intent_scores(i, r) += alpha(i, r) * (g_alpha[r] - mean);
    }
  }
  return ind;
}

}  // namespace detail

// Loss breakdown and exact gradients of the full objective for one batch.
inline LossAndGradients compute_gradients(std::span<const BprTriple> batch,
                                          const ModelParams& params, const ModelGraphs& graphs,
                                          const InteractionSet& train, const ModelDims& dims,
                                          const HyperParams& hp) {
  const ForwardTrace trace = forward_traced(params, graphs, train, dims);
  const FinalEmbeddings& f = trace.finals;
  LossAndGradients out;
  out.grads = zeros_like(params);
  LossBreakdown& loss = out.loss;

  Matrix g_user(dims.n_users, dims.dim);
  Matrix g_poi(dims.n_pois, dims.dim);
  Matrix g_user_geo(dims.n_users, dims.dim);
  Matrix g_poi_geo(dims.n_pois, dims.dim);
  for (const BprTriple& t : batch) {
    {
      const auto u = f.user.row(t.user);
      const double margin = dot(u, f.poi.row(t.pos)) - dot(u, f.poi.row(t.neg));
      loss.l_f += softplus(-margin);
      const double c = -sigmoid(-margin);
      axpy(c, f.poi.row(t.pos), g_user.row(t.user));
      axpy(-c, f.poi.row(t.neg), g_user.row(t.user));
      axpy(c, u, g_poi.row(t.pos));
      axpy(-c, u, g_poi.row(t.neg));
    }
    {
      const auto u = f.user_geo.row(t.user);
      const double margin = dot(u, f.poi_geo.row(t.pos)) - dot(u, f.poi_geo.row(t.neg));
      loss.l_c += softplus(-margin);
      const double c = -hp.alpha * sigmoid(-margin);
      axpy(c, f.poi_geo.row(t.pos), g_user_geo.row(t.user));
      axpy(-c, f.poi_geo.row(t.neg), g_user_geo.row(t.user));
      axpy(c, u, g_poi_geo.row(t.pos));
      axpy(-c, u, g_poi_geo.row(t.neg));
    }
  }

  // Fused rows are chunk means.
  auto half = [](const Matrix& m) {
    Matrix h = m;
    for (double& v : h.flat()) v *= 0.5;
    return h;
  };
  Matrix g_user_func = half(g_user);
  Matrix g_poi_func = half(g_poi);
  axpy(1.0, g_user_func.flat(), g_user_geo.flat());
  axpy(1.0, g_poi_func.flat(), g_poi_geo.flat());

  loss.l_ind_g = detail::backprop_channel(params.geo, trace.geo, graphs.geo, train, g_user_geo,
                                          g_poi_geo, hp.lambda_ind, out.grads.geo);
  loss.l_ind_f = detail::backprop_channel(params.func, trace.func, graphs.func, train,
                                          g_user_func, g_poi_func, hp.lambda_ind,
                                          out.grads.func);

  loss.l_reg = total_squared_norm(params);
  loss.l_reg_g = geo_squared_norm(params);
  const double geo_decay = 2.0 * hp.lambda_reg * (1.0 + hp.alpha);
  const double func_decay = 2.0 * hp.lambda_reg;
  for_each_tensor_pair(out.grads, params,
                       [&](std::string_view name, Matrix& g, const Matrix& x) {
                         const double decay = name.back() == 'g' ? geo_decay : func_decay;
                         axpy(decay, x.flat(), g.flat());
                       });
  loss.total = combine(loss, hp);

  for_each_tensor(out.grads, [](std::string_view name, const Matrix& g) {
    if (!all_finite(g)) {
      throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient in " + std::string(name));
    }
  });
  return out;
}

}  // namespace ukgc
