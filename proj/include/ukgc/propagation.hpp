#pragma once

// Layered message passing over the two KG chunks plus the user-POI graph.
//
// Per chunk, with nodes = [POIs | entities] and users kept separately:
//   node'  = node + mean over (r, v) in N(node) of r ⊙ v
//   user'  = user + 1/(|N_u| |I|) Σ_j β_uj e_j ⊙ Σ_{p∈N_u} p
// Both read previous-layer state only. β comes from layer-0 user rows and is
// reused at every layer. Finals fuse the chunks by their arithmetic mean.

#include <cstddef>
#include <string>
#include <vector>

#include "ukgc/error.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/matrix.hpp"
#include "ukgc/model.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc {

// Adjacency driving each chunk. Normally the geographical and functional
// subgraphs; the no-disentangle ablation puts the full KG in both.
struct ModelGraphs {
  AdjacencyIndex geo;
  AdjacencyIndex func;
};

inline ModelGraphs disentangled_graphs(const UrbanKG& kg) {
  auto [g, f] = split_subgraphs(kg);
  return {build_adjacency(g), build_adjacency(f)};
}

inline ModelGraphs blended_graphs(const UrbanKG& kg) {
  AdjacencyIndex full = build_adjacency(make_subgraph(kg, GraphView::Full));
  return {full, full};
}

inline Matrix propagate_poi_layer(const Matrix& nodes, const AdjacencyIndex& adj,
                                  const Matrix& relations) {
  Matrix next = nodes;
  for (std::size_t v = 0; v < adj.node_count(); ++v) {
    const auto nbrs = adj.neighbors(v);
    if (nbrs.empty()) continue;
    const double w = 1.0 / static_cast<double>(nbrs.size());
    auto out = next.row(v);
    for (const AdjacencyEntry& e : nbrs) {
      add_hadamard(w, relations.row(e.relation), nodes.row(e.neighbor), out);
    }
  }
  return next;
}

// gates(u) = 1/|I| Σ_j β_uj e_j, shared by every layer.
inline Matrix user_gates(const Matrix& beta, const IntentSet& intents) {
  const std::size_t n_intents = intents.intents.rows();
  Matrix gates(beta.rows(), intents.intents.cols());
  for (std::size_t u = 0; u < beta.rows(); ++u) {
    for (std::size_t j = 0; j < n_intents; ++j) {
      axpy(beta(u, j) / static_cast<double>(n_intents), intents.intents.row(j), gates.row(u));
    }
  }
  return gates;
}

inline Matrix intent_attention_matrix(const Matrix& base_users, const IntentSet& intents) {
  Matrix beta(base_users.rows(), intents.intents.rows());
  for (std::size_t u = 0; u < base_users.rows(); ++u) {
    const auto b = user_intent_attention(base_users.row(u), intents);
    std::copy(b.begin(), b.end(), beta.row(u).begin());
  }
  return beta;
}

// `nodes` holds previous-layer POI rows first, so PoiId indexes it directly.
inline Matrix propagate_user_layer(const Matrix& users, const Matrix& nodes,
                                   const InteractionSet& train, const IntentSet& intents,
                                   const Matrix& beta) {
  const Matrix gates = user_gates(beta, intents);
  Matrix next = users;
  std::vector<double> pooled(users.cols());
  for (std::size_t u = 0; u < users.rows(); ++u) {
    const auto items = train.positives(static_cast<UserId>(u));
    if (items.empty()) continue;
    std::fill(pooled.begin(), pooled.end(), 0.0);
    for (PoiId p : items) axpy(1.0, nodes.row(p), pooled);
    add_hadamard(1.0 / static_cast<double>(items.size()), gates.row(u), pooled, next.row(u));
  }
  return next;
}

// Everything backward() needs from one chunk's forward pass.
struct ChannelTrace {
  IntentSet intents;
  Matrix beta;                      // users x intents
  Matrix gates;                     // users x dim
  std::vector<Matrix> node_layers;  // n_layers + 1 entries, [POIs | entities] x dim
  std::vector<Matrix> user_layers;  // n_layers + 1 entries, users x dim
};

inline Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t count) {
  Matrix out(count, m.cols());
  for (std::size_t r = 0; r < count; ++r) {
    std::copy(m.row(begin + r).begin(), m.row(begin + r).end(), out.row(r).begin());
  }
  return out;
}

inline void check_channel_shapes(const ChannelParams& ch, const AdjacencyIndex& adj,
                                 std::size_t n_users, const char* name) {
  if (ch.embeddings.rows() != n_users + adj.node_count() ||
      ch.relations.rows() != adj.n_relations()) {
    throw Error(ErrorCode::DimsMismatch,
                std::string(name) + " chunk: parameters " + std::to_string(ch.embeddings.rows()) +
                    " rows / " + std::to_string(ch.relations.rows()) + " relations vs graph " +
                    std::to_string(n_users + adj.node_count()) + " rows / " +
                    std::to_string(adj.n_relations()) + " relations");
  }
}

inline ChannelTrace trace_channel(const ChannelParams& ch, const AdjacencyIndex& adj,
                                  const InteractionSet& train, std::size_t n_layers) {
  const std::size_t n_users = train.n_users();
  ChannelTrace tr;
  tr.intents = intent_embeddings(ch.intent_scores, ch.relations);
  tr.user_layers.push_back(slice_rows(ch.embeddings, 0, n_users));
  tr.node_layers.push_back(slice_rows(ch.embeddings, n_users, adj.node_count()));
  tr.beta = intent_attention_matrix(tr.user_layers.front(), tr.intents);
  tr.gates = user_gates(tr.beta, tr.intents);
  for (std::size_t l = 0; l < n_layers; ++l) {
    tr.user_layers.push_back(propagate_user_layer(tr.user_layers.back(), tr.node_layers.back(),
                                                  train, tr.intents, tr.beta));
    tr.node_layers.push_back(propagate_poi_layer(tr.node_layers.back(), adj, ch.relations));
  }
  return tr;
}

struct FinalEmbeddings {
  Matrix user_geo;
  Matrix user_func;
  Matrix poi_geo;
  Matrix poi_func;
  Matrix user;  // (user_geo + user_func) / 2
  Matrix poi;   // (poi_geo + poi_func) / 2
};

inline Matrix mean_of(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols());
  auto x = a.flat();
  auto y = b.flat();
  auto o = out.flat();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.5 * (x[i] + y[i]);
  return out;
}

struct ForwardTrace {
  ChannelTrace geo;
  ChannelTrace func;
  FinalEmbeddings finals;
};

inline ForwardTrace forward_traced(const ModelParams& params, const ModelGraphs& graphs,
                                   const InteractionSet& train, const ModelDims& dims) {
  check_channel_shapes(params.geo, graphs.geo, train.n_users(), "geographical");
  check_channel_shapes(params.func, graphs.func, train.n_users(), "functional");
  if (graphs.geo.n_pois() != dims.n_pois || graphs.func.n_pois() != dims.n_pois ||
      train.n_pois() != dims.n_pois) {
    throw Error(ErrorCode::DimsMismatch, "POI catalogs disagree between graphs, data and dims");
  }
  ForwardTrace t;
  t.geo = trace_channel(params.geo, graphs.geo, train, dims.n_layers);
  t.func = trace_channel(params.func, graphs.func, train, dims.n_layers);
  FinalEmbeddings& f = t.finals;
  f.user_geo = t.geo.user_layers.back();
  f.user_func = t.func.user_layers.back();
  f.poi_geo = slice_rows(t.geo.node_layers.back(), 0, dims.n_pois);
  f.poi_func = slice_rows(t.func.node_layers.back(), 0, dims.n_pois);
  f.user = mean_of(f.user_geo, f.user_func);
  f.poi = mean_of(f.poi_geo, f.poi_func);
  return t;
}

inline FinalEmbeddings forward(const ModelParams& params, const ModelGraphs& graphs,
                               const InteractionSet& train, const ModelDims& dims) {
  return forward_traced(params, graphs, train, dims).finals;
}

}  // namespace ukgc
