#pragma once

// Straightforward reference implementations used to cross-check the library.
// They share no code paths with it beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "ukgc/interactions.hpp"
#include "ukgc/model.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc::oracle {

using Rows = std::vector<std::vector<double>>;

struct ChannelLayers {
  std::vector<Rows> nodes;  // per layer, [POIs | entities]
  std::vector<Rows> users;  // per layer
};

inline Rows to_rows(const Matrix& m, std::size_t begin, std::size_t count) {
  Rows out(count, std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(begin + r, c);
  }
  return out;
}

// Each layer rescans the triplet list for every node; users loop over
// intents and positives explicitly.
inline ChannelLayers propagate(const ChannelParams& ch, const SubGraph& sub,
                               const InteractionSet& train, std::size_t n_layers) {
  const std::size_t n_users = train.n_users();
  const std::size_t n_nodes = sub.node_count();
  const std::size_t d = ch.embeddings.cols();
  const std::size_t n_int = ch.intent_scores.rows();
  const std::size_t n_rel = ch.intent_scores.cols();

  Rows intents(n_int, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n_int; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < n_rel; ++j) z += std::exp(ch.intent_scores(i, j));
    for (std::size_t j = 0; j < n_rel; ++j) {
      const double a = std::exp(ch.intent_scores(i, j)) / z;
      for (std::size_t c = 0; c < d; ++c) intents[i][c] += a * ch.relations(j, c);
    }
  }

  ChannelLayers out;
  out.users.push_back(to_rows(ch.embeddings, 0, n_users));
  out.nodes.push_back(to_rows(ch.embeddings, n_users, n_nodes));

  Rows beta(n_users, std::vector<double>(n_int));
  for (std::size_t u = 0; u < n_users; ++u) {
    double z = 0.0;
    for (std::size_t j = 0; j < n_int; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += intents[j][c] * out.users[0][u][c];
      beta[u][j] = std::exp(s);
      z += beta[u][j];
    }
    for (double& b : beta[u]) b /= z;
  }

  for (std::size_t l = 0; l < n_layers; ++l) {
    const Rows& prev = out.nodes.back();
    Rows next = prev;
    for (std::size_t v = 0; v < n_nodes; ++v) {
      std::vector<double> acc(d, 0.0);
      std::size_t count = 0;
      for (const Triplet& t : sub.triplets) {
        const std::size_t h = sub.node_of(t.head), tl = sub.node_of(t.tail);
        const std::size_t r = sub.relation_index(t.relation);
        for (int side = 0; side < 2; ++side) {
          const std::size_t self = side == 0 ? h : tl;
          const std::size_t other = side == 0 ? tl : h;
          if (self != v) continue;
          ++count;
          for (std::size_t c = 0; c < d; ++c) acc[c] += ch.relations(r, c) * prev[other][c];
        }
      }
      if (count == 0) continue;
      for (std::size_t c = 0; c < d; ++c) next[v][c] += acc[c] / static_cast<double>(count);
    }

    const Rows& uprev = out.users.back();
    Rows unext = uprev;
    for (std::size_t u = 0; u < n_users; ++u) {
      const auto items = train.positives(static_cast<UserId>(u));
      if (items.empty()) continue;
      const double norm = 1.0 / (static_cast<double>(items.size()) * static_cast<double>(n_int));
      for (std::size_t j = 0; j < n_int; ++j) {
        for (PoiId p : items) {
          for (std::size_t c = 0; c < d; ++c) {
            unext[u][c] += norm * beta[u][j] * intents[j][c] * prev[p][c];
          }
        }
      }
    }
    out.nodes.push_back(std::move(next));
    out.users.push_back(std::move(unext));
  }
  return out;
}

inline double max_abs_diff(const Matrix& m, const Rows& rows) {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      worst = std::max(worst, std::abs(m(r, c) - rows[r][c]));
    }
  }
  return worst;
}

// A random valid KG whose POI + entity count stays within `max_nodes`, and
// random train check-ins over its POIs.
struct RandomInstance {
  UrbanKG kg;
  InteractionSet train;
};

inline RandomInstance random_instance(std::uint64_t seed, std::size_t max_nodes = 20) {
  std::mt19937_64 gen(seed);
  Populations pop{};
  std::size_t total = max_nodes + 1;
  while (total > max_nodes) {
    total = 0;
    for (auto& n : pop) {
      n = 1 + gen() % 3;
      total += n;
    }
  }
  std::set<Triplet> set;
  const std::size_t attempts = 5 + gen() % 30;
  for (std::size_t i = 0; i < attempts; ++i) {
    const std::size_t r = gen() % kRelationCount;
    const auto& rel = kRelationTable[r];
    set.insert({{rel.head, static_cast<std::uint32_t>(gen() % pop[static_cast<std::size_t>(rel.head)])},
                static_cast<Relation>(r),
                {rel.tail, static_cast<std::uint32_t>(gen() % pop[static_cast<std::size_t>(rel.tail)])}});
  }
  RandomInstance inst{UrbanKG({set.begin(), set.end()}, pop), {}};
  const std::size_t n_users = 1 + gen() % 4;
  const std::size_t n_pois = pop[0];
  std::vector<Interaction> pairs;
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t p = 0; p < n_pois; ++p) {
      if (gen() % 2) pairs.emplace_back(static_cast<UserId>(u), static_cast<PoiId>(p));
    }
  }
  inst.train = InteractionSet(n_users, n_pois, pairs);
  return inst;
}

inline ChannelParams random_channel(const SubGraph& sub, std::size_t n_users, std::size_t dim,
                                    std::size_t n_intents, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ChannelParams ch{Matrix(n_users + sub.node_count(), dim), Matrix(sub.n_relations, dim),
                   Matrix(n_intents, sub.n_relations)};
  for (Matrix* m : {&ch.embeddings, &ch.relations, &ch.intent_scores}) {
    for (double& v : m->flat()) v = u(gen);
  }
  return ch;
}

}  // namespace ukgc::oracle
