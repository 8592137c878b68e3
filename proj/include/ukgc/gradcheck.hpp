#pragma once

// Central finite-difference check of compute_gradients over every parameter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ukgc/backward.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/loss.hpp"
#include "ukgc/model.hpp"
#include "ukgc/propagation.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc {

struct TensorCheck {
  std::string name;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double max_rel_error = 0.0;
  double tolerance = 1e-4;
  bool passed() const { return max_rel_error < tolerance; }
  std::string worst_tensor() const {
    auto it = std::max_element(tensors.begin(), tensors.end(), [](const auto& a, const auto& b) {
      return a.max_rel_error < b.max_rel_error;
    });
    return it == tensors.end() ? std::string() : it->name;
  }
};

// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true gradient
// is ~0 from being judged on truncation noise alone.
inline double gradient_rel_error(double analytic, double numeric, double floor = 1e-4) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheckInput {
  std::vector<BprTriple> batch;
  ModelParams params;
  ModelGraphs graphs;
  InteractionSet train;
  ModelDims dims;
  HyperParams hp;
};

// `tamper` may modify the analytic gradients before comparison (fault injection).
inline GradCheckReport gradient_check(
    const GradCheckInput& in, double step = 1e-4, double tolerance = 1e-4,
    const std::function<void(Gradients&)>& tamper = {}) {
  LossAndGradients lg =
      compute_gradients(in.batch, in.params, in.graphs, in.train, in.dims, in.hp);
  if (tamper) tamper(lg.grads);
  ModelParams probe = in.params;
  auto loss_at = [&]() {
    const FinalEmbeddings f = forward(probe, in.graphs, in.train, in.dims);
    return total_loss(in.batch, probe, f, in.hp).total;
  };
  GradCheckReport report;
  report.tolerance = tolerance;
  for_each_tensor_pair(probe, lg.grads,
                       [&](std::string_view name, Matrix& x, const Matrix& g) {
                         TensorCheck tc;
                         tc.name = std::string(name);
                         for (std::size_t r = 0; r < x.rows(); ++r) {
                           for (std::size_t c = 0; c < x.cols(); ++c) {
                             const double saved = x(r, c);
                             x(r, c) = saved + step;
                             const double up = loss_at();
                             x(r, c) = saved - step;
                             const double down = loss_at();
                             x(r, c) = saved;
                             const double numeric = (up - down) / (2.0 * step);
                             const double err = gradient_rel_error(g(r, c), numeric);
                             if (err >= tc.max_rel_error) {
                               tc = {tc.name, r, c, g(r, c), numeric, err};
                             }
                           }
                         }
                         report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
                         report.tensors.push_back(tc);
                       });
  return report;
}

// The canonical small instance: d=4, 3 users, 3 POIs, 2 geographical and 2
// functional entities, 2 intents per chunk, 2 layers, λ1 = λ2 = 0.1, α = 1.
inline UrbanKG tiny_kg() {
  using EC = EntityClass;
  std::vector<Triplet> t = {
      {{EC::Poi, 0}, Relation::LocateAt, {EC::Region, 0}},
      {{EC::Poi, 1}, Relation::LocateAt, {EC::Region, 0}},
      {{EC::Poi, 2}, Relation::BelongTo, {EC::BusinessArea, 0}},
      {{EC::BusinessArea, 0}, Relation::BaServe, {EC::Region, 0}},
      {{EC::Poi, 0}, Relation::BrandOf, {EC::Brand, 0}},
      {{EC::Poi, 2}, Relation::BrandOf, {EC::Brand, 0}},
      {{EC::Poi, 1}, Relation::Cate1Of, {EC::Cate1, 0}},
      {{EC::Brand, 0}, Relation::Brand2Cate1, {EC::Cate1, 0}},
  };
  Populations pop{};
  pop[static_cast<std::size_t>(EC::Poi)] = 3;
  pop[static_cast<std::size_t>(EC::BusinessArea)] = 1;
  pop[static_cast<std::size_t>(EC::Region)] = 1;
  pop[static_cast<std::size_t>(EC::Brand)] = 1;
  pop[static_cast<std::size_t>(EC::Cate1)] = 1;
  return UrbanKG(std::move(t), pop);
}

inline GradCheckInput tiny_gradcheck_input(std::uint64_t seed = 7) {
  GradCheckInput in;
  const UrbanKG kg = tiny_kg();
  in.graphs = disentangled_graphs(kg);
  const std::vector<Interaction> pairs = {{0, 0}, {0, 1}, {1, 2}, {2, 0}, {2, 2}};
  in.train = InteractionSet(3, 3, pairs);
  auto [geo, func] = split_subgraphs(kg);
  in.dims = dims_for(geo, func, 3, 4, 2, 2);
  in.params = init_params(in.dims, seed);
  // Larger than Xavier scale so every path carries a non-trivial signal.
  Rng rng(derive_seed(seed, 99));
  for_each_tensor(in.params, [&](std::string_view, Matrix& m) {
    for (double& v : m.flat()) v = rng.uniform(-1.0, 1.0);
  });
  in.batch = {{0, 0, 2}, {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {2, 2, 1}};
  in.hp.lambda_ind = 0.1;
  in.hp.lambda_reg = 0.1;
  in.hp.alpha = 1.0;
  return in;
}

}  // namespace ukgc
