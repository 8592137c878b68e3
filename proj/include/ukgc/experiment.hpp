#pragma once

// Training variants and the ablation comparison shared by the CLI and tests.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ukgc/eval.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/loss.hpp"
#include "ukgc/model.hpp"
#include "ukgc/propagation.hpp"
#include "ukgc/synthgen.hpp"
#include "ukgc/trainer.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc {

enum class Variant : std::uint8_t {
  Full,           // disentangled graphs, TIE scoring
  TeOnly,         // disentangled graphs, TE scoring
  NoDisentangle,  // both chunks propagate over the whole KG, TIE scoring
};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::TeOnly: return "te_only";
    case Variant::NoDisentangle: return "no_disentangle";
  }
  return "?";
}

inline Scorer scorer_for(Variant v) { return v == Variant::TeOnly ? Scorer::Te : Scorer::Tie; }

struct ModelShape {
  std::size_t dim = 32;
  std::size_t n_intents = 4;
  std::size_t n_layers = 3;
};

// Graphs plus the dims they imply; the two chunks' triplet counts are kept for
// bookkeeping.
struct VariantSetup {
  ModelGraphs graphs;
  ModelDims dims;
  std::size_t geo_triplets = 0;
  std::size_t func_triplets = 0;
};

inline VariantSetup setup_variant(const UrbanKG& kg, std::size_t n_users, Variant v,
                                  const ModelShape& shape) {
  const bool blended = v == Variant::NoDisentangle;
  const auto [geo, func] = blended
                               ? std::pair{make_subgraph(kg, GraphView::Full),
                                           make_subgraph(kg, GraphView::Full)}
                               : split_subgraphs(kg);
  VariantSetup s;
  s.graphs = {build_adjacency(geo), build_adjacency(func)};
  s.dims = dims_for(geo, func, n_users, shape.dim, shape.n_intents, shape.n_layers);
  s.geo_triplets = geo.triplets.size();
  s.func_triplets = func.triplets.size();
  return s;
}

struct VariantRun {
  Variant variant = Variant::Full;
  VariantSetup setup;
  FitResult fit;
  MetricsReport test;
  double functional_ndcg20 = 0.0;  // only when ground truth is supplied
};

inline VariantRun run_variant(const UrbanKG& kg, const DatasetSplit& split, Variant v,
                              const ModelShape& shape, const HyperParams& hp, std::uint64_t seed,
                              const GroundTruth* truth = nullptr,
                              const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  VariantRun run;
  run.variant = v;
  run.setup = setup_variant(kg, split.all.n_users(), v, shape);
  FitOptions opts;
  opts.val_scorer = scorer_for(v);
  opts.on_epoch = on_epoch;
  run.fit = fit(split, run.setup.graphs, run.setup.dims, hp, seed, opts);
  const FinalEmbeddings finals = forward(run.fit.params, run.setup.graphs, split.train, run.setup.dims);
  EvalOptions eo;
  eo.target = EvalTarget::Test;
  eo.seed = seed;
  run.test = evaluate(finals, split, scorer_for(v), eo);
  if (truth) {
    const auto lists = ranked_lists(finals, split, scorer_for(v), EvalTarget::Test);
    run.functional_ndcg20 = functional_ndcg(lists, *truth, 20);
  }
  return run;
}

}  // namespace ukgc
