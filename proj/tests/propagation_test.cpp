#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "ukgc/propagation.hpp"

namespace ukgc {
namespace {

TEST(PropagatePoiLayer, IsolatedNodePassesThrough) {
  const UrbanKG kg = parse_triplets("#counts POI=2 Region=1\nPOI:0\tLocateAt\tRegion:0\n");
  const SubGraph geo = make_subgraph(kg, GraphView::Geographical);
  std::mt19937_64 gen(1);
  const ChannelParams ch = oracle::random_channel(geo, 0, 3, 1, gen);
  const Matrix next = propagate_poi_layer(ch.embeddings, build_adjacency(geo), ch.relations);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(next(1, c), ch.embeddings(1, c));
}

TEST(PropagatePoiLayer, IdentityRelationAddsNeighbor) {
  const UrbanKG kg = parse_triplets("POI:0\tLocateAt\tRegion:0\n");
  const SubGraph geo = make_subgraph(kg, GraphView::Geographical);
  std::mt19937_64 gen(2);
  ChannelParams ch = oracle::random_channel(geo, 0, 3, 1, gen);
  ch.relations.fill(1.0);
  const std::size_t region = geo.node_of({EntityClass::Region, 0});
  const Matrix next = propagate_poi_layer(ch.embeddings, build_adjacency(geo), ch.relations);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(next(0, c), ch.embeddings(0, c) + ch.embeddings(region, c));
  }
}

TEST(PropagateUserLayer, NoPositivesUnchanged) {
  const InteractionSet train(2, 1, std::vector<Interaction>{{1, 0}});
  Matrix users(2, 2), nodes(1, 2);
  users(0, 0) = 0.7;
  nodes.fill(3.0);
  IntentSet intents{Matrix(1, 1), Matrix(1, 2)};
  intents.intents.fill(1.0);
  Matrix beta(2, 1);
  beta.fill(1.0);
  const Matrix next = propagate_user_layer(users, nodes, train, intents, beta);
  EXPECT_EQ(next(0, 0), 0.7);
  EXPECT_EQ(next(0, 1), 0.0);
  EXPECT_EQ(next(1, 0), 3.0);
}

TEST(PropagateUserLayer, SingleIntentSinglePositiveCollapses) {
  const InteractionSet train(1, 2, std::vector<Interaction>{{0, 1}});
  Matrix users(1, 3), nodes(2, 3);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n;
  for (double& v : users.flat()) v = n(gen);
  for (double& v : nodes.flat()) v = n(gen);
  IntentSet intents{Matrix(1, 1), Matrix(1, 3)};
  intents.intents.fill(1.0);
  Matrix beta(1, 1);
  beta.fill(1.0);
  const Matrix next = propagate_user_layer(users, nodes, train, intents, beta);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(next(0, c), users(0, c) + nodes(1, c));
}

TEST(TraceChannel, MatchesTripletLoopOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::random_instance(seed);
    std::mt19937_64 gen(seed + 1000);
    for (const SubGraph& sub : {make_subgraph(inst.kg, GraphView::Geographical),
                                make_subgraph(inst.kg, GraphView::Functional),
                                make_subgraph(inst.kg, GraphView::Full)}) {
      const ChannelParams ch = oracle::random_channel(sub, inst.train.n_users(), 4, 3, gen);
      const ChannelTrace got = trace_channel(ch, build_adjacency(sub), inst.train, 3);
      const auto want = oracle::propagate(ch, sub, inst.train, 3);
      for (std::size_t l = 0; l <= 3; ++l) {
        EXPECT_LT(oracle::max_abs_diff(got.node_layers[l], want.nodes[l]), 1e-12)
            << "seed " << seed << " layer " << l;
        EXPECT_LT(oracle::max_abs_diff(got.user_layers[l], want.users[l]), 1e-12)
            << "seed " << seed << " layer " << l;
      }
    }
  }
}

struct Fixture {
  UrbanKG kg;
  InteractionSet train;
  ModelGraphs graphs;
  ModelDims dims;
  ModelParams params;
};

Fixture fixture(std::size_t layers, std::uint64_t seed = 5) {
  auto inst = oracle::random_instance(seed);
  Fixture f{inst.kg, inst.train, disentangled_graphs(inst.kg), {}, {}};
  const auto [geo, func] = split_subgraphs(f.kg);
  f.dims = dims_for(geo, func, f.train.n_users(), 4, 2, layers);
  f.params = init_params(f.dims, seed);
  return f;
}

TEST(Forward, ZeroLayersReturnsRawChunks) {
  const Fixture f = fixture(0);
  const FinalEmbeddings out = forward(f.params, f.graphs, f.train, f.dims);
  const std::size_t n = f.dims.n_users;
  EXPECT_EQ(out.user_geo, slice_rows(f.params.geo.embeddings, 0, n));
  EXPECT_EQ(out.poi_func, slice_rows(f.params.func.embeddings, n, f.dims.n_pois));
  EXPECT_EQ(out.user, mean_of(out.user_geo, out.user_func));
}

TEST(Forward, ZeroRelationsFreezePois) {
  Fixture f = fixture(3);
  f.params.geo.relations.fill(0.0);
  f.params.func.relations.fill(0.0);
  const FinalEmbeddings out = forward(f.params, f.graphs, f.train, f.dims);
  const std::size_t n = f.dims.n_users;
  EXPECT_EQ(out.poi_geo, slice_rows(f.params.geo.embeddings, n, f.dims.n_pois));
  EXPECT_EQ(out.poi_func, slice_rows(f.params.func.embeddings, n, f.dims.n_pois));
  // Intents are convex combinations of zero relations, so users freeze too.
  EXPECT_EQ(out.user_geo, slice_rows(f.params.geo.embeddings, 0, n));
}

TEST(Forward, FusionIsExactMean) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Fixture f = fixture(2, seed);
    const FinalEmbeddings out = forward(f.params, f.graphs, f.train, f.dims);
    for (std::size_t i = 0; i < out.user.flat().size(); ++i) {
      EXPECT_EQ(out.user.flat()[i], 0.5 * (out.user_geo.flat()[i] + out.user_func.flat()[i]));
    }
    for (std::size_t i = 0; i < out.poi.flat().size(); ++i) {
      EXPECT_EQ(out.poi.flat()[i], 0.5 * (out.poi_geo.flat()[i] + out.poi_func.flat()[i]));
    }
  }
}

TEST(Forward, LocalityOnPathGraph) {
  // POI:0 - Region:0 - Region:1 - Region:2 - Region:3 ; Region:3 is 4 hops from POI:0.
  const UrbanKG kg = parse_triplets(
      "POI:0\tLocateAt\tRegion:0\nRegion:0\tBorderBy\tRegion:1\n"
      "Region:1\tBorderBy\tRegion:2\nRegion:2\tBorderBy\tRegion:3\n");
  const SubGraph geo = make_subgraph(kg, GraphView::Geographical);
  const AdjacencyIndex adj = build_adjacency(geo);
  const InteractionSet train(1, 1, std::vector<Interaction>{{0, 0}});
  std::mt19937_64 gen(8);
  ChannelParams ch = oracle::random_channel(geo, 1, 3, 2, gen);
  const std::size_t far = 1 + geo.node_of({EntityClass::Region, 3});
  const std::size_t near = 1 + geo.node_of({EntityClass::Region, 2});
  const Matrix base = trace_channel(ch, adj, train, 3).node_layers.back();
  ch.embeddings(far, 0) += 10.0;
  EXPECT_EQ(trace_channel(ch, adj, train, 3).node_layers.back()(0, 0), base(0, 0));
  ch.embeddings(near, 0) += 10.0;
  EXPECT_NE(trace_channel(ch, adj, train, 3).node_layers.back()(0, 0), base(0, 0));
}

TEST(Forward, DimsMismatch) {
  Fixture f = fixture(1);
  f.params.geo.embeddings = Matrix(1, f.dims.dim);
  EXPECT_THROW(forward(f.params, f.graphs, f.train, f.dims), Error);
}

}  // namespace
}  // namespace ukgc
