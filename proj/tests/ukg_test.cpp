#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "ukgc/ukg.hpp"

namespace ukgc {
namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_triplets(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error for:\n" << text;
  return ErrorCode::Io;
}

TEST(RelationTable, SixteenRelationsSplitFiveEleven) {
  std::size_t geo = 0;
  for (const auto& r : kRelationTable) geo += r.kind == RelationKind::Geographical;
  EXPECT_EQ(kRelationTable.size(), 16u);
  EXPECT_EQ(geo, 5u);
  for (auto name : {"BaServe", "BelongTo", "BorderBy", "LocateAt", "NearBy"}) {
    auto r = relation_from_string(name);
    ASSERT_TRUE(r) << name;
    EXPECT_EQ(info(*r).kind, RelationKind::Geographical) << name;
  }
  const auto& brand_of = info(Relation::BrandOf);
  EXPECT_EQ(brand_of.head, EntityClass::Poi);
  EXPECT_EQ(brand_of.tail, EntityClass::Brand);
}

TEST(ParseTriplets, MinimalGraph) {
  const UrbanKG kg = parse_triplets("POI:0\tBrandOf\tBrand:0\n");
  EXPECT_EQ(kg.triplets().size(), 1u);
  EXPECT_EQ(kg.populations()[static_cast<std::size_t>(EntityClass::Poi)], 1u);
  EXPECT_EQ(kg.populations()[static_cast<std::size_t>(EntityClass::Brand)], 1u);
  EXPECT_EQ(kg.populations()[static_cast<std::size_t>(EntityClass::Region)], 0u);
}

TEST(ParseTriplets, OneLegalTripletPerRelation) {
  std::string text = "# one row per relation\n";
  for (const auto& r : kRelationTable) {
    text += std::string(to_string(r.head)) + ":0\t" + std::string(r.name) + "\t" +
            std::string(to_string(r.tail)) + (r.head == r.tail ? ":1" : ":0") + "\n";
  }
  const UrbanKG kg = parse_triplets(text);
  EXPECT_EQ(kg.triplets().size(), 16u);
}

TEST(ParseTriplets, Errors) {
  EXPECT_EQ(parse_error("POI:0\tBrandOf\tRegion:0\n"), ErrorCode::ClassMismatch);
  EXPECT_EQ(parse_error("POI:0\tOwnedBy\tBrand:0\n"), ErrorCode::UnknownRelation);
  EXPECT_EQ(parse_error("POI:0 BrandOf Brand:0\n"), ErrorCode::MalformedLine);
  EXPECT_EQ(parse_error("POI:x\tBrandOf\tBrand:0\n"), ErrorCode::MalformedLine);
  EXPECT_EQ(parse_error("Shop:0\tBrandOf\tBrand:0\n"), ErrorCode::MalformedLine);
  EXPECT_EQ(parse_error("POI:0\tBrandOf\tBrand:0\nPOI:0\tBrandOf\tBrand:0\n"),
            ErrorCode::DuplicateTriplet);
  EXPECT_EQ(parse_error("#counts POI=1 Brand=1\nPOI:3\tBrandOf\tBrand:0\n"),
            ErrorCode::CountMismatch);
}

TEST(ParseTriplets, ErrorCarriesLineNumber) {
  try {
    parse_triplets("POI:0\tBrandOf\tBrand:0\n\n# note\nPOI:1\tBrandOf\tRegion:0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClassMismatch);
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseTriplets, CountsHeaderWidensPopulations) {
  const UrbanKG kg = parse_triplets("#counts POI=5 Region=3\nPOI:0\tLocateAt\tRegion:0\n");
  EXPECT_EQ(kg.n_pois(), 5u);
  EXPECT_EQ(kg.populations()[static_cast<std::size_t>(EntityClass::Region)], 3u);
}

// Random valid KG over a handful of entities per class.
UrbanKG random_kg(std::uint64_t seed, std::size_t attempts) {
  std::mt19937_64 gen(seed);
  Populations pop{};
  for (auto& n : pop) n = 1 + gen() % 4;
  std::set<Triplet> set;
  for (std::size_t i = 0; i < attempts; ++i) {
    const auto& r = kRelationTable[gen() % kRelationCount];
    const Triplet t{{r.head, static_cast<std::uint32_t>(gen() % pop[static_cast<std::size_t>(r.head)])},
                    static_cast<Relation>(&r - kRelationTable.data()),
                    {r.tail, static_cast<std::uint32_t>(gen() % pop[static_cast<std::size_t>(r.tail)])}};
    set.insert(t);
  }
  return UrbanKG({set.begin(), set.end()}, pop);
}

TEST(Serialize, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const UrbanKG kg = random_kg(seed, 40);
    EXPECT_EQ(parse_triplets(serialize_triplets(kg)), kg) << "seed " << seed;
  }
}

TEST(SplitSubgraphs, OneKindGraph) {
  const auto [geo, func] = split_subgraphs(parse_triplets("POI:0\tLocateAt\tRegion:0\nPOI:1\tLocateAt\tRegion:0\n"));
  EXPECT_EQ(geo.triplets.size(), 2u);
  EXPECT_TRUE(func.triplets.empty());
}

TEST(SplitSubgraphs, OneOfEach) {
  const auto [geo, func] =
      split_subgraphs(parse_triplets("POI:0\tBrandOf\tBrand:0\nPOI:0\tLocateAt\tRegion:0\n"));
  EXPECT_EQ(geo.triplets.size(), 1u);
  EXPECT_EQ(func.triplets.size(), 1u);
  EXPECT_EQ(geo.n_relations, 5u);
  EXPECT_EQ(func.n_relations, 11u);
  EXPECT_EQ(geo.node_of({EntityClass::Poi, 0}), func.node_of({EntityClass::Poi, 0}));
}

TEST(SplitSubgraphs, PartitionProperty) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const UrbanKG kg = random_kg(seed, 60);
    const auto [geo, func] = split_subgraphs(kg);
    EXPECT_EQ(geo.triplets.size() + func.triplets.size(), kg.triplets().size());
    for (const auto& t : geo.triplets) EXPECT_EQ(info(t.relation).kind, RelationKind::Geographical);
    for (const auto& t : func.triplets) EXPECT_EQ(info(t.relation).kind, RelationKind::Functional);
    EXPECT_EQ(geo.n_pois, kg.n_pois());
    EXPECT_EQ(func.n_pois, kg.n_pois());
  }
}

TEST(BuildAdjacency, SingleTriplet) {
  const auto [geo, func] = split_subgraphs(parse_triplets("POI:0\tLocateAt\tRegion:0\n"));
  const AdjacencyIndex adj = build_adjacency(geo);
  const std::size_t region = geo.node_of({EntityClass::Region, 0});
  ASSERT_EQ(adj.neighbors(0).size(), 1u);
  EXPECT_EQ(adj.neighbors(0)[0].direction, EdgeDirection::Forward);
  EXPECT_EQ(adj.neighbors(0)[0].neighbor, region);
  ASSERT_EQ(adj.neighbors(region).size(), 1u);
  EXPECT_EQ(adj.neighbors(region)[0].direction, EdgeDirection::Inverse);
  EXPECT_EQ(adj.neighbors(region)[0].neighbor, 0u);
}

TEST(BuildAdjacency, StarGraph) {
  std::string text;
  for (int p = 0; p < 10; ++p) text += "POI:" + std::to_string(p) + "\tLocateAt\tRegion:0\n";
  const auto geo = split_subgraphs(parse_triplets(text)).first;
  const AdjacencyIndex adj = build_adjacency(geo);
  const auto hub = adj.neighbors(geo.node_of({EntityClass::Region, 0}));
  ASSERT_EQ(hub.size(), 10u);
  for (const auto& e : hub) EXPECT_EQ(e.direction, EdgeDirection::Inverse);
}

TEST(BuildAdjacency, DegreeSumAndOrdering) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const UrbanKG kg = random_kg(seed, 80);
    for (const SubGraph& sub : {make_subgraph(kg, GraphView::Geographical),
                                make_subgraph(kg, GraphView::Functional),
                                make_subgraph(kg, GraphView::Full)}) {
      const AdjacencyIndex adj = build_adjacency(sub);
      std::size_t sum = 0;
      std::size_t forward = 0;
      for (std::size_t v = 0; v < adj.node_count(); ++v) {
        const auto list = adj.neighbors(v);
        sum += list.size();
        for (std::size_t i = 0; i < list.size(); ++i) {
          forward += list[i].direction == EdgeDirection::Forward;
          if (i > 0) EXPECT_LE(list[i - 1], list[i]);
        }
      }
      EXPECT_EQ(sum, 2 * sub.triplets.size());
      EXPECT_EQ(forward, sub.triplets.size());
    }
  }
}

}  // namespace
}  // namespace ukgc
