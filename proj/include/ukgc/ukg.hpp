#pragma once

// Urban knowledge graph: typed triplet store, the geographical/functional
// split, and adjacency indices used by propagation.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ukgc/error.hpp"

namespace ukgc {

enum class EntityClass : std::uint8_t {
  Poi,
  BusinessArea,
  Region,
  Brand,
  Cate1,
  Cate2,
  Cate3,
};

inline constexpr std::size_t kEntityClassCount = 7;

inline constexpr std::array<std::string_view, kEntityClassCount> kEntityClassNames = {
    "POI", "BusinessArea", "Region", "Brand", "Cate1", "Cate2", "Cate3"};

inline std::string_view to_string(EntityClass c) {
  return kEntityClassNames[static_cast<std::size_t>(c)];
}

inline std::optional<EntityClass> entity_class_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kEntityClassCount; ++i) {
    if (kEntityClassNames[i] == name) return static_cast<EntityClass>(i);
  }
  return std::nullopt;
}

enum class RelationKind : std::uint8_t { Geographical, Functional };

enum class Relation : std::uint8_t {
  BaServe,
  BelongTo,
  BorderBy,
  LocateAt,
  NearBy,
  Brand2Cate1,
  Brand2Cate2,
  Brand2Cate3,
  BrandOf,
  Cate1Of,
  Cate2Of,
  Cate3Of,
  RelatedBrand,
  SubCate2to1,
  SubCate3to1,
  SubCate3to2,
};

inline constexpr std::size_t kRelationCount = 16;

struct RelationInfo {
  std::string_view name;
  RelationKind kind;
  EntityClass head;
  EntityClass tail;
};

inline constexpr std::array<RelationInfo, kRelationCount> kRelationTable = {{
    {"BaServe", RelationKind::Geographical, EntityClass::BusinessArea, EntityClass::Region},
    {"BelongTo", RelationKind::Geographical, EntityClass::Poi, EntityClass::BusinessArea},
    {"BorderBy", RelationKind::Geographical, EntityClass::Region, EntityClass::Region},
    {"LocateAt", RelationKind::Geographical, EntityClass::Poi, EntityClass::Region},
    {"NearBy", RelationKind::Geographical, EntityClass::Region, EntityClass::Region},
    {"Brand2Cate1", RelationKind::Functional, EntityClass::Brand, EntityClass::Cate1},
    {"Brand2Cate2", RelationKind::Functional, EntityClass::Brand, EntityClass::Cate2},
    {"Brand2Cate3", RelationKind::Functional, EntityClass::Brand, EntityClass::Cate3},
    {"BrandOf", RelationKind::Functional, EntityClass::Poi, EntityClass::Brand},
    {"Cate1Of", RelationKind::Functional, EntityClass::Poi, EntityClass::Cate1},
    {"Cate2Of", RelationKind::Functional, EntityClass::Poi, EntityClass::Cate2},
    {"Cate3Of", RelationKind::Functional, EntityClass::Poi, EntityClass::Cate3},
    {"RelatedBrand", RelationKind::Functional, EntityClass::Brand, EntityClass::Brand},
    {"SubCate_2to1", RelationKind::Functional, EntityClass::Cate2, EntityClass::Cate1},
    {"SubCate_3to1", RelationKind::Functional, EntityClass::Cate3, EntityClass::Cate1},
    {"SubCate_3to2", RelationKind::Functional, EntityClass::Cate3, EntityClass::Cate2},
}};

inline const RelationInfo& info(Relation r) {
  return kRelationTable[static_cast<std::size_t>(r)];
}

inline std::optional<Relation> relation_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kRelationCount; ++i) {
    if (kRelationTable[i].name == name) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

inline constexpr RelationKind kind_of(EntityClass c) {
  return (c == EntityClass::BusinessArea || c == EntityClass::Region)
             ? RelationKind::Geographical
             : RelationKind::Functional;
}

struct EntityRef {
  EntityClass cls = EntityClass::Poi;
  std::uint32_t index = 0;

  friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

struct Triplet {
  EntityRef head;
  Relation relation = Relation::BaServe;
  EntityRef tail;

  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

using Populations = std::array<std::size_t, kEntityClassCount>;

class UrbanKG {
 public:
  UrbanKG() = default;

  // Validates class discipline, id ranges and uniqueness.
  UrbanKG(std::vector<Triplet> triplets, Populations populations)
      : triplets_(std::move(triplets)), populations_(populations) {
    validate();
  }

  const std::vector<Triplet>& triplets() const noexcept { return triplets_; }
  const Populations& populations() const noexcept { return populations_; }
  std::size_t population(EntityClass c) const {
    return populations_[static_cast<std::size_t>(c)];
  }
  std::size_t n_pois() const { return population(EntityClass::Poi); }

  // Set equality of triplets plus equal populations.
  friend bool operator==(const UrbanKG& a, const UrbanKG& b) {
    if (a.populations_ != b.populations_) return false;
    auto x = a.triplets_;
    auto y = b.triplets_;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  }

  void validate() const {
    std::set<Triplet> seen;
    for (std::size_t i = 0; i < triplets_.size(); ++i) {
      const Triplet& t = triplets_[i];
      const RelationInfo& ri = info(t.relation);
      if (t.head.cls != ri.head || t.tail.cls != ri.tail) {
        throw Error(ErrorCode::ClassMismatch,
                    "triplet " + std::to_string(i + 1) + ": " + std::string(ri.name) +
                        " expects (" + std::string(to_string(ri.head)) + ", " +
                        std::string(to_string(ri.tail)) + ")",
                    i + 1);
      }
      for (const EntityRef& e : {t.head, t.tail}) {
        if (e.index >= population(e.cls)) {
          throw Error(ErrorCode::CountMismatch,
                      "triplet " + std::to_string(i + 1) + ": " +
                          std::string(to_string(e.cls)) + ":" + std::to_string(e.index) +
                          " outside population " + std::to_string(population(e.cls)),
                      i + 1);
        }
      }
      if (!seen.insert(t).second) {
        throw Error(ErrorCode::DuplicateTriplet,
                    "duplicate triplet at " + std::to_string(i + 1), i + 1);
      }
    }
  }

 private:
  std::vector<Triplet> triplets_;
  Populations populations_{};
};

namespace detail {

inline std::string_view trim_line(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    fn(trim_line(line), line_no);
  }
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class Int>
std::optional<Int> parse_uint(std::string_view s) {
  Int value{};
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Parses "#counts key=n key=n ..." into (key, n) pairs; nullopt if the line
// is an ordinary comment.
inline std::optional<std::vector<std::pair<std::string_view, std::size_t>>> parse_counts_header(
    std::string_view line, std::size_t line_no) {
  constexpr std::string_view kTag = "#counts";
  if (line.substr(0, kTag.size()) != kTag) return std::nullopt;
  std::vector<std::pair<std::string_view, std::size_t>> out;
  for (std::string_view tok : split(line.substr(kTag.size()), ' ')) {
    if (tok.empty()) continue;
    const std::size_t eq = tok.find('=');
    auto value = eq == std::string_view::npos ? std::nullopt
                                              : parse_uint<std::size_t>(tok.substr(eq + 1));
    if (!value) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": bad #counts entry '" +
                      std::string(tok) + "'",
                  line_no);
    }
    out.emplace_back(tok.substr(0, eq), *value);
  }
  return out;
}

}  // namespace detail

// Parses the class-qualified triplet TSV:
//   POI:0<TAB>BrandOf<TAB>Brand:0
// Blank lines and '#' comments are skipped. An optional
//   #counts POI=<n> Region=<n> ...
// header fixes class populations (so isolated entities survive a round trip);
// ids beyond a declared count are rejected. Without it populations are max id + 1.
inline UrbanKG parse_triplets(std::string_view text) {
  std::vector<Triplet> triplets;
  std::vector<std::size_t> line_of;
  Populations inferred{};
  std::optional<Populations> declared;

  auto parse_entity = [](std::string_view tok, std::size_t line_no) {
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": expected class:id, got '" +
                      std::string(tok) + "'",
                  line_no);
    }
    auto cls = entity_class_from_string(tok.substr(0, colon));
    auto id = detail::parse_uint<std::uint32_t>(tok.substr(colon + 1));
    if (!cls || !id) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": bad entity '" + std::string(tok) + "'",
                  line_no);
    }
    return EntityRef{*cls, *id};
  };

  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    if (line.front() == '#') {
      auto counts = detail::parse_counts_header(line, line_no);
      if (!counts) return;
      Populations p{};
      for (auto [key, value] : *counts) {
        auto cls = entity_class_from_string(key);
        if (!cls) {
          throw Error(ErrorCode::MalformedLine,
                      "line " + std::to_string(line_no) + ": unknown class '" +
                          std::string(key) + "' in #counts",
                      line_no);
        }
        p[static_cast<std::size_t>(*cls)] = value;
      }
      declared = p;
      return;
    }
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": expected 3 tab-separated fields",
                  line_no);
    }
    const EntityRef head = parse_entity(fields[0], line_no);
    const auto relation = relation_from_string(fields[1]);
    if (!relation) {
      throw Error(ErrorCode::UnknownRelation,
                  "line " + std::to_string(line_no) + ": unknown relation '" +
                      std::string(fields[1]) + "'",
                  line_no);
    }
    const EntityRef tail = parse_entity(fields[2], line_no);
    const RelationInfo& ri = info(*relation);
    if (head.cls != ri.head || tail.cls != ri.tail) {
      throw Error(ErrorCode::ClassMismatch,
                  "line " + std::to_string(line_no) + ": " + std::string(ri.name) +
                      " expects (" + std::string(to_string(ri.head)) + ", " +
                      std::string(to_string(ri.tail)) + ")",
                  line_no);
    }
    for (const EntityRef& e : {head, tail}) {
      auto& pop = inferred[static_cast<std::size_t>(e.cls)];
      pop = std::max<std::size_t>(pop, std::size_t{e.index} + 1);
    }
    triplets.push_back({head, *relation, tail});
    line_of.push_back(line_no);
  });

  // Duplicate and range checks are reported against source line numbers.
  std::set<Triplet> seen;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (!seen.insert(triplets[i]).second) {
      throw Error(ErrorCode::DuplicateTriplet,
                  "line " + std::to_string(line_of[i]) + ": duplicate triplet", line_of[i]);
    }
  }
  Populations populations = inferred;
  if (declared) {
    for (std::size_t c = 0; c < kEntityClassCount; ++c) {
      if (inferred[c] > (*declared)[c]) {
        throw Error(ErrorCode::CountMismatch,
                    "#counts declares " + std::to_string((*declared)[c]) + " " +
                        std::string(kEntityClassNames[c]) + " but ids reach " +
                        std::to_string(inferred[c] - 1));
      }
    }
    populations = *declared;
  }
  return UrbanKG(std::move(triplets), populations);
}

inline std::string serialize_triplets(const UrbanKG& kg) {
  std::string out = "#counts";
  for (std::size_t c = 0; c < kEntityClassCount; ++c) {
    out += ' ';
    out += kEntityClassNames[c];
    out += '=';
    out += std::to_string(kg.populations()[c]);
  }
  out += '\n';
  auto entity = [&](const EntityRef& e) {
    out += to_string(e.cls);
    out += ':';
    out += std::to_string(e.index);
  };
  for (const Triplet& t : kg.triplets()) {
    entity(t.head);
    out += '\t';
    out += info(t.relation).name;
    out += '\t';
    entity(t.tail);
    out += '\n';
  }
  return out;
}

// Which relations a propagation graph covers. Full is the unsplit graph used
// by the no-disentangle ablation.
enum class GraphView : std::uint8_t { Geographical, Functional, Full };

inline std::string_view to_string(GraphView v) {
  switch (v) {
    case GraphView::Geographical: return "geographical";
    case GraphView::Functional: return "functional";
    case GraphView::Full: return "full";
  }
  return "?";
}

// A view over the KG with a local node space [POIs | non-POI entities] and a
// local relation numbering. POI node ids equal PoiIds in every view.
struct SubGraph {
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  GraphView view = GraphView::Full;
  std::vector<Triplet> triplets;
  std::size_t n_pois = 0;
  std::size_t n_entities = 0;
  std::array<std::size_t, kEntityClassCount> entity_offset{};
  std::array<std::size_t, kRelationCount> relation_slot{};
  std::size_t n_relations = 0;

  std::size_t node_count() const { return n_pois + n_entities; }

  std::size_t node_of(const EntityRef& e) const {
    if (e.cls == EntityClass::Poi) return e.index;
    return n_pois + entity_offset[static_cast<std::size_t>(e.cls)] + e.index;
  }

  std::size_t relation_index(Relation r) const {
    return relation_slot[static_cast<std::size_t>(r)];
  }
};

inline bool view_contains(GraphView v, RelationKind kind) {
  return v == GraphView::Full ||
         (v == GraphView::Geographical) == (kind == RelationKind::Geographical);
}

inline SubGraph make_subgraph(const UrbanKG& kg, GraphView view) {
  SubGraph sub;
  sub.view = view;
  sub.n_pois = kg.n_pois();
  sub.entity_offset.fill(SubGraph::kAbsent);
  for (std::size_t c = 1; c < kEntityClassCount; ++c) {
    if (!view_contains(view, kind_of(static_cast<EntityClass>(c)))) continue;
    sub.entity_offset[c] = sub.n_entities;
    sub.n_entities += kg.populations()[c];
  }
  sub.relation_slot.fill(SubGraph::kAbsent);
  for (std::size_t r = 0; r < kRelationCount; ++r) {
    if (view_contains(view, kRelationTable[r].kind)) sub.relation_slot[r] = sub.n_relations++;
  }
  for (const Triplet& t : kg.triplets()) {
    if (view_contains(view, info(t.relation).kind)) sub.triplets.push_back(t);
  }
  return sub;
}

inline std::pair<SubGraph, SubGraph> split_subgraphs(const UrbanKG& kg) {
  return {make_subgraph(kg, GraphView::Geographical), make_subgraph(kg, GraphView::Functional)};
}

enum class EdgeDirection : std::uint8_t { Forward, Inverse };

struct AdjacencyEntry {
  std::uint32_t relation = 0;  // local relation index in the subgraph
  std::uint32_t neighbor = 0;  // local node id
  EdgeDirection direction = EdgeDirection::Forward;

  friend auto operator<=>(const AdjacencyEntry&, const AdjacencyEntry&) = default;
};

// CSR neighbor lists over a subgraph's node space. A triplet (h, r, t) stores
// (r, t, Forward) under h and (r, h, Inverse) under t.
class AdjacencyIndex {
 public:
  AdjacencyIndex() = default;
  AdjacencyIndex(std::size_t n_pois, std::size_t n_entities, std::size_t n_relations,
                 std::vector<std::size_t> offsets, std::vector<AdjacencyEntry> entries,
                 std::size_t n_triplets)
      : n_pois_(n_pois),
        n_entities_(n_entities),
        n_relations_(n_relations),
        n_triplets_(n_triplets),
        offsets_(std::move(offsets)),
        entries_(std::move(entries)) {}

  std::size_t n_pois() const noexcept { return n_pois_; }
  std::size_t n_entities() const noexcept { return n_entities_; }
  std::size_t n_relations() const noexcept { return n_relations_; }
  std::size_t n_triplets() const noexcept { return n_triplets_; }
  std::size_t node_count() const noexcept { return n_pois_ + n_entities_; }
  std::size_t total_entries() const noexcept { return entries_.size(); }

  std::span<const AdjacencyEntry> neighbors(std::size_t node) const {
    return {entries_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }

 private:
  std::size_t n_pois_ = 0;
  std::size_t n_entities_ = 0;
  std::size_t n_relations_ = 0;
  std::size_t n_triplets_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<AdjacencyEntry> entries_;
};

inline AdjacencyIndex build_adjacency(const SubGraph& sub) {
  const std::size_t n = sub.node_count();
  std::vector<std::vector<AdjacencyEntry>> lists(n);
  for (const Triplet& t : sub.triplets) {
    const auto rel = static_cast<std::uint32_t>(sub.relation_index(t.relation));
    const auto h = static_cast<std::uint32_t>(sub.node_of(t.head));
    const auto tl = static_cast<std::uint32_t>(sub.node_of(t.tail));
    lists[h].push_back({rel, tl, EdgeDirection::Forward});
    lists[tl].push_back({rel, h, EdgeDirection::Inverse});
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<AdjacencyEntry> entries;
  entries.reserve(2 * sub.triplets.size());
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(lists[v].begin(), lists[v].end());
    entries.insert(entries.end(), lists[v].begin(), lists[v].end());
    offsets[v + 1] = entries.size();
  }
  return AdjacencyIndex(sub.n_pois, sub.n_entities, sub.n_relations, std::move(offsets),
                        std::move(entries), sub.triplets.size());
}

}  // namespace ukgc
