#pragma once

// Synthetic cities with a planted geographical confounder.
//
// Regions sit on a grid; each user has a home region and a latent taste, each
// POI a region and a functional attribute inherited from its brand, which in
// turn inherits from the category hierarchy. Check-ins are drawn without
// replacement with weights
//   σ(functional_scale · taste·attr + γ · (proximity(home, region) - 1) + base_logit)
// where proximity = exp(-manhattan distance). γ is the G→Y edge: at γ = 0
// visits depend only on functional match.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ukgc/error.hpp"
#include "ukgc/eval.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/loss.hpp"
#include "ukgc/matrix.hpp"
#include "ukgc/random.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc {

struct CityConfig {
  std::size_t n_users = 500;
  std::size_t n_pois = 2000;
  std::size_t n_regions = 16;
  std::size_t n_business_areas = 8;
  std::size_t n_brands = 100;
  std::size_t n_cate1 = 5;
  std::size_t n_cate2 = 20;
  std::size_t n_cate3 = 50;
  std::size_t latent_dim = 8;
  double geo_strength = 5.0;  // γ
  double functional_scale = 1.0;
  double base_logit = -2.0;
  std::size_t interactions_per_user = 20;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_users == 0 || n_pois == 0 || n_regions == 0 || n_business_areas == 0 ||
        n_brands == 0 || n_cate1 == 0 || n_cate2 == 0 || n_cate3 == 0 || latent_dim == 0 ||
        interactions_per_user == 0) {
      throw Error(ErrorCode::InvalidConfig, "city config: every count must be >= 1");
    }
    if (!(geo_strength >= 0)) throw Error(ErrorCode::InvalidConfig, "geo_strength must be >= 0");
    if (interactions_per_user >= n_pois) {
      throw Error(ErrorCode::InfeasibleConfig,
                  "interactions_per_user=" + std::to_string(interactions_per_user) +
                      " needs more than " + std::to_string(n_pois) + " POIs");
    }
  }
};

struct GroundTruth {
  Matrix user_taste;  // users x latent_dim
  Matrix poi_attr;    // POIs x latent_dim
  std::vector<std::uint32_t> user_home;   // region per user
  std::vector<std::uint32_t> poi_region;  // region per POI
  std::size_t grid_side = 1;

  double affinity(std::size_t user, std::size_t poi) const {
    return dot(user_taste.row(user), poi_attr.row(poi));
  }

  // Rank order of true functional affinity (descending, ties by id).
  std::vector<PoiId> affinity_order(std::size_t user) const {
    std::vector<double> scores(poi_attr.rows());
    for (std::size_t p = 0; p < scores.size(); ++p) scores[p] = affinity(user, p);
    return rank_by_scores(scores, {});
  }

  std::size_t region_distance(std::uint32_t a, std::uint32_t b) const {
    const auto ax = static_cast<long>(a / grid_side), ay = static_cast<long>(a % grid_side);
    const auto bx = static_cast<long>(b / grid_side), by = static_cast<long>(b % grid_side);
    return static_cast<std::size_t>(std::labs(ax - bx) + std::labs(ay - by));
  }

  double proximity(std::uint32_t a, std::uint32_t b) const {
    return std::exp(-static_cast<double>(region_distance(a, b)));
  }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct City {
  UrbanKG kg;
  InteractionSet checkins;
  GroundTruth truth;
  std::size_t geo_triplets = 0;   // generator-side tallies per relation kind
  std::size_t func_triplets = 0;
};

inline City generate_city(const CityConfig& cfg) {
  cfg.validate();
  using EC = EntityClass;
  Rng rng(derive_seed(cfg.seed, stream::kCity));
  City city;
  GroundTruth& truth = city.truth;
  std::vector<Triplet> triplets;
  auto add = [&](EC hc, std::size_t h, Relation r, EC tc, std::size_t t) {
    triplets.push_back({{hc, static_cast<std::uint32_t>(h)}, r, {tc, static_cast<std::uint32_t>(t)}});
    (info(r).kind == RelationKind::Geographical ? city.geo_triplets : city.func_triplets)++;
  };

  // Region grid: BorderBy for edge neighbours, NearBy for diagonal ones.
  std::size_t side = 1;
  while (side * side < cfg.n_regions) ++side;
  truth.grid_side = side;
  for (std::size_t a = 0; a < cfg.n_regions; ++a) {
    for (std::size_t b = a + 1; b < cfg.n_regions; ++b) {
      const auto dx = std::labs(static_cast<long>(a / side) - static_cast<long>(b / side));
      const auto dy = std::labs(static_cast<long>(a % side) - static_cast<long>(b % side));
      if (dx + dy == 1) add(EC::Region, a, Relation::BorderBy, EC::Region, b);
      if (dx == 1 && dy == 1) add(EC::Region, a, Relation::NearBy, EC::Region, b);
    }
  }

  // Business areas serve their centre region and its bordering regions.
  std::vector<std::uint32_t> ba_center(cfg.n_business_areas);
  for (auto& c : ba_center) c = static_cast<std::uint32_t>(rng.below(cfg.n_regions));
  for (std::size_t ba = 0; ba < cfg.n_business_areas; ++ba) {
    for (std::size_t r = 0; r < cfg.n_regions; ++r) {
      if (truth.region_distance(ba_center[ba], static_cast<std::uint32_t>(r)) <= 1) {
        add(EC::BusinessArea, ba, Relation::BaServe, EC::Region, r);
      }
    }
  }

  // Category hierarchy with latent vectors that drift down the levels.
  const std::size_t k = cfg.latent_dim;
  auto perturb = [&](std::span<const double> base, double sd, std::span<double> out) {
    for (std::size_t i = 0; i < k; ++i) out[i] = base[i] + sd * rng.normal();
  };
  const std::vector<double> origin(k, 0.0);
  Matrix cate1(cfg.n_cate1, k), cate2(cfg.n_cate2, k), cate3(cfg.n_cate3, k);
  std::vector<std::size_t> parent2(cfg.n_cate2), parent3(cfg.n_cate3);
  for (std::size_t c = 0; c < cfg.n_cate1; ++c) perturb(origin, 1.0, cate1.row(c));
  for (std::size_t c = 0; c < cfg.n_cate2; ++c) {
    parent2[c] = c < cfg.n_cate1 ? c : rng.below(cfg.n_cate1);
    perturb(cate1.row(parent2[c]), 0.7, cate2.row(c));
    add(EC::Cate2, c, Relation::SubCate2to1, EC::Cate1, parent2[c]);
  }
  for (std::size_t c = 0; c < cfg.n_cate3; ++c) {
    parent3[c] = c < cfg.n_cate2 ? c : rng.below(cfg.n_cate2);
    perturb(cate2.row(parent3[c]), 0.5, cate3.row(c));
    add(EC::Cate3, c, Relation::SubCate3to2, EC::Cate2, parent3[c]);
    add(EC::Cate3, c, Relation::SubCate3to1, EC::Cate1, parent2[parent3[c]]);
  }

  // Brands belong to one fine category; brands sharing a mid-level category
  // are chained with RelatedBrand.
  Matrix brand(cfg.n_brands, k);
  std::vector<std::size_t> brand_cate3(cfg.n_brands);
  std::vector<std::size_t> last_brand_in_cate2(cfg.n_cate2, SIZE_MAX);
  for (std::size_t b = 0; b < cfg.n_brands; ++b) {
    brand_cate3[b] = b < cfg.n_cate3 ? b : rng.below(cfg.n_cate3);
    const std::size_t c3 = brand_cate3[b];
    const std::size_t c2 = parent3[c3];
    perturb(cate3.row(c3), 0.5, brand.row(b));
    add(EC::Brand, b, Relation::Brand2Cate3, EC::Cate3, c3);
    add(EC::Brand, b, Relation::Brand2Cate2, EC::Cate2, c2);
    add(EC::Brand, b, Relation::Brand2Cate1, EC::Cate1, parent2[c2]);
    if (last_brand_in_cate2[c2] != SIZE_MAX) {
      add(EC::Brand, last_brand_in_cate2[c2], Relation::RelatedBrand, EC::Brand, b);
    }
    last_brand_in_cate2[c2] = b;
  }

  // POIs: exactly six triplets each.
  truth.poi_attr = Matrix(cfg.n_pois, k);
  truth.poi_region.resize(cfg.n_pois);
  for (std::size_t p = 0; p < cfg.n_pois; ++p) {
    const auto region = static_cast<std::uint32_t>(rng.below(cfg.n_regions));
    truth.poi_region[p] = region;
    std::size_t best_ba = 0;
    for (std::size_t ba = 1; ba < cfg.n_business_areas; ++ba) {
      if (truth.region_distance(ba_center[ba], region) <
          truth.region_distance(ba_center[best_ba], region)) {
        best_ba = ba;
      }
    }
    const std::size_t b = rng.below(cfg.n_brands);
    const std::size_t c3 = brand_cate3[b];
    perturb(brand.row(b), 0.3, truth.poi_attr.row(p));
    add(EC::Poi, p, Relation::LocateAt, EC::Region, region);
    add(EC::Poi, p, Relation::BelongTo, EC::BusinessArea, best_ba);
    add(EC::Poi, p, Relation::BrandOf, EC::Brand, b);
    add(EC::Poi, p, Relation::Cate1Of, EC::Cate1, parent2[parent3[c3]]);
    add(EC::Poi, p, Relation::Cate2Of, EC::Cate2, parent3[c3]);
    add(EC::Poi, p, Relation::Cate3Of, EC::Cate3, c3);
  }

  Populations pop{};
  pop[static_cast<std::size_t>(EC::Poi)] = cfg.n_pois;
  pop[static_cast<std::size_t>(EC::BusinessArea)] = cfg.n_business_areas;
  pop[static_cast<std::size_t>(EC::Region)] = cfg.n_regions;
  pop[static_cast<std::size_t>(EC::Brand)] = cfg.n_brands;
  pop[static_cast<std::size_t>(EC::Cate1)] = cfg.n_cate1;
  pop[static_cast<std::size_t>(EC::Cate2)] = cfg.n_cate2;
  pop[static_cast<std::size_t>(EC::Cate3)] = cfg.n_cate3;
  city.kg = UrbanKG(std::move(triplets), pop);

  // Users, each with an independent stream so the draw for user u does not
  // depend on anyone else's.
  truth.user_taste = Matrix(cfg.n_users, k);
  truth.user_home.resize(cfg.n_users);
  const double taste_sd = 1.0 / std::sqrt(static_cast<double>(k));
  const std::uint64_t user_root = derive_seed(cfg.seed, stream::kCityUsers);
  std::vector<Interaction> pairs;
  std::vector<std::pair<double, PoiId>> keys(cfg.n_pois);
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    Rng urng(derive_seed(user_root, u));
    truth.user_home[u] = static_cast<std::uint32_t>(urng.below(cfg.n_regions));
    for (double& v : truth.user_taste.row(u)) v = taste_sd * urng.normal();
    const std::size_t lo = std::max<std::size_t>(3, (cfg.interactions_per_user + 1) / 2);
    const std::size_t hi = std::max(lo, cfg.interactions_per_user * 3 / 2);
    const std::size_t count = std::min(cfg.n_pois - 1, lo + urng.below(hi - lo + 1));
    // Weighted sampling without replacement: keep the largest log(U)/w.
    for (std::size_t p = 0; p < cfg.n_pois; ++p) {
      const double logit = cfg.functional_scale * truth.affinity(u, p) +
                           cfg.geo_strength *
                               (truth.proximity(truth.user_home[u], truth.poi_region[p]) - 1.0) +
                           cfg.base_logit;
      double draw = urng.uniform();
      while (draw <= 0.0) draw = urng.uniform();
      keys[p] = {std::log(draw) / sigmoid(logit), static_cast<PoiId>(p)};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(),
                      [](const auto& a, const auto& b) {
                        return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });
    for (std::size_t i = 0; i < count; ++i) pairs.emplace_back(static_cast<UserId>(u), keys[i].second);
  }
  city.checkins = InteractionSet(cfg.n_users, cfg.n_pois, pairs);
  return city;
}

// Fraction of each user's check-ins located in the home region, averaged.
inline double same_region_rate(const City& city) {
  double sum = 0.0;
  for (std::size_t u = 0; u < city.checkins.n_users(); ++u) {
    const auto items = city.checkins.positives(static_cast<UserId>(u));
    std::size_t same = 0;
    for (PoiId p : items) same += city.truth.poi_region[p] == city.truth.user_home[u];
    sum += static_cast<double>(same) / static_cast<double>(items.size());
  }
  return sum / static_cast<double>(city.checkins.n_users());
}

// Graded NDCG@K against true functional affinity, ignoring geography. For each
// user the relevant set is the top `quantile` of its ranked candidates by
// affinity; a relevant POI's gain is its affinity above the first excluded
// candidate's. Users with empty lists are skipped.
inline double functional_ndcg(std::span<const std::vector<PoiId>> ranked, const GroundTruth& truth,
                              std::size_t k, double quantile = 0.05) {
  double sum = 0.0;
  std::size_t users = 0;
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    const auto& list = ranked[u];
    if (list.empty()) continue;
    std::vector<double> aff(truth.poi_attr.rows(), 0.0);
    std::vector<double> sorted;
    sorted.reserve(list.size());
    for (PoiId p : list) {
      aff[p] = truth.affinity(u, p);
      sorted.push_back(aff[p]);
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t relevant = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(list.size()))));
    const double cut = relevant < sorted.size() ? sorted[relevant] : sorted.back() - 1.0;
    auto gain = [&](PoiId p) { return std::max(0.0, aff[p] - cut); };
    double dcg = 0.0, idcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, list.size()); ++r) {
      dcg += gain(list[r]) / std::log2(r + 2.0);
    }
    for (std::size_t r = 0; r < std::min(k, relevant); ++r) {
      idcg += std::max(0.0, sorted[r] - cut) / std::log2(r + 2.0);
    }
    if (idcg <= 0.0) continue;
    sum += dcg / idcg;
    ++users;
  }
  return users == 0 ? 0.0 : sum / static_cast<double>(users);
}

// Ground-truth file:
//   #ukgc-ground-truth 1 users=<n> pois=<n> latent_dim=<k> grid_side=<s>
//   user<TAB><id><TAB><home region><TAB><v1 v2 ... vk>
//   poi<TAB><id><TAB><region><TAB><v1 v2 ... vk>
inline std::string serialize_ground_truth(const GroundTruth& t) {
  std::string out = "#ukgc-ground-truth 1 users=" + std::to_string(t.user_taste.rows()) +
                    " pois=" + std::to_string(t.poi_attr.rows()) +
                    " latent_dim=" + std::to_string(t.user_taste.cols()) +
                    " grid_side=" + std::to_string(t.grid_side) + "\n";
  char buf[64];
  auto row = [&](std::string_view tag, std::size_t id, std::uint32_t region,
                 std::span<const double> v) {
    out += tag;
    out += '\t' + std::to_string(id) + '\t' + std::to_string(region) + '\t';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ' ';
      out.append(buf, std::to_chars(buf, buf + sizeof buf, v[i]).ptr);
    }
    out += '\n';
  };
  for (std::size_t u = 0; u < t.user_taste.rows(); ++u) row("user", u, t.user_home[u], t.user_taste.row(u));
  for (std::size_t p = 0; p < t.poi_attr.rows(); ++p) row("poi", p, t.poi_region[p], t.poi_attr.row(p));
  return out;
}

inline GroundTruth parse_ground_truth(std::string_view text) {
  GroundTruth t;
  bool header = false;
  std::size_t n_users = 0, n_pois = 0, dim = 0;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + why, line_no);
    };
    if (line.empty()) return;
    if (!header) {
      constexpr std::string_view kTag = "#ukgc-ground-truth 1";
      if (line.substr(0, kTag.size()) != kTag) throw bad("missing ground-truth header");
      for (auto tok : detail::split(line.substr(kTag.size()), ' ')) {
        if (tok.empty()) continue;
        const auto eq = tok.find('=');
        auto v = eq == std::string_view::npos ? std::nullopt : detail::parse_uint<std::size_t>(tok.substr(eq + 1));
        if (!v) throw bad("bad header token");
        const auto key = tok.substr(0, eq);
        if (key == "users") n_users = *v;
        else if (key == "pois") n_pois = *v;
        else if (key == "latent_dim") dim = *v;
        else if (key == "grid_side") t.grid_side = *v;
      }
      t.user_taste = Matrix(n_users, dim);
      t.poi_attr = Matrix(n_pois, dim);
      t.user_home.assign(n_users, 0);
      t.poi_region.assign(n_pois, 0);
      header = true;
      return;
    }
    const auto f = detail::split(line, '\t');
    if (f.size() != 4) throw bad("expected 4 fields");
    auto id = detail::parse_uint<std::size_t>(f[1]);
    auto region = detail::parse_uint<std::uint32_t>(f[2]);
    const bool is_user = f[0] == "user";
    if (!id || !region || (!is_user && f[0] != "poi") || *id >= (is_user ? n_users : n_pois)) {
      throw bad("bad record");
    }
    auto values = detail::split(f[3], ' ');
    if (values.size() != dim) throw bad("wrong vector length");
    auto dst = is_user ? t.user_taste.row(*id) : t.poi_attr.row(*id);
    for (std::size_t i = 0; i < dim; ++i) {
      auto res = std::from_chars(values[i].data(), values[i].data() + values[i].size(), dst[i]);
      if (res.ec != std::errc{}) throw bad("bad number");
    }
    (is_user ? t.user_home : t.poi_region)[*id] = *region;
  });
  if (!header) throw Error(ErrorCode::MalformedLine, "empty ground-truth file");
  return t;
}

}  // namespace ukgc
