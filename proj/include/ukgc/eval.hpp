#pragma once

// Full-ranking evaluation: every POI not already seen by the user is a
// candidate. Recall@K, binary-relevance NDCG@K (log2 discount) and sampled AUC.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ukgc/counterfactual.hpp"
#include "ukgc/error.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/random.hpp"

namespace ukgc {

enum class Scorer : std::uint8_t { Tie, Te, Match };

inline std::string_view to_string(Scorer s) {
  switch (s) {
    case Scorer::Tie: return "TIE";
    case Scorer::Te: return "TE";
    case Scorer::Match: return "YUP";
  }
  return "?";
}

inline std::optional<Scorer> scorer_from_string(std::string_view name) {
  if (name == "TIE" || name == "tie") return Scorer::Tie;
  if (name == "TE" || name == "te") return Scorer::Te;
  if (name == "YUP" || name == "yup" || name == "Y_up") return Scorer::Match;
  return std::nullopt;
}

// Scores of every POI for one user. `mean_poi` is column_mean(finals.poi),
// computed once per evaluation pass.
inline std::vector<double> score_all_pois(std::size_t user, const FinalEmbeddings& finals,
                                          Scorer scorer, std::span<const double> mean_poi) {
  const std::size_t n_pois = finals.poi.rows();
  const auto u = finals.user.row(user);
  const auto ug = finals.user_geo.row(user);
  const double ref = dot(u, mean_poi);
  std::vector<double> scores(n_pois);
  for (std::size_t p = 0; p < n_pois; ++p) {
    const double y_up = dot(u, finals.poi.row(p));
    if (scorer == Scorer::Match) {
      scores[p] = y_up;
      continue;
    }
    const ScoreBundle b = score_bundle(y_up, dot(ug, finals.poi_geo.row(p)), ref);
    scores[p] = scorer == Scorer::Tie ? b.tie : b.te;
  }
  return scores;
}

namespace detail {

inline std::vector<PoiId> candidates(std::size_t n_pois,
                                     std::span<const std::span<const PoiId>> excluded) {
  std::vector<char> skip(n_pois, 0);
  for (auto list : excluded) {
    for (PoiId p : list) skip[p] = 1;
  }
  std::vector<PoiId> out;
  out.reserve(n_pois);
  for (std::size_t p = 0; p < n_pois; ++p) {
    if (!skip[p]) out.push_back(static_cast<PoiId>(p));
  }
  return out;
}

}  // namespace detail

// Score descending, ties by ascending POI id. With `limit`, only the first
// `limit` entries of that order are produced.
inline std::vector<PoiId> rank_by_scores(std::span<const double> scores,
                                         std::span<const std::span<const PoiId>> excluded,
                                         std::optional<std::size_t> limit = std::nullopt) {
  std::vector<PoiId> order = detail::candidates(scores.size(), excluded);
  auto before = [&](PoiId a, PoiId b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  if (limit && *limit < order.size()) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(*limit),
                      order.end(), before);
    order.resize(*limit);
  } else {
    std::sort(order.begin(), order.end(), before);
  }
  return order;
}

inline std::vector<PoiId> rank_candidates(std::size_t user, const FinalEmbeddings& finals,
                                          Scorer scorer,
                                          std::span<const std::span<const PoiId>> excluded) {
  const auto mean = column_mean(finals.poi);
  const auto scores = score_all_pois(user, finals, scorer, mean);
  return rank_by_scores(scores, excluded);
}

namespace detail {

inline void require_positives(std::span<const PoiId> positives) {
  if (positives.empty()) throw Error(ErrorCode::EmptyTestSet, "user has no held-out positives");
}

inline bool is_positive(std::span<const PoiId> sorted_positives, PoiId p) {
  return std::binary_search(sorted_positives.begin(), sorted_positives.end(), p);
}

}  // namespace detail

// `positives` must be sorted ascending.
inline double recall_at_k(std::span<const PoiId> ranked, std::span<const PoiId> positives,
                          std::size_t k) {
  detail::require_positives(positives);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    hits += detail::is_positive(positives, ranked[r]);
  }
  return static_cast<double>(hits) / static_cast<double>(positives.size());
}

inline double ndcg_at_k(std::span<const PoiId> ranked, std::span<const PoiId> positives,
                        std::size_t k) {
  detail::require_positives(positives);
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    if (detail::is_positive(positives, ranked[r])) dcg += 1.0 / std::log2(r + 2.0);
  }
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, positives.size()); ++r) idcg += 1.0 / std::log2(r + 2.0);
  return dcg / idcg;
}

// Fraction of (positive, negative) pairs ordered correctly, ties count half.
inline double auc(std::span<const double> scores, std::span<const PoiId> positives,
                  std::span<const PoiId> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw Error(ErrorCode::EmptyTestSet, "AUC needs at least one positive and one negative");
  }
  double wins = 0.0;
  for (PoiId p : positives) {
    for (PoiId n : negatives) {
      if (scores[p] > scores[n]) {
        wins += 1.0;
      } else if (scores[p] == scores[n]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(positives.size() * negatives.size());
}

enum class EvalTarget : std::uint8_t { Validation, Test };

inline std::string_view to_string(EvalTarget t) {
  return t == EvalTarget::Validation ? "val" : "test";
}

struct EvalOptions {
  EvalTarget target = EvalTarget::Test;
  std::vector<std::size_t> ks = {20, 40, 60};
  std::uint64_t seed = 0;  // AUC negative sampling
  bool compute_auc = true;
};

struct MetricsReport {
  std::string scorer;
  std::string target;
  std::uint64_t seed = 0;
  std::vector<std::size_t> ks;
  std::vector<double> recall;
  std::vector<double> ndcg;
  double auc = 0.0;
  std::size_t n_users_evaluated = 0;
  bool defined = false;  // false when no user had held-out positives

  double recall_at(std::size_t k) const {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (ks[i] == k) return recall[i];
    }
    throw Error(ErrorCode::InvalidConfig, "K=" + std::to_string(k) + " not evaluated");
  }
  double ndcg_at(std::size_t k) const {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (ks[i] == k) return ndcg[i];
    }
    throw Error(ErrorCode::InvalidConfig, "K=" + std::to_string(k) + " not evaluated");
  }
};

// Held-out positives and the lists excluded from ranking for a target split:
// validation excludes train; test excludes train and validation.
struct TargetView {
  const InteractionSet* positives;
  std::vector<const InteractionSet*> excluded;
};

inline TargetView target_view(const DatasetSplit& split, EvalTarget target) {
  if (target == EvalTarget::Validation) return {&split.val, {&split.train}};
  return {&split.test, {&split.train, &split.val}};
}

inline std::vector<std::span<const PoiId>> excluded_lists(const TargetView& view, UserId u) {
  std::vector<std::span<const PoiId>> out;
  for (const InteractionSet* s : view.excluded) out.push_back(s->positives(u));
  return out;
}

inline MetricsReport evaluate(const FinalEmbeddings& finals, const DatasetSplit& split,
                              Scorer scorer, const EvalOptions& opts = {}) {
  MetricsReport report;
  report.scorer = std::string(to_string(scorer));
  report.target = std::string(to_string(opts.target));
  report.seed = opts.seed;
  report.ks = opts.ks;
  report.recall.assign(opts.ks.size(), 0.0);
  report.ndcg.assign(opts.ks.size(), 0.0);
  const std::size_t max_k = opts.ks.empty() ? 0 : *std::max_element(opts.ks.begin(), opts.ks.end());
  const TargetView view = target_view(split, opts.target);
  const auto mean = column_mean(finals.poi);
  const std::size_t n_pois = finals.poi.rows();

  Rng rng(derive_seed(opts.seed, stream::kAucNegatives));
  double auc_sum = 0.0;
  std::size_t auc_users = 0;
  std::vector<PoiId> negatives;
  for (std::size_t u = 0; u < split.all.n_users(); ++u) {
    const auto uid = static_cast<UserId>(u);
    const auto positives = view.positives->positives(uid);
    if (positives.empty()) continue;
    const auto scores = score_all_pois(u, finals, scorer, mean);
    const auto excluded = excluded_lists(view, uid);
    const auto top = rank_by_scores(scores, excluded, max_k);
    for (std::size_t i = 0; i < opts.ks.size(); ++i) {
      report.recall[i] += recall_at_k(top, positives, opts.ks[i]);
      report.ndcg[i] += ndcg_at_k(top, positives, opts.ks[i]);
    }
    ++report.n_users_evaluated;

    if (opts.compute_auc && split.all.positives(uid).size() < n_pois) {
      negatives.clear();
      for (std::size_t i = 0; i < positives.size(); ++i) {
        PoiId n = 0;
        do {
          n = static_cast<PoiId>(rng.below(n_pois));
        } while (split.all.contains(uid, n));
        negatives.push_back(n);
      }
      auc_sum += auc(scores, positives, negatives);
      ++auc_users;
    }
  }
  if (report.n_users_evaluated > 0) {
    report.defined = true;
    const auto n = static_cast<double>(report.n_users_evaluated);
    for (double& v : report.recall) v /= n;
    for (double& v : report.ndcg) v /= n;
  }
  if (auc_users > 0) report.auc = auc_sum / static_cast<double>(auc_users);
  return report;
}

// Full candidate rankings for every user with held-out positives (empty
// lists for the rest).
inline std::vector<std::vector<PoiId>> ranked_lists(const FinalEmbeddings& finals,
                                                    const DatasetSplit& split, Scorer scorer,
                                                    EvalTarget target) {
  const TargetView view = target_view(split, target);
  const auto mean = column_mean(finals.poi);
  std::vector<std::vector<PoiId>> out(split.all.n_users());
  for (std::size_t u = 0; u < out.size(); ++u) {
    const auto uid = static_cast<UserId>(u);
    if (view.positives->positives(uid).empty()) continue;
    const auto scores = score_all_pois(u, finals, scorer, mean);
    out[u] = rank_by_scores(scores, excluded_lists(view, uid));
  }
  return out;
}

}  // namespace ukgc
