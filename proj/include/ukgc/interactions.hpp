#pragma once

// User-POI check-ins, per-user stratified splits and BPR triple sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ukgc/error.hpp"
#include "ukgc/random.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc {

using UserId = std::uint32_t;
using PoiId = std::uint32_t;
using Interaction = std::pair<UserId, PoiId>;

// Deduplicated interactions stored as sorted per-user POI lists.
class InteractionSet {
 public:
  InteractionSet() = default;

  InteractionSet(std::size_t n_users, std::size_t n_pois, std::span<const Interaction> pairs)
      : n_users_(n_users), n_pois_(n_pois), lists_(n_users) {
    for (auto [u, p] : pairs) {
      if (u >= n_users || p >= n_pois) {
        throw Error(ErrorCode::CountMismatch,
                    "interaction (" + std::to_string(u) + ", " + std::to_string(p) +
                        ") outside " + std::to_string(n_users) + "x" + std::to_string(n_pois));
      }
      lists_[u].push_back(p);
    }
    for (auto& list : lists_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      n_pairs_ += list.size();
    }
  }

  std::size_t n_users() const noexcept { return n_users_; }
  std::size_t n_pois() const noexcept { return n_pois_; }
  std::size_t n_pairs() const noexcept { return n_pairs_; }

  std::span<const PoiId> positives(UserId u) const { return lists_[u]; }

  bool contains(UserId u, PoiId p) const {
    return std::binary_search(lists_[u].begin(), lists_[u].end(), p);
  }

  std::vector<Interaction> pairs() const {
    std::vector<Interaction> out;
    out.reserve(n_pairs_);
    for (std::size_t u = 0; u < n_users_; ++u) {
      for (PoiId p : lists_[u]) out.emplace_back(static_cast<UserId>(u), p);
    }
    return out;
  }

  friend bool operator==(const InteractionSet&, const InteractionSet&) = default;

 private:
  std::size_t n_users_ = 0;
  std::size_t n_pois_ = 0;
  std::size_t n_pairs_ = 0;
  std::vector<std::vector<PoiId>> lists_;
};

// "user<TAB>poi" lines; '#' comments and blank lines skipped. An optional
// "#counts users=<n> pois=<n>" header widens the id spaces (e.g. to the KG's
// POI catalog). Every user id below n_users must have at least one pair.
inline InteractionSet parse_checkins(std::string_view text) {
  std::vector<Interaction> pairs;
  std::size_t n_users = 0;
  std::size_t n_pois = 0;
  std::size_t declared_users = 0;
  std::size_t declared_pois = 0;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    if (line.front() == '#') {
      auto counts = detail::parse_counts_header(line, line_no);
      if (!counts) return;
      for (auto [key, value] : *counts) {
        if (key == "users") {
          declared_users = value;
        } else if (key == "pois") {
          declared_pois = value;
        } else {
          throw Error(ErrorCode::MalformedLine,
                      "line " + std::to_string(line_no) + ": unknown #counts key '" +
                          std::string(key) + "'",
                      line_no);
        }
      }
      return;
    }
    const auto fields = detail::split(line, '\t');
    auto u = fields.size() == 2 ? detail::parse_uint<UserId>(fields[0]) : std::nullopt;
    auto p = fields.size() == 2 ? detail::parse_uint<PoiId>(fields[1]) : std::nullopt;
    if (!u || !p) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": expected 'user<TAB>poi'", line_no);
    }
    pairs.emplace_back(*u, *p);
    n_users = std::max<std::size_t>(n_users, std::size_t{*u} + 1);
    n_pois = std::max<std::size_t>(n_pois, std::size_t{*p} + 1);
  });
  if (pairs.empty()) throw Error(ErrorCode::EmptyDataset, "no check-ins");
  if (declared_users != 0 && declared_users < n_users) {
    throw Error(ErrorCode::CountMismatch, "#counts users=" + std::to_string(declared_users) +
                                              " but ids reach " + std::to_string(n_users - 1));
  }
  if (declared_pois != 0 && declared_pois < n_pois) {
    throw Error(ErrorCode::CountMismatch, "#counts pois=" + std::to_string(declared_pois) +
                                              " but ids reach " + std::to_string(n_pois - 1));
  }
  InteractionSet set(std::max(n_users, declared_users), std::max(n_pois, declared_pois), pairs);
  for (std::size_t u = 0; u < set.n_users(); ++u) {
    if (set.positives(static_cast<UserId>(u)).empty()) {
      throw Error(ErrorCode::UserWithoutInteractions,
                  "user " + std::to_string(u) + " has no check-ins");
    }
  }
  return set;
}

inline std::string serialize_checkins(const InteractionSet& set) {
  std::string out = "#counts users=" + std::to_string(set.n_users()) +
                    " pois=" + std::to_string(set.n_pois()) + "\n";
  for (auto [u, p] : set.pairs()) {
    out += std::to_string(u);
    out += '\t';
    out += std::to_string(p);
    out += '\n';
  }
  return out;
}

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  InteractionSet all;
  InteractionSet train;
  InteractionSet val;
  InteractionSet test;
  std::vector<Interaction> train_pairs;  // flattened, for uniform positive draws
};

// Per-user stratified split. Users with fewer than three check-ins keep all of
// them in train; everyone else gets at least one val and one test pair.
inline DatasetSplit split_dataset(const InteractionSet& set, SplitRatios ratios,
                                  std::uint64_t seed) {
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0) ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadRatios, "split ratios must be positive and sum to 1");
  }
  Rng rng(derive_seed(seed, stream::kSplit));
  std::vector<Interaction> train;
  std::vector<Interaction> val;
  std::vector<Interaction> test;
  for (std::size_t u = 0; u < set.n_users(); ++u) {
    const auto uid = static_cast<UserId>(u);
    std::vector<PoiId> items(set.positives(uid).begin(), set.positives(uid).end());
    const std::size_t n = items.size();
    if (n < 3) {
      for (PoiId p : items) train.emplace_back(uid, p);
      continue;
    }
    rng.shuffle(items);
    auto count = [n](double r) {
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r * n)));
    };
    std::size_t n_val = count(ratios.val);
    std::size_t n_test = count(ratios.test);
    while (n_val + n_test > n - 1) {
      if (n_val >= n_test) {
        --n_val;
      } else {
        --n_test;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Interaction pair{uid, items[i]};
      if (i < n_test) {
        test.push_back(pair);
      } else if (i < n_test + n_val) {
        val.push_back(pair);
      } else {
        train.push_back(pair);
      }
    }
  }
  DatasetSplit split;
  split.all = set;
  split.train = InteractionSet(set.n_users(), set.n_pois(), train);
  split.val = InteractionSet(set.n_users(), set.n_pois(), val);
  split.test = InteractionSet(set.n_users(), set.n_pois(), test);
  split.train_pairs = split.train.pairs();
  return split;
}

struct BprTriple {
  UserId user = 0;
  PoiId pos = 0;
  PoiId neg = 0;

  friend bool operator==(const BprTriple&, const BprTriple&) = default;
};

// Positives uniform over train pairs; negatives uniform over the catalog,
// resampled until outside the user's full positive set.
inline std::vector<BprTriple> sample_bpr_batch(const DatasetSplit& split, std::size_t batch_size,
                                               Rng& rng) {
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (split.train_pairs.empty()) throw Error(ErrorCode::EmptyDataset, "no training pairs");
  const std::size_t n_pois = split.all.n_pois();
  std::vector<BprTriple> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    auto [u, pos] = split.train_pairs[rng.below(split.train_pairs.size())];
    if (split.all.positives(u).size() >= n_pois) {
      throw Error(ErrorCode::SaturatedUser,
                  "user " + std::to_string(u) + " has interacted with every POI");
    }
    PoiId neg = 0;
    do {
      neg = static_cast<PoiId>(rng.below(n_pois));
    } while (split.all.contains(u, neg));
    batch.push_back({u, pos, neg});
  }
  return batch;
}

}  // namespace ukgc
