#pragma once

#include <cstddef>
#include <vector>

#include "ukgc/eval.hpp"

namespace ukgc::test_support {

// One-dimensional embeddings with user = 1, so every user scores POIs by the
// POI's single coordinate under the match scorer.
inline FinalEmbeddings scalar_finals(const std::vector<double>& poi_scores, std::size_t n_users) {
  FinalEmbeddings f;
  f.user = f.user_geo = f.user_func = Matrix(n_users, 1);
  f.user.fill(1.0);
  f.user_geo.fill(1.0);
  f.poi = f.poi_geo = f.poi_func = Matrix(poi_scores.size(), 1);
  for (std::size_t p = 0; p < poi_scores.size(); ++p) f.poi(p, 0) = f.poi_geo(p, 0) = poi_scores[p];
  return f;
}

inline DatasetSplit make_split(std::size_t n_users, std::size_t n_pois, std::vector<Interaction> train,
                               std::vector<Interaction> val, std::vector<Interaction> test) {
  DatasetSplit s;
  std::vector<Interaction> all = train;
  all.insert(all.end(), val.begin(), val.end());
  all.insert(all.end(), test.begin(), test.end());
  s.all = InteractionSet(n_users, n_pois, all);
  s.train = InteractionSet(n_users, n_pois, train);
  s.val = InteractionSet(n_users, n_pois, val);
  s.test = InteractionSet(n_users, n_pois, test);
  s.train_pairs = s.train.pairs();
  return s;
}

}  // namespace ukgc::test_support
