#pragma once

// Factual, counterfactual and debiased scores.
//
//   Y(u,p)      = u · p                       fused match
//   Y(u,g)      = u_g · p_g                   geographical match
//   Y(u,p*)     = u · mean(P)                 reference ("characterless" POI)
//   f(y, g)     = y · tanh(g)
//   TE          = f(Y(u,p), Y(u,g)) - f(Y(u,p*), 0)
//   NDE         = f(Y(u,p*), Y(u,g)) - f(Y(u,p*), 0)
//   TIE         = TE - NDE = (Y(u,p) - Y(u,p*)) · tanh(Y(u,g))
//
// The reference geography g* enters only through f(·, 0) = 0.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ukgc/matrix.hpp"
#include "ukgc/propagation.hpp"

namespace ukgc {

inline double score_match(std::span<const double> user, std::span<const double> poi) {
  return dot(user, poi);
}

inline double score_geo(std::span<const double> user_geo, std::span<const double> poi_geo) {
  return dot(user_geo, poi_geo);
}

inline std::vector<double> column_mean(const Matrix& m) {
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) axpy(1.0, m.row(r), mean);
  for (double& v : mean) v /= static_cast<double>(m.rows());
  return mean;
}

// (1/M) Σ_t u · p_t
inline double reference_score(std::span<const double> user, const Matrix& pois) {
  return dot(user, column_mean(pois));
}

inline double fuse(double y_match, double y_geo) { return y_match * std::tanh(y_geo); }

struct ScoreBundle {
  double y_up = 0.0;
  double y_ug = 0.0;
  double y_up_ref = 0.0;
  double y_fused = 0.0;
  double te = 0.0;
  double nde = 0.0;
  double tie = 0.0;
};

inline ScoreBundle score_bundle(double y_up, double y_ug, double y_up_ref) {
  ScoreBundle b;
  b.y_up = y_up;
  b.y_ug = y_ug;
  b.y_up_ref = y_up_ref;
  b.y_fused = fuse(y_up, y_ug);
  b.te = b.y_fused - fuse(y_up_ref, 0.0);
  b.nde = fuse(y_up_ref, y_ug) - fuse(y_up_ref, 0.0);
  b.tie = b.te - b.nde;
  return b;
}

inline ScoreBundle tie_score(std::size_t user, std::size_t poi, const FinalEmbeddings& finals,
                             double y_up_ref) {
  return score_bundle(score_match(finals.user.row(user), finals.poi.row(poi)),
                      score_geo(finals.user_geo.row(user), finals.poi_geo.row(poi)), y_up_ref);
}

// Ablation scorer. Y(u,p*,g*) is constant per user, so ordering equals y_fused.
inline double te_score(std::size_t user, std::size_t poi, const FinalEmbeddings& finals) {
  const double y_up = score_match(finals.user.row(user), finals.poi.row(poi));
  const double y_ug = score_geo(finals.user_geo.row(user), finals.poi_geo.row(poi));
  return fuse(y_up, y_ug) - fuse(reference_score(finals.user.row(user), finals.poi), 0.0);
}

}  // namespace ukgc
