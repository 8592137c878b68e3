#pragma once

// Objective terms: distance correlation between intents, the two BPR losses
// and the assembled multi-task objective
//   L = L_F + λ1 (L_ind,g + L_ind,f) + λ2 ||Θ||² + α (L_C + λ2 ||Θ_g||²)

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ukgc/error.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/matrix.hpp"
#include "ukgc/model.hpp"
#include "ukgc/propagation.hpp"

namespace ukgc {

struct HyperParams {
  double lambda_ind = 1e-4;  // λ1
  double lambda_reg = 1e-3;  // λ2
  double alpha = 1.0;        // counterfactual task weight
  double lr = 1e-3;
  std::size_t batch_size = 1024;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t patience = 10;
  std::size_t max_epochs = 200;

  void validate() const {
    if (!(lr > 0) || patience == 0 || batch_size == 0 || lambda_ind < 0 || lambda_reg < 0 ||
        alpha < 0) {
      throw Error(ErrorCode::InvalidConfig,
                  "hyperparameters: need lr > 0, patience >= 1, batch_size >= 1, "
                  "non-negative lambda_ind/lambda_reg/alpha");
    }
  }
};

struct LossBreakdown {
  double l_f = 0.0;
  double l_c = 0.0;
  double l_ind_g = 0.0;
  double l_ind_f = 0.0;
  double l_reg = 0.0;
  double l_reg_g = 0.0;
  double total = 0.0;
};

inline double combine(const LossBreakdown& b, const HyperParams& hp) {
  return b.l_f + hp.lambda_ind * (b.l_ind_g + b.l_ind_f) + hp.lambda_reg * b.l_reg +
         hp.alpha * (b.l_c + hp.lambda_reg * b.l_reg_g);
}

// -ln σ(-z) without overflow.
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

// Double-centred |x_k - x_l| matrix.
inline Matrix centered_distances(std::span<const double> x) {
  const std::size_t d = x.size();
  Matrix a(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) a(k, l) = std::abs(x[k] - x[l]);
  }
  std::vector<double> row_mean(d, 0.0);
  double grand = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) row_mean[k] += a(k, l);
    grand += row_mean[k];
    row_mean[k] /= static_cast<double>(d);
  }
  grand /= static_cast<double>(d * d);
  // a is symmetric, so column means equal row means.
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) a(k, l) += grand - row_mean[k] - row_mean[l];
  }
  return a;
}

inline double mean_product(const Matrix& a, const Matrix& b) {
  return dot(a.flat(), b.flat()) / static_cast<double>(a.size());
}

inline constexpr double kDegenerateVariance = 1e-12;

}  // namespace detail

// Distance correlation treating the d coordinates as d paired samples.
// Returns 0 when either vector is (numerically) constant.
inline double dcor(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || x.size() != y.size()) {
    throw Error(ErrorCode::DimensionTooSmall, "dcor needs two vectors of equal length >= 2");
  }
  const Matrix a = detail::centered_distances(x);
  const Matrix b = detail::centered_distances(y);
  const double dvar_x = std::sqrt(std::max(0.0, detail::mean_product(a, a)));
  const double dvar_y = std::sqrt(std::max(0.0, detail::mean_product(b, b)));
  if (dvar_x < detail::kDegenerateVariance || dvar_y < detail::kDegenerateVariance) return 0.0;
  const double dcov = std::sqrt(std::max(0.0, detail::mean_product(a, b)));
  return dcov / std::sqrt(dvar_x * dvar_y);
}

// Adds scale * ∂dcor/∂x to grad_x and scale * ∂dcor/∂y to grad_y; returns dcor.
//
// With V_xy = mean(A∘B) and centring being a projection, ∂V_xy/∂x_k =
// (2/d²) Σ_l B_kl sign(x_k - x_l) and ∂V_xx/∂x_k = (4/d²) Σ_l A_kl sign(x_k - x_l).
inline double dcor_backward(std::span<const double> x, std::span<const double> y, double scale,
                            std::span<double> grad_x, std::span<double> grad_y) {
  const std::size_t d = x.size();
  if (d < 2 || d != y.size()) {
    throw Error(ErrorCode::DimensionTooSmall, "dcor needs two vectors of equal length >= 2");
  }
  const Matrix a = detail::centered_distances(x);
  const Matrix b = detail::centered_distances(y);
  const double v_xx = detail::mean_product(a, a);
  const double v_yy = detail::mean_product(b, b);
  const double v_xy = detail::mean_product(a, b);
  const double dvar_x = std::sqrt(std::max(0.0, v_xx));
  const double dvar_y = std::sqrt(std::max(0.0, v_yy));
  if (dvar_x < detail::kDegenerateVariance || dvar_y < detail::kDegenerateVariance ||
      v_xy <= 0.0) {
    return 0.0;
  }
  const double value = std::sqrt(v_xy) / std::sqrt(dvar_x * dvar_y);
  const double inv_d2 = 1.0 / static_cast<double>(d * d);
  auto sign = [](double v) { return static_cast<double>((v > 0) - (v < 0)); };
  for (std::size_t k = 0; k < d; ++k) {
    double dvxy_dx = 0.0, dvxx_dx = 0.0, dvxy_dy = 0.0, dvyy_dy = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      const double sx = sign(x[k] - x[l]);
      const double sy = sign(y[k] - y[l]);
      dvxy_dx += b(k, l) * sx;
      dvxx_dx += a(k, l) * sx;
      dvxy_dy += a(k, l) * sy;
      dvyy_dy += b(k, l) * sy;
    }
    dvxy_dx *= 2.0 * inv_d2;
    dvxx_dx *= 4.0 * inv_d2;
    dvxy_dy *= 2.0 * inv_d2;
    dvyy_dy *= 4.0 * inv_d2;
    grad_x[k] += scale * value * (0.5 * dvxy_dx / v_xy - 0.25 * dvxx_dx / v_xx);
    grad_y[k] += scale * value * (0.5 * dvxy_dy / v_xy - 0.25 * dvyy_dy / v_yy);
  }
  return value;
}

// Σ_{i<j} dcor(e_i, e_j)
inline double independence_loss(const IntentSet& intents) {
  const Matrix& e = intents.intents;
  double sum = 0.0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    for (std::size_t j = i + 1; j < e.rows(); ++j) sum += dcor(e.row(i), e.row(j));
  }
  return sum;
}

inline double independence_loss_backward(const IntentSet& intents, double scale,
                                         Matrix& grad_intents) {
  const Matrix& e = intents.intents;
  double sum = 0.0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    for (std::size_t j = i + 1; j < e.rows(); ++j) {
      sum += dcor_backward(e.row(i), e.row(j), scale, grad_intents.row(i), grad_intents.row(j));
    }
  }
  return sum;
}

// Σ softplus(-(Y(u,pos) - Y(u,neg))) on fused embeddings.
inline double bpr_factual(std::span<const BprTriple> batch, const FinalEmbeddings& finals) {
  double sum = 0.0;
  for (const BprTriple& t : batch) {
    const auto u = finals.user.row(t.user);
    sum += softplus(-(dot(u, finals.poi.row(t.pos)) - dot(u, finals.poi.row(t.neg))));
  }
  return sum;
}

// Same form on the geographical chunk only.
inline double bpr_counterfactual(std::span<const BprTriple> batch, const FinalEmbeddings& finals) {
  double sum = 0.0;
  for (const BprTriple& t : batch) {
    const auto u = finals.user_geo.row(t.user);
    sum += softplus(-(dot(u, finals.poi_geo.row(t.pos)) - dot(u, finals.poi_geo.row(t.neg))));
  }
  return sum;
}

inline double geo_squared_norm(const ModelParams& p) {
  return squared_norm(p.geo.embeddings) + squared_norm(p.geo.relations) +
         squared_norm(p.geo.intent_scores);
}

inline double total_squared_norm(const ModelParams& p) {
  return geo_squared_norm(p) + squared_norm(p.func.embeddings) + squared_norm(p.func.relations) +
         squared_norm(p.func.intent_scores);
}

inline LossBreakdown total_loss(std::span<const BprTriple> batch, const ModelParams& params,
                                const FinalEmbeddings& finals, const HyperParams& hp) {
  LossBreakdown b;
  b.l_f = bpr_factual(batch, finals);
  b.l_c = bpr_counterfactual(batch, finals);
  b.l_ind_g =
      independence_loss(intent_embeddings(params.geo.intent_scores, params.geo.relations));
  b.l_ind_f =
      independence_loss(intent_embeddings(params.func.intent_scores, params.func.relations));
  b.l_reg = total_squared_norm(params);
  b.l_reg_g = geo_squared_norm(params);
  b.total = combine(b, hp);
  return b;
}

}  // namespace ukgc
