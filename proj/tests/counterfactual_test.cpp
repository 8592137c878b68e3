#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ukgc/counterfactual.hpp"

namespace ukgc {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

double loop_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(ScoreMatch, Basics) {
  const std::vector<double> zero(4, 0.0), e1{1, 0, 0, 0}, e2{0, 1, 0, 0};
  EXPECT_EQ(score_match(zero, e1), 0.0);
  EXPECT_EQ(score_match(e1, e1), 1.0);
  EXPECT_EQ(score_geo(e1, e2), 0.0);
  EXPECT_EQ(score_geo(e2, e2), 1.0);
  std::mt19937_64 gen(1);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_vector(32, gen), b = random_vector(32, gen);
    EXPECT_NEAR(score_match(a, b), loop_dot(a, b), 1e-12);
    EXPECT_NEAR(score_geo(a, b), loop_dot(a, b), 1e-12);
  }
}

TEST(ReferenceScore, Cases) {
  const std::vector<double> u{0.5, -1.0, 2.0};
  Matrix same(4, 3);
  for (std::size_t r = 0; r < 4; ++r) {
    same(r, 0) = 1.0;
    same(r, 1) = 2.0;
    same(r, 2) = 3.0;
  }
  EXPECT_NEAR(reference_score(u, same), 0.5 - 2.0 + 6.0, 1e-12);

  Matrix opposite(2, 3);
  for (std::size_t c = 0; c < 3; ++c) {
    opposite(0, c) = 1.0 + c;
    opposite(1, c) = -(1.0 + c);
  }
  EXPECT_EQ(reference_score(u, opposite), 0.0);

  std::mt19937_64 gen(2);
  Matrix pois(5, 3);
  for (double& v : pois.flat()) v = std::normal_distribution<double>()(gen);
  double avg = 0.0;
  for (std::size_t r = 0; r < 5; ++r) {
    avg += (u[0] * pois(r, 0) + u[1] * pois(r, 1) + u[2] * pois(r, 2)) / 5.0;
  }
  EXPECT_NEAR(reference_score(u, pois), avg, 1e-12);
}

TEST(Fuse, Cases) {
  EXPECT_EQ(fuse(3.7, 0.0), 0.0);
  EXPECT_NEAR(fuse(1.0, 40.0), 1.0, 1e-12);
  EXPECT_NEAR(fuse(2.0, 0.5), 0.924234315, 1e-9);
}

TEST(TieScore, Cases) {
  EXPECT_EQ(score_bundle(0.4, 1.3, 0.4).tie, 0.0);
  EXPECT_EQ(score_bundle(0.9, 0.0, 0.1).tie, 0.0);
  const ScoreBundle b = score_bundle(1.0, 2.0, 0.25);
  EXPECT_NEAR(b.tie, 0.7230207, 1e-7);
  EXPECT_NEAR(b.tie, 0.75 * std::tanh(2.0), 1e-15);
  EXPECT_NEAR(b.te - b.nde, b.tie, 1e-15);
  EXPECT_EQ(b.y_fused, 1.0 * std::tanh(2.0));
}

TEST(TieScore, ClosedFormMonotoneAndOdd) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double y_up = d(gen), ref = d(gen), y_ug = d(gen);
    const double tie = score_bundle(y_up, y_ug, ref).tie;
    EXPECT_NEAR(tie, (y_up - ref) * std::tanh(y_ug), 1e-10);
    EXPECT_EQ(score_bundle(y_up, -y_ug, ref).tie, -tie);
    if (y_ug > 0.01) EXPECT_GT(score_bundle(y_up + 0.1, y_ug, ref).tie, tie);
  }
}

TEST(TieScore, ReferenceShiftInvariance) {
  // Shifting every POI's match score by c shifts the reference by c too.
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double y_up = d(gen), ref = d(gen), y_ug = d(gen), c = d(gen);
    EXPECT_NEAR(score_bundle(y_up + c, y_ug, ref + c).tie, score_bundle(y_up, y_ug, ref).tie, 1e-9);
  }
}

TEST(TeScore, RankingEqualsFusedRanking) {
  std::mt19937_64 gen(5);
  FinalEmbeddings f;
  for (Matrix* m : {&f.user, &f.user_geo}) *m = Matrix(2, 4);
  for (Matrix* m : {&f.poi, &f.poi_geo}) *m = Matrix(10, 4);
  for (Matrix* m : {&f.user, &f.user_geo, &f.poi, &f.poi_geo}) {
    for (double& v : m->flat()) v = std::normal_distribution<double>()(gen);
  }
  for (std::size_t u = 0; u < 2; ++u) {
    std::vector<double> te(10), fused(10);
    for (std::size_t p = 0; p < 10; ++p) {
      te[p] = te_score(u, p, f);
      double y_up = 0.0, y_ug = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        y_up += f.user(u, c) * f.poi(p, c);
        y_ug += f.user_geo(u, c) * f.poi_geo(p, c);
      }
      fused[p] = y_up * std::tanh(y_ug);
    }
    auto order = [](const std::vector<double>& s) {
      std::vector<std::size_t> idx(s.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s[a] > s[b]; });
      return idx;
    };
    EXPECT_EQ(order(te), order(fused));
  }
}

}  // namespace
}  // namespace ukgc
