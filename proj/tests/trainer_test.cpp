#include <gtest/gtest.h>

#include "ukgc/synthgen.hpp"
#include "ukgc/trainer.hpp"

namespace ukgc {
namespace {

struct TrainSetup {
  City city;
  DatasetSplit split;
  ModelGraphs graphs;
  ModelDims dims;
  HyperParams hp;
};

TrainSetup small_setup(std::uint64_t seed = 0) {
  CityConfig cfg;
  cfg.n_users = 60;
  cfg.n_pois = 150;
  cfg.n_brands = 20;
  cfg.n_cate3 = 15;
  cfg.n_cate2 = 8;
  cfg.interactions_per_user = 10;
  cfg.seed = seed;
  TrainSetup s{generate_city(cfg), {}, {}, {}, {}};
  s.split = split_dataset(s.city.checkins, {}, seed);
  s.graphs = disentangled_graphs(s.city.kg);
  const auto [geo, func] = split_subgraphs(s.city.kg);
  s.dims = dims_for(geo, func, cfg.n_users, 8, 2, 2);
  s.hp.batch_size = 128;
  s.hp.lr = 1e-2;
  return s;
}

TEST(Fit, ZeroEpochsReturnsInitialParams) {
  TrainSetup s = small_setup();
  s.hp.max_epochs = 0;
  const FitResult r = fit(s.split, s.graphs, s.dims, s.hp, 4);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.params, init_params(s.dims, 4));
}

TEST(Fit, ConstantMetricStopsAfterPatiencePlusOne) {
  TrainSetup s = small_setup();
  s.hp.max_epochs = 100;
  FitOptions opts;
  opts.val_metric = [](const ModelParams&, std::size_t) { return 0.25; };
  const FitResult r = fit(s.split, s.graphs, s.dims, s.hp, 1, opts);
  EXPECT_EQ(r.log.size(), s.hp.patience + 1);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.best_epoch, 1u);
}

TEST(Fit, KeepsBestValidationParams) {
  TrainSetup s = small_setup();
  s.hp.max_epochs = 6;
  s.hp.patience = 3;
  FitOptions opts;
  std::vector<ModelParams> seen;
  opts.val_metric = [&](const ModelParams& p, std::size_t epoch) {
    seen.push_back(p);
    return epoch == 2 ? 1.0 : 0.0;
  };
  const FitResult r = fit(s.split, s.graphs, s.dims, s.hp, 1, opts);
  EXPECT_EQ(r.best_epoch, 2u);
  EXPECT_EQ(r.log.size(), 5u);
  EXPECT_EQ(r.params, seen[1]);
}

TEST(Fit, LossDecreasesAndRunIsDeterministic) {
  TrainSetup s = small_setup(2);
  s.hp.max_epochs = 5;
  s.hp.patience = 10;
  const FitResult a = fit(s.split, s.graphs, s.dims, s.hp, 9);
  const FitResult b = fit(s.split, s.graphs, s.dims, s.hp, 9);
  ASSERT_EQ(a.log.size(), 5u);
  EXPECT_LT(a.log[4].total, a.log[0].total);
  EXPECT_EQ(a.params, b.params);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].total, b.log[i].total);
    EXPECT_EQ(a.log[i].val_recall20, b.log[i].val_recall20);
  }
}

TEST(Fit, RejectsBadHyperParams) {
  TrainSetup s = small_setup();
  s.hp.lr = 0.0;
  EXPECT_THROW(fit(s.split, s.graphs, s.dims, s.hp, 0), Error);
  s.hp.lr = 1e-3;
  s.hp.patience = 0;
  EXPECT_THROW(fit(s.split, s.graphs, s.dims, s.hp, 0), Error);
}

TEST(Fit, DivergenceIsReported) {
  TrainSetup s = small_setup();
  s.hp.max_epochs = 50;
  s.hp.lr = 1e4;
  s.hp.lambda_reg = 0.0;
  try {
    fit(s.split, s.graphs, s.dims, s.hp, 0);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::DivergedLoss || e.code() == ErrorCode::NonFiniteGradient);
  }
}

}  // namespace
}  // namespace ukgc
