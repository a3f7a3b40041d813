#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bae/diagnostics.hpp"

using namespace bae;

namespace {

std::vector<ModelState> random_states(const Topology& t, int count, std::mt19937_64& rng) {
  std::vector<ModelState> out;
  std::normal_distribution<double> n(0, 0.3);
  for (int i = 0; i < count; ++i) out.push_back({init_params(t, 1.0, rng), n(rng)});
  return out;
}

Eigen::MatrixXd uniform_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd x(rows, cols);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

}  // namespace

TEST(GelmanRubin, TwoIdenticalChains) {
  Eigen::MatrixXd d(4, 2);
  d << 1, 1, 2, 2, 3, 3, 4, 4;
  ASSERT_TRUE(gelman_rubin(d).has_value());
  EXPECT_NEAR(*gelman_rubin(d), std::sqrt(0.75), 1e-12);
}

TEST(GelmanRubin, IndependentChainsFromOneNormal) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(3.0, 2.0);
  int inside = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd d(10000, 4);
    for (Index i = 0; i < d.size(); ++i) d.data()[i] = n(rng);
    const double r = *gelman_rubin(d);
    inside += r >= 0.99 && r <= 1.01;
  }
  EXPECT_EQ(inside, 20);
}

TEST(GelmanRubin, SeparatedChainsAreFlagged) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd d(500, 3);
  for (Index i = 0; i < d.size(); ++i) d.data()[i] = n(rng);
  d.col(2).array() += 5.0;
  EXPECT_GT(*gelman_rubin(d), 2.0);
}

TEST(GelmanRubin, ConstantChainsAreDegenerate) {
  EXPECT_FALSE(gelman_rubin(Eigen::MatrixXd::Constant(20, 3, 1.5)).has_value());
  Eigen::MatrixXd d(20, 2);
  d.col(0).setConstant(1.0);
  d.col(1).setConstant(2.0);
  EXPECT_FALSE(gelman_rubin(d).has_value());
}

TEST(GelmanRubin, AffineInvariant) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd d(50, 3);
  for (Index i = 0; i < d.size(); ++i) d.data()[i] = n(rng);
  d.col(1).array() += 0.4;
  const Eigen::MatrixXd shifted = (-7.0 * d).array() + 11.0;
  EXPECT_NEAR(*gelman_rubin(d), *gelman_rubin(shifted), 1e-12);
}

TEST(GelmanRubin, RejectsTooFewChainsOrSamples) {
  EXPECT_THROW(gelman_rubin(Eigen::MatrixXd::Zero(50, 1)), std::invalid_argument);
  EXPECT_THROW(gelman_rubin(Eigen::MatrixXd::Zero(1, 4)), std::invalid_argument);
}

TEST(RHatReport, SelectsParametersAndValidates) {
  std::vector<std::vector<ModelState>> chains(3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& c : chains)
    for (int i = 0; i < 40; ++i) c.push_back({Eigen::Vector3d(n(rng), 2.0, n(rng)), 0.0});
  const auto report = rhat_report(chains, {0, 1, 2});
  ASSERT_EQ(report.entries.size(), 3u);
  EXPECT_EQ(report.n_chains, 3);
  EXPECT_EQ(report.n_samples_per_chain, 40);
  EXPECT_TRUE(report.entries[0].r_hat.has_value());
  EXPECT_FALSE(report.entries[1].r_hat.has_value());

  Eigen::MatrixXd col(40, 3);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 40; ++i) col(i, c) = chains[c][i].params[2];
  EXPECT_EQ(*report.entries[2].r_hat, *gelman_rubin(col));

  EXPECT_THROW(rhat_report(chains, {3}), std::out_of_range);
  for (auto& c : chains) c.resize(9);
  EXPECT_THROW(rhat_report(chains, {0}), std::invalid_argument);
  EXPECT_NO_THROW(rhat_report(chains, {}));
  chains[0].pop_back();
  EXPECT_THROW(rhat_report(chains, {}), std::invalid_argument);
}

TEST(MseStats, BestMeanStd) {
  const auto s = mse_stats({0.3, 0.1, 0.2});
  EXPECT_EQ(s.best, 0.1);
  EXPECT_NEAR(s.mean, 0.2, 1e-15);
  EXPECT_NEAR(s.std, 0.1, 1e-15);
  EXPECT_EQ(mse_stats({0.5}).std, 0.0);
  EXPECT_THROW(mse_stats({}), std::invalid_argument);
}

TEST(Summarize, BestIsMinimumAndMapIsArgmax) {
  const auto t = Topology::from_sizes({4, 2, 4});
  std::mt19937_64 rng(12);
  const auto train = uniform_matrix(20, 4, rng);
  const auto test = uniform_matrix(8, 4, rng);
  const auto posterior = random_states(t, 30, rng);
  const PriorConfig prior;
  const auto s = summarize(posterior, t, prior, train, test);

  ASSERT_EQ(s.train_mse.size(), 30u);
  double best_test = 1e300, best_lp = -1e300;
  Index argmax = -1;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    EXPECT_NEAR(s.train_mse[i], mse<double>(t, posterior[i].params, train), 1e-15);
    best_test = std::min(best_test, mse<double>(t, posterior[i].params, test));
    const double lp = log_likelihood(posterior[i], train, t) + log_prior(posterior[i], prior);
    if (lp > best_lp) {
      best_lp = lp;
      argmax = static_cast<Index>(i);
    }
  }
  EXPECT_EQ(s.test.best, best_test);
  EXPECT_LE(s.train.best, s.train.mean);
  EXPECT_EQ(s.map_index, argmax);
  EXPECT_EQ(s.map_state, posterior[static_cast<std::size_t>(argmax)]);
  EXPECT_NEAR(s.map_log_posterior, best_lp, 1e-9);
  EXPECT_THROW(summarize({}, t, prior, train, test), std::invalid_argument);
}

TEST(ReduceEnsemble, MeanAndSdOverMembers) {
  const auto t = Topology::from_sizes({5, 3, 2, 3, 5});
  std::mt19937_64 rng(13);
  const auto data = uniform_matrix(12, 5, rng);
  const auto posterior = random_states(t, 10, rng);
  const auto r = reduce_ensemble(posterior, data, t, 4);

  EXPECT_EQ(r.member_indices, (std::vector<Index>{0, 3, 6, 9}));
  ASSERT_EQ(r.members.size(), 4u);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(12, 2), sq = sum;
  for (std::size_t i = 0; i < 4; ++i) {
    const Eigen::MatrixXd z = encode<double>(t, posterior[static_cast<std::size_t>(r.member_indices[i])].params, data);
    EXPECT_EQ(r.members[i], z);
    sum += z;
    sq += z.cwiseProduct(z);
  }
  const Eigen::MatrixXd mean = sum / 4.0;
  EXPECT_LT((r.mean - mean).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::MatrixXd var = sq / 4.0 - mean.cwiseProduct(mean);
  EXPECT_LT((r.sd - var.cwiseMax(0.0).cwiseSqrt()).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_TRUE((r.sd.array() >= 0).all());
}

TEST(ReduceEnsemble, SingleMemberOrIdenticalMembersHaveZeroSd) {
  const auto t = Topology::from_sizes({3, 2, 3});
  std::mt19937_64 rng(14);
  const auto data = uniform_matrix(6, 3, rng);
  const auto posterior = random_states(t, 5, rng);
  const auto one = reduce_ensemble(posterior, data, t, 1);
  EXPECT_EQ(one.member_indices, std::vector<Index>{4});
  EXPECT_TRUE((one.sd.array() == 0).all());

  const std::vector<ModelState> same(6, posterior[0]);
  EXPECT_LT(reduce_ensemble(same, data, t, 100).sd.maxCoeff(), 1e-12);
  EXPECT_EQ(reduce_ensemble(same, data, t, 100).members.size(), 6u);
  EXPECT_THROW(reduce_ensemble(posterior, data, t, 0), std::invalid_argument);
}

TEST(Knn, HandExample) {
  Eigen::MatrixXd train(6, 1);
  train << 0, 1, 2, 10, 11, 12;
  Eigen::VectorXi labels(6);
  labels << 0, 0, 0, 1, 1, 1;
  Eigen::MatrixXd test(3, 1);
  test << 0.5, 11.5, 5.5;
  Eigen::VectorXi truth(3);
  truth << 0, 1, 0;
  EXPECT_NEAR(knn_classify(train, labels, test, truth, 3), 1.0, 1e-15);
  // 5.5 is 3.5 from 2 and 4.5 from 10: with k = 2 the vote ties 1-1 and the
  // nearer label wins.
  EXPECT_NEAR(knn_classify(train, labels, test, truth, 2), 1.0, 1e-15);
  truth << 1, 1, 1;
  EXPECT_NEAR(knn_classify(train, labels, test, truth, 1), 1.0 / 3.0, 1e-15);
  // k beyond the training set votes 3-3 everywhere; summed distance decides.
  EXPECT_NEAR(knn_classify(train, labels, test, truth, 100), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(knn_classify(train, labels, test, truth, 0), std::invalid_argument);
}

TEST(Knn, InvariantUnderTrainingRowPermutation) {
  std::mt19937_64 rng(15);
  const auto train = uniform_matrix(60, 3, rng);
  const auto test = uniform_matrix(25, 3, rng);
  Eigen::VectorXi labels(60), truth(25);
  for (Index i = 0; i < 60; ++i) labels[i] = train(i, 0) + train(i, 1) > 1.0;
  for (Index i = 0; i < 25; ++i) truth[i] = test(i, 0) + test(i, 1) > 1.0;
  const double base = knn_classify(train, labels, test, truth, 5);
  EXPECT_GT(base, 0.7);

  std::vector<Index> order(60);
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd tp(60, 3);
    Eigen::VectorXi lp(60);
    for (Index i = 0; i < 60; ++i) {
      tp.row(i) = train.row(order[i]);
      lp[i] = labels[order[i]];
    }
    EXPECT_EQ(knn_classify(tp, lp, test, truth, 5), base);
  }
}
