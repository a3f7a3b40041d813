#include "bae/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace bae {

std::optional<double> gelman_rubin(const Eigen::MatrixXd& draws) {
  const Index n = draws.rows();
  const Index m = draws.cols();
  if (m < 2) throw std::invalid_argument("gelman_rubin: need at least 2 chains");
  if (n < 2) throw std::invalid_argument("gelman_rubin: need at least 2 samples per chain");

  const Eigen::RowVectorXd means = draws.colwise().mean();
  const Eigen::MatrixXd centred = draws.rowwise() - means;
  const double within =
      centred.colwise().squaredNorm().sum() / (static_cast<double>(m) * static_cast<double>(n - 1));
  if (!(within > 0.0)) return std::nullopt;

  const double grand = means.mean();
  const double between_over_n =
      (means.array() - grand).square().sum() / static_cast<double>(m - 1);
  const double dn = static_cast<double>(n);
  const double pooled = (dn - 1.0) / dn * within + between_over_n;
  return std::sqrt(pooled / within);
}

std::vector<std::vector<ModelState>> posterior_chains(const EnsembleResult& result) {
  std::vector<std::vector<ModelState>> chains;
  for (const auto& chain : result.chains) {
    std::vector<ModelState> states;
    for (const auto& snap : chain.snapshots)
      if (snap.sample >= result.switch_sample) states.push_back(snap.state);
    chains.push_back(std::move(states));
  }
  std::size_t shortest = chains.empty() ? 0 : chains.front().size();
  for (const auto& c : chains) shortest = std::min(shortest, c.size());
  for (auto& c : chains) c.resize(shortest);
  return chains;
}

RHatReport rhat_report(const std::vector<std::vector<ModelState>>& chains,
                       const std::vector<Index>& parameter_ids) {
  RHatReport report;
  report.n_chains = static_cast<Index>(chains.size());
  if (chains.empty()) throw std::invalid_argument("rhat_report: no chains");
  const auto n = chains.front().size();
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("rhat_report: chains differ in length");
  report.n_samples_per_chain = static_cast<Index>(n);
  if (n < 10 && !parameter_ids.empty())
    throw std::invalid_argument("rhat_report: need at least 10 post-burn-in samples per chain, have " +
                                std::to_string(n));
  const Index dim = n == 0 ? 0 : chains.front().front().params.size();

  for (const Index id : parameter_ids) {
    if (id < 0 || id >= dim)
      throw std::out_of_range("parameter id " + std::to_string(id) + " out of range (L = " +
                              std::to_string(dim) + ")");
  }
  for (const Index id : parameter_ids) {
    Eigen::MatrixXd draws(static_cast<Index>(n), report.n_chains);
    for (Index c = 0; c < report.n_chains; ++c)
      for (std::size_t s = 0; s < n; ++s)
        draws(static_cast<Index>(s), c) = chains[static_cast<std::size_t>(c)][s].params[id];
    report.entries.push_back({id, gelman_rubin(draws)});
  }
  return report;
}

MseStats mse_stats(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mse_stats: no values");
  MseStats s;
  s.best = *std::min_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

PosteriorSummary summarize(const std::vector<ModelState>& posterior, const Topology& topology,
                           const PriorConfig& prior, const Eigen::MatrixXd& train,
                           const Eigen::MatrixXd& test) {
  if (posterior.empty()) throw std::invalid_argument("summarize: empty posterior");
  PosteriorSummary out;
  out.map_log_posterior = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const auto& state = posterior[i];
    const double sse = loss<double>(topology, state.params, train);
    out.train_mse.push_back(sse / static_cast<double>(train.size()));
    out.test_mse.push_back(test.size() ? mse<double>(topology, state.params, test)
                                       : std::numeric_limits<double>::quiet_NaN());
    const double lp = log_likelihood_from_sse(sse, train.size(), state.log_tau_sq) +
                      log_prior(state, prior);
    if (lp > out.map_log_posterior) {
      out.map_log_posterior = lp;
      out.map_index = static_cast<Index>(i);
    }
  }
  out.map_state = posterior[static_cast<std::size_t>(out.map_index)];
  out.train = mse_stats(out.train_mse);
  if (test.size()) out.test = mse_stats(out.test_mse);
  return out;
}

void attach_run_stats(PosteriorSummary& summary, const EnsembleResult& result) {
  summary.acceptance_pct = result.counters(true).acceptance_pct();
  KernelCounters all = result.counters(false);
  all += result.counters(true);
  summary.acceptance_pct_all = all.acceptance_pct();
  summary.swap_pct = result.swap_pct();
  summary.wall_minutes = result.wall_time.count() / 60.0;
}

ReducedEnsemble reduce_ensemble(const std::vector<ModelState>& posterior, const Eigen::MatrixXd& data,
                                const Topology& topology, Index max_members) {
  if (posterior.empty()) throw std::invalid_argument("reduce_ensemble: empty posterior");
  if (max_members < 1) throw std::invalid_argument("reduce_ensemble: max_members must be >= 1");
  const auto total = static_cast<Index>(posterior.size());
  const Index count = std::min(total, max_members);

  ReducedEnsemble out;
  for (Index i = 0; i < count; ++i) {
    // Evenly spaced, always including the last sample.
    const Index idx = count == 1 ? total - 1 : (i * (total - 1)) / (count - 1);
    out.member_indices.push_back(idx);
    out.members.push_back(
        encode<double>(topology, posterior[static_cast<std::size_t>(idx)].params, data));
  }
  const auto& first = out.members.front();
  out.mean = Eigen::MatrixXd::Zero(first.rows(), first.cols());
  for (const auto& m : out.members) out.mean += m;
  out.mean /= static_cast<double>(count);
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(first.rows(), first.cols());
  for (const auto& m : out.members) var += (m - out.mean).array().square().matrix();
  out.sd = (var / static_cast<double>(count)).array().sqrt().matrix();
  return out;
}

double knn_classify(const Eigen::MatrixXd& train_features, const Eigen::VectorXi& train_labels,
                    const Eigen::MatrixXd& test_features, const Eigen::VectorXi& test_labels,
                    Index k) {
  if (k < 1) throw std::invalid_argument("knn_classify: k must be >= 1");
  if (train_features.rows() == 0) throw std::invalid_argument("knn_classify: empty training set");
  if (train_labels.size() != train_features.rows() || test_labels.size() != test_features.rows())
    throw std::invalid_argument("knn_classify: label count does not match rows");
  if (train_features.cols() != test_features.cols())
    throw std::invalid_argument("knn_classify: feature dimensions differ");
  if (test_features.rows() == 0) return 0.0;

  const Index n_train = train_features.rows();
  const Index kk = std::min(k, n_train);
  Index correct = 0;
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n_train));
  for (Index t = 0; t < test_features.rows(); ++t) {
    const Eigen::RowVectorXd x = test_features.row(t);
    for (Index i = 0; i < n_train; ++i) {
      const double d2 = (train_features.row(i) - x).squaredNorm();
      dist[static_cast<std::size_t>(i)] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::map<int, std::pair<Index, double>> votes;  // label -> (count, summed distance)
    for (Index j = 0; j < kk; ++j) {
      const auto& [d2, i] = dist[static_cast<std::size_t>(j)];
      auto& v = votes[train_labels[i]];
      v.first++;
      v.second += std::sqrt(d2);
    }
    int best_label = votes.begin()->first;
    auto best = votes.begin()->second;
    for (const auto& [label, v] : votes) {
      if (v.first > best.first || (v.first == best.first && v.second < best.second)) {
        best_label = label;
        best = v;
      }
    }
    correct += best_label == test_labels[t];
  }
  return static_cast<double>(correct) / static_cast<double>(test_features.rows());
}

}  // namespace bae
