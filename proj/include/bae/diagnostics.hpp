#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bae/autoencoder.hpp"
#include "bae/bayes_model.hpp"
#include "bae/tempering.hpp"

namespace bae {

/// Potential scale reduction of Gelman & Rubin (1992) for one scalar.
/// `draws` holds one chain per column (n samples x m chains, m >= 2, n >= 2).
/// Returns nullopt when the within-chain variance is zero (degenerate).
std::optional<double> gelman_rubin(const Eigen::MatrixXd& draws);

struct RHatEntry {
  Index parameter_id = 0;
  std::optional<double> r_hat;  // nullopt: degenerate (all chains constant)
};

struct RHatReport {
  std::vector<RHatEntry> entries;
  Index n_chains = 0;
  Index n_samples_per_chain = 0;
};

/// Post-burn-in snapshots of each chain, trimmed to the shortest chain.
std::vector<std::vector<ModelState>> posterior_chains(const EnsembleResult& result);

/// R-hat for each flat parameter index across `chains`.
/// Throws std::out_of_range for an id >= L and std::invalid_argument when
/// the chains hold fewer than 10 samples.
RHatReport rhat_report(const std::vector<std::vector<ModelState>>& chains,
                       const std::vector<Index>& parameter_ids);

struct MseStats {
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single sample
};

MseStats mse_stats(const std::vector<double>& values);

struct PosteriorSummary {
  MseStats train;
  MseStats test;
  std::vector<double> train_mse;  // per posterior sample
  std::vector<double> test_mse;
  ModelState map_state;
  double map_log_posterior = 0.0;  // untempered log_likelihood + log_prior
  Index map_index = 0;
  double acceptance_pct = 0.0;          // post-burn-in
  double acceptance_pct_all = 0.0;      // including burn-in
  double swap_pct = 0.0;
  double wall_minutes = 0.0;
};

/// Per-sample train/test MSE (best = min, mean, std) and the MAP sample.
/// Throws std::invalid_argument for an empty posterior.
PosteriorSummary summarize(const std::vector<ModelState>& posterior, const Topology& topology,
                           const PriorConfig& prior, const Eigen::MatrixXd& train,
                           const Eigen::MatrixXd& test);

/// Adds acceptance, swap and timing figures from a finished run.
void attach_run_stats(PosteriorSummary& summary, const EnsembleResult& result);

struct ReducedEnsemble {
  std::vector<Eigen::MatrixXd> members;  // each n_instances x d_latent
  Eigen::MatrixXd mean;
  Eigen::MatrixXd sd;  // population sd over members
  std::vector<Index> member_indices;  // posterior positions used
};

/// Encodes `data` with up to max_members posterior samples, evenly spaced
/// over the posterior, and forms per-cell mean and sd.
ReducedEnsemble reduce_ensemble(const std::vector<ModelState>& posterior, const Eigen::MatrixXd& data,
                                const Topology& topology, Index max_members);

/// Euclidean k-nearest-neighbour majority vote; ties go to the label with the
/// smallest summed distance. Returns the fraction of test rows labelled
/// correctly.
double knn_classify(const Eigen::MatrixXd& train_features, const Eigen::VectorXi& train_labels,
                    const Eigen::MatrixXd& test_features, const Eigen::VectorXi& test_labels,
                    Index k);

}  // namespace bae
