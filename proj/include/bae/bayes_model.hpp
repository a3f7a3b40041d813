#pragma once

#include "bae/autoencoder.hpp"
#include "bae/dataset.hpp"
#include "bae/types.hpp"

namespace bae {

/// Full MCMC state of one replica: network parameters and log tau^2.
struct ModelState {
  Eigen::VectorXd params;
  double log_tau_sq = 0.0;

  double tau_sq() const { return std::exp(log_tau_sq); }
  bool operator==(const ModelState& other) const {
    return log_tau_sq == other.log_tau_sq && params.size() == other.params.size() &&
           params == other.params;
  }
};

/// Gaussian(0, sigma_sq) prior on every parameter, inverse-gamma(nu_1, nu_2)
/// on tau^2.
struct PriorConfig {
  double sigma_sq = 25.0;
  double nu_1 = 0.0;
  double nu_2 = 3.0;

  void validate() const;  // throws ConfigError
};

/// Gaussian log-likelihood of n_entries residuals with total squared error
/// `sse`: -(n/2) log(2 pi tau^2) - sse / (2 tau^2).
double log_likelihood_from_sse(double sse, Index n_entries, double log_tau_sq);

/// Log-likelihood of the reconstruction of every entry of `data`.
/// Throws NumericalError if the reconstruction is not finite.
double log_likelihood(const ModelState& state, const Eigen::MatrixXd& data,
                      const Topology& topology);
double log_likelihood(const ModelState& state, const Dataset& dataset, const Topology& topology);

/// -(L/2) log(2 pi sigma^2) - |theta|^2 / (2 sigma^2) - (1 + nu_1) log tau^2 - nu_2 / tau^2.
/// The inverse-gamma normalising constant is omitted.
double log_prior(const ModelState& state, const PriorConfig& prior);

/// log_likelihood / temperature + log_prior. The prior is never tempered.
double tempered_log_posterior(double log_lik, double log_prior_value, double temperature);
double tempered_log_posterior(const ModelState& state, const Dataset& dataset,
                              const Topology& topology, const PriorConfig& prior,
                              double temperature);

}  // namespace bae
