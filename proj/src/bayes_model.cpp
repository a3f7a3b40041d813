#include "bae/bayes_model.hpp"

#include <cmath>
#include <numbers>

#include "bae/errors.hpp"

namespace bae {

void PriorConfig::validate() const {
  if (!(sigma_sq > 0.0)) throw ConfigError("prior.sigma_sq must be > 0");
  if (!(nu_2 > 0.0)) throw ConfigError("prior.nu_2 must be > 0");
  if (!std::isfinite(nu_1)) throw ConfigError("prior.nu_1 must be finite");
}

double log_likelihood_from_sse(double sse, Index n_entries, double log_tau_sq) {
  const double n = static_cast<double>(n_entries);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi) + log_tau_sq) -
         0.5 * sse * std::exp(-log_tau_sq);
}

double log_likelihood(const ModelState& state, const Eigen::MatrixXd& data,
                      const Topology& topology) {
  const double sse = loss<double>(topology, state.params, data);
  if (!std::isfinite(sse)) throw NumericalError("non-finite reconstruction");
  return log_likelihood_from_sse(sse, data.size(), state.log_tau_sq);
}

double log_likelihood(const ModelState& state, const Dataset& dataset, const Topology& topology) {
  return log_likelihood(state, dataset.features, topology);
}

double log_prior(const ModelState& state, const PriorConfig& prior) {
  const double L = static_cast<double>(state.params.size());
  return -0.5 * L * std::log(2.0 * std::numbers::pi * prior.sigma_sq) -
         0.5 * state.params.squaredNorm() / prior.sigma_sq -
         (1.0 + prior.nu_1) * state.log_tau_sq - prior.nu_2 * std::exp(-state.log_tau_sq);
}

double tempered_log_posterior(double log_lik, double log_prior_value, double temperature) {
  return log_lik / temperature + log_prior_value;
}

double tempered_log_posterior(const ModelState& state, const Dataset& dataset,
                              const Topology& topology, const PriorConfig& prior,
                              double temperature) {
  if (temperature < 1.0) throw std::invalid_argument("temperature must be >= 1");
  return tempered_log_posterior(log_likelihood(state, dataset, topology), log_prior(state, prior),
                                temperature);
}

}  // namespace bae
