#pragma once

#include <limits>
#include <optional>

#include "bae/autoencoder.hpp"
#include "bae/bayes_model.hpp"

namespace bae {

struct Evaluation {
  double log_likelihood = 0.0;  // untempered
  double log_prior = 0.0;
  double train_mse = std::numeric_limits<double>::quiet_NaN();
  /// Gradient of the data-fit loss E(theta), present when requested.
  std::optional<Eigen::VectorXd> loss_gradient;

  bool finite() const { return std::isfinite(log_likelihood) && std::isfinite(log_prior); }
};

/// Posterior the replica sampler draws from. Implementations must be safe
/// to call concurrently (they are evaluated from every replica worker).
class Target {
 public:
  virtual ~Target() = default;

  virtual Index dimension() const = 0;
  virtual Evaluation evaluate(const ModelState& state, bool with_gradient) const = 0;
  virtual double test_mse(const ModelState&) const {
    return std::numeric_limits<double>::quiet_NaN();
  }
  /// Starting log tau^2 for a chain beginning at `params`.
  virtual double initial_log_tau_sq(const Eigen::VectorXd&) const { return 0.0; }
};

/// Bayesian autoencoder posterior over (theta, log tau^2) on a training set.
class AutoencoderTarget final : public Target {
 public:
  AutoencoderTarget(Topology topology, PriorConfig prior, Eigen::MatrixXd train,
                    std::optional<Eigen::MatrixXd> test = std::nullopt);

  Index dimension() const override { return total_params(topology_); }
  Evaluation evaluate(const ModelState& state, bool with_gradient) const override;
  double test_mse(const ModelState& state) const override;
  /// log of the reconstruction MSE at `params`.
  double initial_log_tau_sq(const Eigen::VectorXd& params) const override;

  const Topology& topology() const { return topology_; }
  const PriorConfig& prior() const { return prior_; }
  const Eigen::MatrixXd& train() const { return train_; }

 private:
  Topology topology_;
  PriorConfig prior_;
  Eigen::MatrixXd train_;
  std::optional<Eigen::MatrixXd> test_;
};

}  // namespace bae
