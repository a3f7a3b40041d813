#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "bae/bayes_model.hpp"
#include "bae/random.hpp"
#include "bae/target.hpp"

namespace bae {

enum class KernelKind : int { random_walk = 0, lg = 1, adapt_lg = 2 };
inline constexpr int kKernelKinds = 3;

std::string_view to_string(KernelKind kind);

struct ProposalConfig {
  double step_sd = 0.005;      // Gaussian noise sd on theta
  double learn_rate = 0.01;    // drift scale on the loss gradient
  double tau_step_sd = 0.01;   // random-walk sd on log tau^2
  double lg_rate = 0.75;       // probability a proposal is gradient-based
  double adam_beta1 = 0.99;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;  // throws ConfigError
};

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t step_count = 0;

  static AdamState zeros(Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
  }
};

struct ProposalOutcome {
  ModelState proposed_state;
  KernelKind kind = KernelKind::random_walk;
  /// log Q(current | proposed) - log Q(proposed | current).
  double log_q_ratio = 0.0;
  /// Evaluation of the proposed state when the kernel already needed it.
  std::optional<Evaluation> proposed_eval;
};

/// theta + N(0, step_sd^2 I), log tau^2 + N(0, tau_step_sd^2). Symmetric.
ProposalOutcome propose_random_walk(const ModelState& state, const ProposalConfig& cfg,
                                    RandomStream& rng);

/// Langevin-gradient proposal: theta* ~ N(theta - learn_rate * grad E(theta), step_sd^2 I).
/// `current_gradient` is grad E at `state`. The proposed state is evaluated
/// (with gradient) to form the reverse mean.
ProposalOutcome propose_lg(const ModelState& state, const Eigen::VectorXd& current_gradient,
                           const ProposalConfig& cfg, const Target& target, RandomStream& rng);

struct AdamStep {
  Eigen::VectorXd direction;  // bias-corrected, variance-normalised gradient
  AdamState state;            // advanced by one step
};

AdamStep adam_update(const Eigen::VectorXd& grad, const AdamState& adam, const ProposalConfig& cfg);

/// Adam-adaptive Langevin proposal. The forward and reverse means both use
/// the pre-call AdamState; the returned AdamState is advanced once with the
/// gradient at the current state.
std::pair<ProposalOutcome, AdamState> propose_adapt_lg(const ModelState& state,
                                                       const Eigen::VectorXd& current_gradient,
                                                       const AdamState& adam,
                                                       const ProposalConfig& cfg,
                                                       const Target& target, RandomStream& rng);

/// random_walk with probability 1 - lg_rate; otherwise adapt_lg before
/// `r_switch` and lg from then on. Always consumes exactly one uniform.
KernelKind select_kernel(Index sample_index, Index r_switch, double lg_rate, RandomStream& rng);

/// (|proposed - mean_fwd|^2 - |current - mean_rev|^2) / (2 step_sd^2).
double log_q_ratio_gaussian(const Eigen::VectorXd& current, const Eigen::VectorXd& proposed,
                            const Eigen::VectorXd& mean_fwd, const Eigen::VectorXd& mean_rev,
                            double step_sd);

}  // namespace bae
