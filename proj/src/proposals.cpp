#include "bae/proposals.hpp"

#include <cmath>

#include "bae/errors.hpp"

namespace bae {
namespace {

void require_finite(const Eigen::VectorXd& grad) {
  if (!grad.allFinite()) throw NumericalError("non-finite loss gradient at the current state");
}

// theta* = mean + noise, log tau^2 random walk. Noise for theta is drawn
// before the tau^2 step so every kernel consumes the stream identically.
ModelState perturb(const Eigen::VectorXd& mean, double log_tau_sq, const ProposalConfig& cfg,
                   RandomStream& rng) {
  ModelState out;
  out.params.resize(mean.size());
  rng.fill_normal(out.params, cfg.step_sd);
  out.params += mean;
  out.log_tau_sq = log_tau_sq + cfg.tau_step_sd * rng.normal();
  return out;
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::random_walk:
      return "random_walk";
    case KernelKind::lg:
      return "lg";
    case KernelKind::adapt_lg:
      return "adapt_lg";
  }
  return "unknown";
}

void ProposalConfig::validate() const {
  if (!(step_sd > 0.0)) throw ConfigError("proposal.step_sd must be > 0");
  if (!(learn_rate > 0.0)) throw ConfigError("proposal.learn_rate must be > 0");
  if (!(tau_step_sd >= 0.0)) throw ConfigError("proposal.tau_step_sd must be >= 0");
  if (!(lg_rate >= 0.0 && lg_rate <= 1.0)) throw ConfigError("proposal.lg_rate must be in [0, 1]");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("proposal.adam_beta1 must be in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("proposal.adam_beta2 must be in (0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("proposal.adam_eps must be > 0");
}

ProposalOutcome propose_random_walk(const ModelState& state, const ProposalConfig& cfg,
                                    RandomStream& rng) {
  ProposalOutcome out;
  out.kind = KernelKind::random_walk;
  out.proposed_state = perturb(state.params, state.log_tau_sq, cfg, rng);
  out.log_q_ratio = 0.0;
  return out;
}

ProposalOutcome propose_lg(const ModelState& state, const Eigen::VectorXd& current_gradient,
                           const ProposalConfig& cfg, const Target& target, RandomStream& rng) {
  require_finite(current_gradient);
  const Eigen::VectorXd mean_fwd = state.params - cfg.learn_rate * current_gradient;

  ProposalOutcome out;
  out.kind = KernelKind::lg;
  out.proposed_state = perturb(mean_fwd, state.log_tau_sq, cfg, rng);
  out.proposed_eval = target.evaluate(out.proposed_state, true);

  const Eigen::VectorXd mean_rev =
      out.proposed_state.params - cfg.learn_rate * *out.proposed_eval->loss_gradient;
  out.log_q_ratio = log_q_ratio_gaussian(state.params, out.proposed_state.params, mean_fwd,
                                         mean_rev, cfg.step_sd);
  return out;
}

AdamStep adam_update(const Eigen::VectorXd& grad, const AdamState& adam, const ProposalConfig& cfg) {
  AdamStep out;
  const Index n = grad.size();
  const Eigen::VectorXd m_prev = adam.first_moment.size() == n ? adam.first_moment
                                                               : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd v_prev = adam.second_moment.size() == n ? adam.second_moment
                                                                : Eigen::VectorXd::Zero(n);
  out.state.step_count = adam.step_count + 1;
  out.state.first_moment = cfg.adam_beta1 * m_prev + (1.0 - cfg.adam_beta1) * grad;
  out.state.second_moment =
      cfg.adam_beta2 * v_prev + (1.0 - cfg.adam_beta2) * grad.array().square().matrix();

  const double k = static_cast<double>(out.state.step_count);
  const double correction =
      std::sqrt(1.0 - std::pow(cfg.adam_beta2, k)) / std::sqrt(1.0 - std::pow(cfg.adam_beta1, k));
  out.direction = correction * (out.state.first_moment.array() /
                                (out.state.second_moment.array().sqrt() + cfg.adam_eps))
                                   .matrix();
  return out;
}

std::pair<ProposalOutcome, AdamState> propose_adapt_lg(const ModelState& state,
                                                       const Eigen::VectorXd& current_gradient,
                                                       const AdamState& adam,
                                                       const ProposalConfig& cfg,
                                                       const Target& target, RandomStream& rng) {
  require_finite(current_gradient);
  AdamStep fwd = adam_update(current_gradient, adam, cfg);
  const Eigen::VectorXd mean_fwd = state.params - cfg.learn_rate * fwd.direction;

  ProposalOutcome out;
  out.kind = KernelKind::adapt_lg;
  out.proposed_state = perturb(mean_fwd, state.log_tau_sq, cfg, rng);
  out.proposed_eval = target.evaluate(out.proposed_state, true);

  const AdamStep rev = adam_update(*out.proposed_eval->loss_gradient, adam, cfg);
  const Eigen::VectorXd mean_rev = out.proposed_state.params - cfg.learn_rate * rev.direction;
  out.log_q_ratio = log_q_ratio_gaussian(state.params, out.proposed_state.params, mean_fwd,
                                         mean_rev, cfg.step_sd);
  return {std::move(out), std::move(fwd.state)};
}

KernelKind select_kernel(Index sample_index, Index r_switch, double lg_rate, RandomStream& rng) {
  const double u = rng.uniform();
  if (u >= lg_rate) return KernelKind::random_walk;
  return sample_index < r_switch ? KernelKind::adapt_lg : KernelKind::lg;
}

double log_q_ratio_gaussian(const Eigen::VectorXd& current, const Eigen::VectorXd& proposed,
                            const Eigen::VectorXd& mean_fwd, const Eigen::VectorXd& mean_rev,
                            double step_sd) {
  if (current.size() != proposed.size() || mean_fwd.size() != current.size() ||
      mean_rev.size() != current.size())
    throw std::invalid_argument("log_q_ratio_gaussian: vector lengths differ");
  return ((proposed - mean_fwd).squaredNorm() - (current - mean_rev).squaredNorm()) /
         (2.0 * step_sd * step_sd);
}

}  // namespace bae
