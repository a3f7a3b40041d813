#include "bae/replica.hpp"

#include <cmath>
#include <limits>

#include "bae/errors.hpp"

namespace bae {

std::uint64_t KernelCounters::total_proposed() const {
  return proposed[0] + proposed[1] + proposed[2];
}

std::uint64_t KernelCounters::total_accepted() const {
  return accepted[0] + accepted[1] + accepted[2];
}

double KernelCounters::acceptance_pct() const {
  const auto n = total_proposed();
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(total_accepted()) / static_cast<double>(n);
}

double KernelCounters::acceptance_pct(KernelKind kind) const {
  const auto k = static_cast<std::size_t>(kind);
  return proposed[k] == 0 ? 0.0
                          : 100.0 * static_cast<double>(accepted[k]) /
                                static_cast<double>(proposed[k]);
}

KernelCounters& KernelCounters::operator+=(const KernelCounters& other) {
  for (std::size_t k = 0; k < proposed.size(); ++k) {
    proposed[k] += other.proposed[k];
    accepted[k] += other.accepted[k];
  }
  invalid += other.invalid;
  return *this;
}

ReplicaSampler::ReplicaSampler(Index replica_id, ModelState initial, const Target& target,
                               SamplerSettings settings, std::uint64_t seed)
    : target_(&target),
      settings_(settings),
      rng_(seed),
      state_(std::move(initial)),
      adam_(AdamState::zeros(state_.params.size())) {
  settings_.proposal.validate();
  if (settings_.thin < 1) throw ConfigError("thinning interval must be >= 1");
  if (state_.params.size() != target.dimension())
    throw std::invalid_argument("initial state has the wrong dimension");
  eval_ = target_->evaluate(state_, false);
  if (!eval_.finite()) throw NumericalError("initial state has a non-finite posterior");
  test_mse_ = settings_.track_test_mse ? target_->test_mse(state_)
                                       : std::numeric_limits<double>::quiet_NaN();
  chain_.replica_id = replica_id;
}

const Eigen::VectorXd& ReplicaSampler::current_gradient() {
  if (!eval_.loss_gradient) eval_ = target_->evaluate(state_, true);
  return *eval_.loss_gradient;
}

ReplicaSampler::StepResult ReplicaSampler::mh_step(Index sample_index) {
  const auto& pcfg = settings_.proposal;
  const KernelKind kind =
      select_kernel(sample_index, settings_.switch_sample, pcfg.lg_rate, rng_);

  ProposalOutcome outcome;
  std::optional<AdamState> next_adam;
  switch (kind) {
    case KernelKind::random_walk:
      outcome = propose_random_walk(state_, pcfg, rng_);
      break;
    case KernelKind::lg:
      outcome = propose_lg(state_, current_gradient(), pcfg, *target_, rng_);
      break;
    case KernelKind::adapt_lg: {
      auto [o, a] = propose_adapt_lg(state_, current_gradient(), adam_, pcfg, *target_, rng_);
      outcome = std::move(o);
      next_adam = std::move(a);
      break;
    }
  }
  if (next_adam) adam_ = std::move(*next_adam);

  Evaluation proposed = outcome.proposed_eval ? std::move(*outcome.proposed_eval)
                                              : target_->evaluate(outcome.proposed_state, false);
  const double t = chain_.temperature;
  const double log_alpha =
      tempered_log_posterior(proposed.log_likelihood, proposed.log_prior, t) -
      tempered_log_posterior(eval_.log_likelihood, eval_.log_prior, t) + outcome.log_q_ratio;

  // One uniform per step regardless of outcome keeps streams aligned.
  const double u = rng_.uniform();
  const bool valid = proposed.finite() && std::isfinite(log_alpha);
  const bool accepted = valid && std::log(u) < std::min(0.0, log_alpha);

  auto& counters =
      sample_index < settings_.switch_sample ? chain_.burn_in : chain_.post_burn_in;
  counters.proposed[static_cast<std::size_t>(kind)]++;
  if (!valid) counters.invalid++;
  if (accepted) {
    counters.accepted[static_cast<std::size_t>(kind)]++;
    state_ = std::move(outcome.proposed_state);
    eval_ = std::move(proposed);
    if (settings_.track_test_mse) test_mse_ = target_->test_mse(state_);
  }
  record(sample_index, kind, accepted);
  return {kind, accepted, log_alpha};
}

void ReplicaSampler::run_segment(Index first_sample, Index n_steps) {
  if (n_steps < 1) throw std::invalid_argument("run_segment: n_steps must be >= 1");
  for (Index s = first_sample; s < first_sample + n_steps; ++s) mh_step(s);
}

void ReplicaSampler::record(Index sample_index, KernelKind kind, bool accepted) {
  chain_.trace.push_back({sample_index, kind, accepted, eval_.log_likelihood, eval_.train_mse,
                          test_mse_, state_.log_tau_sq, chain_.temperature, slot_});
  const bool keep_phase = settings_.snapshot_burn_in || sample_index >= settings_.switch_sample;
  if (keep_phase && sample_index % settings_.thin == 0)
    chain_.snapshots.push_back({sample_index, state_});
}

}  // namespace bae
