#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bae/proposals.hpp"

namespace bae {

struct TraceRow {
  Index sample = 0;
  KernelKind kind = KernelKind::random_walk;
  bool accepted = false;
  double log_likelihood = 0.0;  // untempered, of the state after the step
  double train_mse = 0.0;
  double test_mse = 0.0;
  double log_tau_sq = 0.0;
  double temperature = 1.0;
  Index ladder_slot = 0;  // position of this replica's temperature in the ladder
};

struct KernelCounters {
  std::array<std::uint64_t, kKernelKinds> proposed{};
  std::array<std::uint64_t, kKernelKinds> accepted{};
  std::uint64_t invalid = 0;  // proposals rejected for a non-finite posterior

  std::uint64_t total_proposed() const;
  std::uint64_t total_accepted() const;
  double acceptance_pct() const;
  double acceptance_pct(KernelKind kind) const;
  KernelCounters& operator+=(const KernelCounters& other);
};

struct ParamSnapshot {
  Index sample = 0;
  ModelState state;
};

struct ReplicaChain {
  Index replica_id = 0;
  double temperature = 1.0;
  std::vector<TraceRow> trace;
  std::vector<ParamSnapshot> snapshots;
  KernelCounters burn_in;
  KernelCounters post_burn_in;

  KernelCounters overall() const {
    KernelCounters c = burn_in;
    c += post_burn_in;
    return c;
  }
};

struct SamplerSettings {
  ProposalConfig proposal;
  Index switch_sample = 0;     // adapt-LG before, LG from here on; burn-in boundary
  Index thin = 1;              // keep a parameter snapshot every `thin` samples
  bool snapshot_burn_in = false;
  bool track_test_mse = true;
};

/// One Metropolis-Hastings chain. Owned by exactly one worker between swap
/// barriers; the coordinator only touches temperature and ladder slot.
class ReplicaSampler {
 public:
  ReplicaSampler(Index replica_id, ModelState initial, const Target& target,
                 SamplerSettings settings, std::uint64_t seed);

  struct StepResult {
    KernelKind kind;
    bool accepted;
    double log_alpha;
  };

  /// Propose, evaluate, accept or reject, record.
  StepResult mh_step(Index sample_index);

  /// Samples [first_sample, first_sample + n_steps).
  void run_segment(Index first_sample, Index n_steps);

  const ModelState& state() const { return state_; }
  double log_likelihood() const { return eval_.log_likelihood; }
  double log_prior() const { return eval_.log_prior; }
  double temperature() const { return chain_.temperature; }
  void set_temperature(double t) { chain_.temperature = t; }
  Index ladder_slot() const { return slot_; }
  void set_ladder_slot(Index slot) { slot_ = slot; }
  const AdamState& adam() const { return adam_; }

  const ReplicaChain& chain() const { return chain_; }
  ReplicaChain release_chain() { return std::move(chain_); }

 private:
  const Eigen::VectorXd& current_gradient();
  void record(Index sample_index, KernelKind kind, bool accepted);

  const Target* target_;
  SamplerSettings settings_;
  RandomStream rng_;
  ModelState state_;
  Evaluation eval_;
  double test_mse_;
  AdamState adam_;
  Index slot_ = 0;
  ReplicaChain chain_;
};

}  // namespace bae
