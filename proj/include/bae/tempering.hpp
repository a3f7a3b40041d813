#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bae/replica.hpp"

namespace bae {

struct TemperingConfig {
  Index n_replicas = 8;
  double t_max = 2.0;
  Index swap_interval = 5;
  Index max_samples = 6000;
  Index switch_sample = 3000;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

enum class ExecutionMode { reference, worker_pool };

struct EnsembleOptions {
  ExecutionMode mode = ExecutionMode::reference;
  Index n_workers = 0;  // worker_pool only; 0 = min(replicas, hardware threads)
  Index thin = 1;
  bool snapshot_burn_in = false;
  bool track_test_mse = true;
  double init_sd = 0.1;
  /// Every replica starts from the same draw (true) or its own draw (false).
  bool shared_init = true;
  std::optional<ModelState> initial_state;  // overrides the random draw
};

struct SwapRecord {
  Index barrier = 0;
  Index sample = 0;  // number of samples completed when the swap was offered
  Index slot_a = 0, slot_b = 0;
  Index replica_a = 0, replica_b = 0;
  double log_ratio = 0.0;
  bool accepted = false;
  bool post_switch = false;
};

struct TemperatureRecord {
  Index barrier = 0;
  Index sample = 0;
  std::vector<double> replica_temperature;
};

struct EnsembleResult {
  std::vector<ReplicaChain> chains;
  std::vector<double> ladder;
  std::vector<SwapRecord> swaps;
  std::vector<TemperatureRecord> temperature_log;
  std::uint64_t swap_attempts = 0;
  std::uint64_t swap_accepts = 0;
  std::uint64_t post_switch_swap_attempts = 0;
  std::uint64_t post_switch_swap_accepts = 0;
  /// Pooled snapshots with sample >= switch_sample from every chain.
  std::vector<ModelState> posterior;
  std::chrono::duration<double> wall_time{0};
  Index switch_sample = 0;

  double swap_pct() const {
    return swap_attempts == 0 ? 0.0
                              : 100.0 * static_cast<double>(swap_accepts) /
                                    static_cast<double>(swap_attempts);
  }
  KernelCounters counters(bool post_burn_in) const;
};

/// Raised when a replica fails mid-run; carries everything sampled so far.
class EnsembleAborted : public std::runtime_error {
 public:
  EnsembleAborted(const std::string& what, EnsembleResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const EnsembleResult& partial() const { return partial_; }

 private:
  EnsembleResult partial_;
};

/// T_i = t_max^(i / (n - 1)); [1] when n == 1.
std::vector<double> build_ladder(Index n_replicas, double t_max);

/// Log acceptance ratio for exchanging the states at temperatures t_a, t_b:
/// (1/t_b - 1/t_a) * (logL_a - logL_b).
double swap_log_ratio(double logl_a, double logl_b, double t_a, double t_b);

/// Even barriers pair ladder slots (0,1),(2,3),...; odd barriers (1,2),(3,4),...
std::vector<std::pair<Index, Index>> swap_pair_schedule(Index barrier_index, Index n_replicas);

/// Parallel tempering: M replicas, a synchronous barrier every swap_interval
/// samples where adjacent ladder slots may exchange temperatures, and all
/// temperatures set to 1 at switch_sample. Bit-identical for a fixed seed in
/// either execution mode.
EnsembleResult run_ensemble(const TemperingConfig& cfg, const ProposalConfig& proposal,
                            const Target& target, const EnsembleOptions& options = {});

/// Snapshots of whichever replica held ladder slot 0 at each snapshotted
/// sample, in sample order.
std::vector<ParamSnapshot> cold_trajectory(const EnsembleResult& result);

}  // namespace bae
