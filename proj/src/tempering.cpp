#include "bae/tempering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "bae/errors.hpp"

namespace bae {
namespace {

struct Segment {
  Index begin = 0;
  Index end = 0;
  bool barrier_after = false;
  bool switch_after = false;
};

std::vector<Segment> plan_segments(const TemperingConfig& cfg) {
  std::vector<Segment> segments;
  Index s = 0;
  while (s < cfg.max_samples) {
    Index end = std::min(cfg.max_samples, (s / cfg.swap_interval + 1) * cfg.swap_interval);
    if (s < cfg.switch_sample && end > cfg.switch_sample) end = cfg.switch_sample;
    segments.push_back({s, end, end % cfg.swap_interval == 0 && end < cfg.max_samples,
                        end == cfg.switch_sample});
    s = end;
  }
  return segments;
}

class Coordinator {
 public:
  Coordinator(const TemperingConfig& cfg, std::vector<ReplicaSampler>& replicas,
              EnsembleResult& result)
      : cfg_(cfg), replicas_(replicas), result_(result),
        rng_(mix_seed(cfg.seed, stream::coordinator)) {
    const auto m = static_cast<std::size_t>(cfg.n_replicas);
    owner_.resize(m);
    for (std::size_t k = 0; k < m; ++k) owner_[k] = static_cast<Index>(k);
  }

  void after_segment(const Segment& seg) {
    if (seg.barrier_after) exchange(seg.end);
    if (seg.switch_after) {
      post_switch_ = true;
      for (auto& r : replicas_) r.set_temperature(1.0);
    }
  }

  void start() {
    if (cfg_.switch_sample == 0) {
      post_switch_ = true;
      for (auto& r : replicas_) r.set_temperature(1.0);
    }
  }

 private:
  void exchange(Index sample) {
    const Index barrier = barrier_++;
    for (const auto& [a, b] : swap_pair_schedule(barrier, cfg_.n_replicas)) {
      const Index ra = owner_[static_cast<std::size_t>(a)];
      const Index rb = owner_[static_cast<std::size_t>(b)];
      auto& rep_a = replicas_[static_cast<std::size_t>(ra)];
      auto& rep_b = replicas_[static_cast<std::size_t>(rb)];
      const double ratio = swap_log_ratio(rep_a.log_likelihood(), rep_b.log_likelihood(),
                                          rep_a.temperature(), rep_b.temperature());
      const bool accepted = std::log(rng_.uniform()) < std::min(0.0, ratio);
      if (accepted) {
        const double ta = rep_a.temperature();
        rep_a.set_temperature(rep_b.temperature());
        rep_b.set_temperature(ta);
        rep_a.set_ladder_slot(b);
        rep_b.set_ladder_slot(a);
        std::swap(owner_[static_cast<std::size_t>(a)], owner_[static_cast<std::size_t>(b)]);
      }
      if (post_switch_) {
        result_.post_switch_swap_attempts++;
        result_.post_switch_swap_accepts += accepted;
      } else {
        result_.swap_attempts++;
        result_.swap_accepts += accepted;
      }
      result_.swaps.push_back({barrier, sample, a, b, ra, rb, ratio, accepted, post_switch_});
    }
    TemperatureRecord rec{barrier, sample, {}};
    for (const auto& r : replicas_) rec.replica_temperature.push_back(r.temperature());
    result_.temperature_log.push_back(std::move(rec));
  }

  const TemperingConfig& cfg_;
  std::vector<ReplicaSampler>& replicas_;
  EnsembleResult& result_;
  RandomStream rng_;
  std::vector<Index> owner_;  // ladder slot -> replica
  Index barrier_ = 0;
  bool post_switch_ = false;
};

void run_reference(const std::vector<Segment>& segments, std::vector<ReplicaSampler>& replicas,
                   Coordinator& coordinator) {
  for (const auto& seg : segments) {
    for (auto& r : replicas) r.run_segment(seg.begin, seg.end - seg.begin);
    coordinator.after_segment(seg);
  }
}

void run_pool(const std::vector<Segment>& segments, std::vector<ReplicaSampler>& replicas,
              Coordinator& coordinator, Index n_workers) {
  std::size_t seg_index = 0;
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  // Generation-counted barrier; the last worker to arrive runs the exchange.
  std::mutex sync_mutex;
  std::condition_variable sync_cv;
  Index waiting = 0;
  std::size_t generation = 0;
  auto arrive_and_wait = [&] {
    std::unique_lock lock(sync_mutex);
    const auto gen = generation;
    if (++waiting == n_workers) {
      if (!abort.load()) {
        try {
          coordinator.after_segment(segments[seg_index]);
        } catch (...) {
          std::lock_guard guard(failure_mutex);
          if (!failure) failure = std::current_exception();
          abort.store(true);
        }
      }
      ++seg_index;
      waiting = 0;
      ++generation;
      sync_cv.notify_all();
    } else {
      sync_cv.wait(lock, [&] { return generation != gen; });
    }
  };

  auto worker = [&](Index w) {
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& seg = segments[i];
      try {
        for (std::size_t r = static_cast<std::size_t>(w); r < replicas.size();
             r += static_cast<std::size_t>(n_workers))
          replicas[r].run_segment(seg.begin, seg.end - seg.begin);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        abort.store(true);
      }
      arrive_and_wait();
      if (abort.load()) return;
    }
  };

  std::vector<std::jthread> threads;
  for (Index w = 0; w < n_workers; ++w) threads.emplace_back(worker, w);
  threads.clear();  // joins
  if (failure) std::rethrow_exception(failure);
}

ModelState initial_state(const Target& target, const EnsembleOptions& options, std::uint64_t seed,
                         Index replica) {
  if (options.initial_state) return *options.initial_state;
  const std::uint64_t stream_id =
      options.shared_init ? stream::initialiser : stream::initialiser + 1 + static_cast<std::uint64_t>(replica);
  RandomStream rng(mix_seed(seed, stream_id));
  ModelState s;
  s.params.resize(target.dimension());
  rng.fill_normal(s.params, options.init_sd);
  s.log_tau_sq = target.initial_log_tau_sq(s.params);
  return s;
}

}  // namespace

void TemperingConfig::validate() const {
  if (n_replicas < 1) throw ConfigError("tempering.n_replicas must be >= 1");
  if (!(t_max >= 1.0)) throw ConfigError("tempering.t_max must be >= 1");
  if (max_samples < 1) throw ConfigError("tempering.max_samples must be >= 1");
  if (swap_interval < 1 || swap_interval > max_samples)
    throw ConfigError("tempering.swap_interval must be in [1, max_samples]");
  if (switch_sample < 0 || switch_sample > max_samples)
    throw ConfigError("tempering.switch_sample must be in [0, max_samples]");
}

KernelCounters EnsembleResult::counters(bool post_burn_in) const {
  KernelCounters c;
  for (const auto& chain : chains) c += post_burn_in ? chain.post_burn_in : chain.burn_in;
  return c;
}

std::vector<double> build_ladder(Index n_replicas, double t_max) {
  if (n_replicas < 1) throw std::invalid_argument("build_ladder: n_replicas must be >= 1");
  if (!(t_max >= 1.0)) throw std::invalid_argument("build_ladder: t_max must be >= 1");
  std::vector<double> ladder(static_cast<std::size_t>(n_replicas), 1.0);
  if (n_replicas == 1) return ladder;
  const double log_max = std::log(t_max);
  for (Index i = 1; i + 1 < n_replicas; ++i)
    ladder[static_cast<std::size_t>(i)] =
        std::exp(log_max * static_cast<double>(i) / static_cast<double>(n_replicas - 1));
  ladder.back() = t_max;
  return ladder;
}

double swap_log_ratio(double logl_a, double logl_b, double t_a, double t_b) {
  return (1.0 / t_b - 1.0 / t_a) * (logl_a - logl_b);
}

std::vector<std::pair<Index, Index>> swap_pair_schedule(Index barrier_index, Index n_replicas) {
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = barrier_index % 2; i + 1 < n_replicas; i += 2) pairs.emplace_back(i, i + 1);
  return pairs;
}

EnsembleResult run_ensemble(const TemperingConfig& cfg, const ProposalConfig& proposal,
                            const Target& target, const EnsembleOptions& options) {
  cfg.validate();
  proposal.validate();
  const auto started = std::chrono::steady_clock::now();

  EnsembleResult result;
  result.ladder = build_ladder(cfg.n_replicas, cfg.t_max);
  result.switch_sample = cfg.switch_sample;

  SamplerSettings settings{proposal, cfg.switch_sample, options.thin, options.snapshot_burn_in,
                           options.track_test_mse};
  std::vector<ReplicaSampler> replicas;
  replicas.reserve(static_cast<std::size_t>(cfg.n_replicas));
  for (Index r = 0; r < cfg.n_replicas; ++r) {
    replicas.emplace_back(r, initial_state(target, options, cfg.seed, r), target, settings,
                          mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    replicas.back().set_temperature(result.ladder[static_cast<std::size_t>(r)]);
    replicas.back().set_ladder_slot(r);
  }

  Coordinator coordinator(cfg, replicas, result);
  coordinator.start();
  const auto segments = plan_segments(cfg);

  auto collect = [&]() {
    for (auto& r : replicas) result.chains.push_back(r.release_chain());
    for (const auto& chain : result.chains)
      for (const auto& snap : chain.snapshots)
        if (snap.sample >= cfg.switch_sample) result.posterior.push_back(snap.state);
    result.wall_time = std::chrono::steady_clock::now() - started;
  };

  try {
    if (options.mode == ExecutionMode::reference) {
      run_reference(segments, replicas, coordinator);
    } else {
      Index workers = options.n_workers;
      if (workers <= 0)
        workers = std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency()));
      workers = std::min(workers, cfg.n_replicas);
      run_pool(segments, replicas, coordinator, workers);
    }
  } catch (const std::exception& e) {
    collect();
    throw EnsembleAborted(std::string("replica failure: ") + e.what(), std::move(result));
  }
  collect();
  return result;
}

std::vector<ParamSnapshot> cold_trajectory(const EnsembleResult& result) {
  std::vector<ParamSnapshot> out;
  for (const auto& chain : result.chains) {
    std::size_t t = 0;
    for (const auto& snap : chain.snapshots) {
      while (t < chain.trace.size() && chain.trace[t].sample < snap.sample) ++t;
      if (t < chain.trace.size() && chain.trace[t].ladder_slot == 0) out.push_back(snap);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ParamSnapshot& a, const ParamSnapshot& b) { return a.sample < b.sample; });
  return out;
}

}  // namespace bae
