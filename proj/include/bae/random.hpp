#pragma once

#include <cstdint>
#include <random>

#include "bae/types.hpp"

namespace bae {

/// SplitMix64 finaliser over (seed, stream_id). Every replica, the swap
/// coordinator and the initialiser draw from their own stream, so adding a
/// replica never perturbs the streams of the existing ones.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id);

namespace stream {
inline constexpr std::uint64_t coordinator = 0xC0FFEE0000000001ULL;
inline constexpr std::uint64_t initialiser = 0xC0FFEE0000000002ULL;
inline constexpr std::uint64_t data = 0xC0FFEE0000000003ULL;
}  // namespace stream

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Fills `out` with i.i.d. N(0, sd^2) draws, in index order.
  void fill_normal(Eigen::Ref<Eigen::VectorXd> out, double sd);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace bae
