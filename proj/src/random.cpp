#include "bae/random.hpp"

namespace bae {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void RandomStream::fill_normal(Eigen::Ref<Eigen::VectorXd> out, double sd) {
  for (Index i = 0; i < out.size(); ++i) out[i] = sd * normal_(engine_);
}

}  // namespace bae
