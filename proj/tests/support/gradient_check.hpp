#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "bae/autoencoder.hpp"

namespace bae::oracle {

// Central differences of the loss evaluated in long double, so the oracle's
// own rounding stays far below the tolerance being checked.
inline Eigen::VectorXd finite_difference_gradient(const Topology& t, const Eigen::VectorXd& params,
                                                  const Eigen::MatrixXd& batch, double step) {
  using LD = long double;
  const VectorX<LD> p = params.cast<LD>();
  const MatrixX<LD> x = batch.cast<LD>();
  Eigen::VectorXd g(params.size());
  for (Index i = 0; i < params.size(); ++i) {
    VectorX<LD> up = p, down = p;
    up[i] += step;
    down[i] -= step;
    const LD diff = loss<LD>(t, up, x) - loss<LD>(t, down, x);
    g[i] = static_cast<double>(diff / (2 * static_cast<LD>(step)));
  }
  return g;
}

// |a - b| / max(|a|, |b|, floor), maximised over entries. The floor keeps
// entries that are zero up to rounding from producing meaningless ratios.
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

struct GradientCase {
  Topology topology;
  Eigen::VectorXd params;
  Eigen::MatrixXd batch;
};

// Random topology with at most `max_params` parameters, random activations,
// random parameters and a random batch in [0, 1].
inline GradientCase random_gradient_case(std::mt19937_64& rng, Index max_params = 300) {
  std::uniform_int_distribution<int> depth(1, 5), width(1, 8), rows(1, 6), act(0, 2);
  const Activation acts[] = {Activation::sigmoid, Activation::tanh, Activation::identity};
  for (;;) {
    const int k = depth(rng);
    std::vector<Index> sizes{width(rng)};
    for (int l = 1; l < k; ++l) sizes.push_back(width(rng));
    sizes.push_back(sizes.front());
    Topology t = Topology::from_sizes(sizes, acts[act(rng)], acts[act(rng)]);
    if (total_params(t) > max_params) continue;
    GradientCase c{t, init_params(t, 1.0, rng), {}};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    c.batch.resize(rows(rng), t.input_dim());
    for (Index i = 0; i < c.batch.size(); ++i) c.batch.data()[i] = u(rng);
    return c;
  }
}

}  // namespace bae::oracle
