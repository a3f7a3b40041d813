#include "bae/autoencoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace bae {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity" || name == "linear") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Topology Topology::from_sizes(std::vector<Index> sizes, Activation hidden, Activation output) {
  Topology t;
  t.layer_sizes = std::move(sizes);
  t.hidden = hidden;
  t.output = output;
  if (t.layer_sizes.size() > 2) {
    const auto first = t.layer_sizes.begin() + 1;
    const auto last = t.layer_sizes.end() - 1;
    t.latent_index = std::distance(t.layer_sizes.begin(), std::min_element(first, last));
  }
  t.validate();
  return t;
}

void Topology::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("topology needs at least two layers");
  if (std::any_of(layer_sizes.begin(), layer_sizes.end(), [](Index d) { return d <= 0; }))
    throw std::invalid_argument("topology layer sizes must be positive");
  if (layer_sizes.front() != layer_sizes.back())
    throw std::invalid_argument("topology input and output sizes differ (" + describe() + ")");
  if (latent_index < 0 || latent_index >= static_cast<Index>(layer_sizes.size()))
    throw std::invalid_argument("topology latent index out of range");
}

Index Topology::param_offset(Index layer) const {
  Index offset = 0;
  for (Index l = 0; l < layer; ++l) offset += out_dim(l) * in_dim(l) + out_dim(l);
  return offset;
}

std::string Topology::describe() const {
  std::string s;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(layer_sizes[i]);
  }
  return s;
}

Index total_params(const Topology& topology) { return topology.param_offset(topology.n_layers()); }

Eigen::VectorXd init_params(const Topology& topology, double sd, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd params(total_params(topology));
  for (Index i = 0; i < params.size(); ++i) params[i] = sd * normal(engine);
  return params;
}

namespace detail {

void check_shapes(const Topology& t, Index n_params, Index batch_cols, Index expected_cols) {
  if (n_params != total_params(t))
    throw std::invalid_argument("parameter vector has " + std::to_string(n_params) +
                                " entries, topology " + t.describe() + " needs " +
                                std::to_string(total_params(t)));
  if (batch_cols != expected_cols)
    throw std::invalid_argument("batch has " + std::to_string(batch_cols) + " columns, expected " +
                                std::to_string(expected_cols));
}

}  // namespace detail
}  // namespace bae
