#pragma once

#include <cmath>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bae/types.hpp"

namespace bae {

enum class Activation { sigmoid, tanh, identity };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);  // throws std::invalid_argument

/// Layer sizes [d_0, ..., d_K] of a feedforward autoencoder with d_0 == d_K.
/// Layers 0..latent_index form the encoder, latent_index..K the decoder.
///
/// Parameters are laid out layer by layer: the weight matrix of layer l
/// (d_{l+1} x d_l, row-major) followed by its d_{l+1} biases. Encoder
/// parameters therefore occupy the leading `encoder_params()` entries.
struct Topology {
  std::vector<Index> layer_sizes;
  Index latent_index = 0;
  Activation hidden = Activation::sigmoid;
  Activation output = Activation::sigmoid;

  /// Latent layer placed at the (first) smallest interior layer.
  static Topology from_sizes(std::vector<Index> sizes, Activation hidden = Activation::sigmoid,
                             Activation output = Activation::sigmoid);

  void validate() const;  // throws std::invalid_argument

  Index n_layers() const { return static_cast<Index>(layer_sizes.size()) - 1; }
  Index input_dim() const { return layer_sizes.front(); }
  Index latent_dim() const { return layer_sizes[static_cast<std::size_t>(latent_index)]; }
  Index in_dim(Index layer) const { return layer_sizes[static_cast<std::size_t>(layer)]; }
  Index out_dim(Index layer) const { return layer_sizes[static_cast<std::size_t>(layer) + 1]; }
  Activation activation(Index layer) const { return layer + 1 == n_layers() ? output : hidden; }

  Index param_offset(Index layer) const;
  Index encoder_params() const { return param_offset(latent_index); }

  std::string describe() const;  // "3-10-5-2-5-10-3"
};

/// sum over layers of d_l * d_{l+1} + d_{l+1}.
Index total_params(const Topology& topology);

/// i.i.d. N(0, sd^2) starting point.
Eigen::VectorXd init_params(const Topology& topology, double sd, std::mt19937_64& engine);

namespace detail {

template <typename Scalar>
void activate(Activation activation, MatrixX<Scalar>& z) {
  switch (activation) {
    case Activation::sigmoid:
      z = (Scalar(1) + (-z.array()).exp()).inverse().matrix();
      break;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::identity:
      break;
  }
}

/// d(activation)/dz expressed through the activation output a.
template <typename Scalar>
MatrixX<Scalar> activation_slope(Activation activation, const MatrixX<Scalar>& a) {
  switch (activation) {
    case Activation::sigmoid:
      return (a.array() * (Scalar(1) - a.array())).matrix();
    case Activation::tanh:
      return (Scalar(1) - a.array().square()).matrix();
    case Activation::identity:
      break;
  }
  return MatrixX<Scalar>::Ones(a.rows(), a.cols());
}

template <typename Scalar>
auto weights(const Topology& t, const Eigen::Ref<const VectorX<Scalar>>& params, Index layer) {
  return Eigen::Map<const RowMajorMatrixX<Scalar>>(params.data() + t.param_offset(layer),
                                                   t.out_dim(layer), t.in_dim(layer));
}

template <typename Scalar>
auto biases(const Topology& t, const Eigen::Ref<const VectorX<Scalar>>& params, Index layer) {
  return Eigen::Map<const VectorX<Scalar>>(
      params.data() + t.param_offset(layer) + t.out_dim(layer) * t.in_dim(layer),
      t.out_dim(layer));
}

void check_shapes(const Topology& t, Index n_params, Index batch_cols, Index expected_cols);

/// Runs layers [first, last) on `input`; `trace` receives every post-activation.
template <typename Scalar>
MatrixX<Scalar> run_layers(const Topology& t, const Eigen::Ref<const VectorX<Scalar>>& params,
                           const MatrixX<Scalar>& input, Index first, Index last,
                           std::vector<MatrixX<Scalar>>* trace) {
  MatrixX<Scalar> a = input;
  for (Index l = first; l < last; ++l) {
    MatrixX<Scalar> z = a * weights<Scalar>(t, params, l).transpose();
    z.rowwise() += biases<Scalar>(t, params, l).transpose();
    activate(t.activation(l), z);
    a = std::move(z);
    if (trace) trace->push_back(a);
  }
  return a;
}

}  // namespace detail

template <typename Scalar>
struct ForwardResult {
  /// activations[0] is the input batch, activations[l] the output of layer l.
  std::vector<MatrixX<Scalar>> activations;
  Index latent_index = 0;

  const MatrixX<Scalar>& latent() const {
    return activations[static_cast<std::size_t>(latent_index)];
  }
  const MatrixX<Scalar>& reconstruction() const { return activations.back(); }
};

template <typename Scalar>
ForwardResult<Scalar> forward(const Topology& topology,
                              const Eigen::Ref<const VectorX<Scalar>>& params,
                              const MatrixX<Scalar>& batch) {
  detail::check_shapes(topology, params.size(), batch.cols(), topology.input_dim());
  ForwardResult<Scalar> result;
  result.latent_index = topology.latent_index;
  result.activations.reserve(static_cast<std::size_t>(topology.n_layers()) + 1);
  result.activations.push_back(batch);
  detail::run_layers<Scalar>(topology, params, batch, 0, topology.n_layers(),
                             &result.activations);
  return result;
}

template <typename Scalar>
MatrixX<Scalar> encode(const Topology& topology, const Eigen::Ref<const VectorX<Scalar>>& params,
                       const MatrixX<Scalar>& batch) {
  detail::check_shapes(topology, params.size(), batch.cols(), topology.input_dim());
  return detail::run_layers<Scalar>(topology, params, batch, 0, topology.latent_index, nullptr);
}

template <typename Scalar>
MatrixX<Scalar> decode(const Topology& topology, const Eigen::Ref<const VectorX<Scalar>>& params,
                       const MatrixX<Scalar>& latent) {
  detail::check_shapes(topology, params.size(), latent.cols(), topology.latent_dim());
  return detail::run_layers<Scalar>(topology, params, latent, topology.latent_index,
                                    topology.n_layers(), nullptr);
}

/// Sum of squared reconstruction errors over every instance and feature.
template <typename Scalar>
Scalar loss(const Topology& topology, const Eigen::Ref<const VectorX<Scalar>>& params,
            const MatrixX<Scalar>& batch) {
  detail::check_shapes(topology, params.size(), batch.cols(), topology.input_dim());
  const MatrixX<Scalar> recon =
      detail::run_layers<Scalar>(topology, params, batch, 0, topology.n_layers(), nullptr);
  return (recon - batch).squaredNorm();
}

template <typename Scalar>
struct LossGradient {
  Scalar loss;
  VectorX<Scalar> gradient;
};

/// Loss together with its exact gradient by backpropagation (full batch).
template <typename Scalar>
LossGradient<Scalar> loss_and_gradient(const Topology& topology,
                                       const Eigen::Ref<const VectorX<Scalar>>& params,
                                       const MatrixX<Scalar>& batch) {
  const ForwardResult<Scalar> fwd = forward<Scalar>(topology, params, batch);
  const auto& acts = fwd.activations;
  MatrixX<Scalar> residual = acts.back() - batch;

  LossGradient<Scalar> out{residual.squaredNorm(), VectorX<Scalar>::Zero(params.size())};
  MatrixX<Scalar> upstream = Scalar(2) * residual;  // dE / d(output)
  for (Index l = topology.n_layers() - 1; l >= 0; --l) {
    const auto& a_out = acts[static_cast<std::size_t>(l) + 1];
    const auto& a_in = acts[static_cast<std::size_t>(l)];
    const MatrixX<Scalar> delta =
        (upstream.array() * detail::activation_slope(topology.activation(l), a_out).array())
            .matrix();
    const Index off = topology.param_offset(l);
    const Index rows = topology.out_dim(l);
    const Index cols = topology.in_dim(l);
    Eigen::Map<RowMajorMatrixX<Scalar>>(out.gradient.data() + off, rows, cols) =
        delta.transpose() * a_in;
    out.gradient.segment(off + rows * cols, rows) = delta.colwise().sum().transpose();
    if (l > 0) upstream = delta * detail::weights<Scalar>(topology, params, l);
  }
  return out;
}

template <typename Scalar>
VectorX<Scalar> gradient(const Topology& topology, const Eigen::Ref<const VectorX<Scalar>>& params,
                         const MatrixX<Scalar>& batch) {
  return loss_and_gradient<Scalar>(topology, params, batch).gradient;
}

/// Per-entry mean squared error: loss / (n_instances * n_features).
template <typename Scalar>
Scalar mse(const Topology& topology, const Eigen::Ref<const VectorX<Scalar>>& params,
           const MatrixX<Scalar>& batch) {
  if (batch.size() == 0) return Scalar(0);
  return loss<Scalar>(topology, params, batch) / static_cast<Scalar>(batch.size());
}

}  // namespace bae
