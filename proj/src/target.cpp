#include "bae/target.hpp"

#include <cmath>

namespace bae {

AutoencoderTarget::AutoencoderTarget(Topology topology, PriorConfig prior, Eigen::MatrixXd train,
                                     std::optional<Eigen::MatrixXd> test)
    : topology_(std::move(topology)),
      prior_(prior),
      train_(std::move(train)),
      test_(std::move(test)) {
  topology_.validate();
  prior_.validate();
  if (train_.cols() != topology_.input_dim())
    throw std::invalid_argument("training data has " + std::to_string(train_.cols()) +
                                " features, topology expects " +
                                std::to_string(topology_.input_dim()));
  if (test_ && test_->size() > 0 && test_->cols() != topology_.input_dim())
    throw std::invalid_argument("test data feature count does not match topology");
}

Evaluation AutoencoderTarget::evaluate(const ModelState& state, bool with_gradient) const {
  Evaluation ev;
  double sse = 0.0;
  if (with_gradient) {
    auto lg = loss_and_gradient<double>(topology_, state.params, train_);
    sse = lg.loss;
    ev.loss_gradient = std::move(lg.gradient);
  } else {
    sse = loss<double>(topology_, state.params, train_);
  }
  ev.log_likelihood = std::isfinite(sse)
                          ? log_likelihood_from_sse(sse, train_.size(), state.log_tau_sq)
                          : std::numeric_limits<double>::quiet_NaN();
  ev.log_prior = log_prior(state, prior_);
  ev.train_mse = sse / static_cast<double>(train_.size());
  return ev;
}

double AutoencoderTarget::test_mse(const ModelState& state) const {
  if (!test_ || test_->size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return mse<double>(topology_, state.params, *test_);
}

double AutoencoderTarget::initial_log_tau_sq(const Eigen::VectorXd& params) const {
  const double m = mse<double>(topology_, params, train_);
  return std::log(std::max(m, 1e-12));
}

}  // namespace bae
