#pragma once

#include <cmath>

#include "bae/target.hpp"

namespace bae::oracle {

// logL = -E / 2 with E = (theta - m)' P (theta - m); flat prior. The target
// density is N(m, P^-1). log tau^2 is ignored.
class QuadraticTarget final : public Target {
 public:
  QuadraticTarget(Eigen::VectorXd mean, Eigen::MatrixXd precision)
      : mean_(std::move(mean)), precision_(std::move(precision)) {}

  Index dimension() const override { return mean_.size(); }
  Evaluation evaluate(const ModelState& s, bool with_gradient) const override {
    const Eigen::VectorXd d = s.params - mean_;
    const double e = d.dot(precision_ * d);
    Evaluation ev;
    ev.log_likelihood = -0.5 * e;
    ev.log_prior = 0.0;
    ev.train_mse = e;
    if (with_gradient) ev.loss_gradient = 2.0 * precision_ * d;
    return ev;
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd precision_;
};

// Equal mixture of N(-c, sd^2) and N(c, sd^2) in one dimension, as logL.
class BimodalTarget final : public Target {
 public:
  BimodalTarget(double centre, double sd) : c_(centre), sd_(sd) {}

  Index dimension() const override { return 1; }
  Evaluation evaluate(const ModelState& s, bool with_gradient) const override {
    const double x = s.params[0];
    const double a = -0.5 * std::pow((x - c_) / sd_, 2);
    const double b = -0.5 * std::pow((x + c_) / sd_, 2);
    const double top = std::max(a, b);
    const double wa = std::exp(a - top), wb = std::exp(b - top);
    Evaluation ev;
    ev.log_likelihood = top + std::log(0.5 * (wa + wb)) - std::log(sd_ * std::sqrt(2 * M_PI));
    ev.log_prior = 0.0;
    ev.train_mse = 0.0;
    if (with_gradient) {
      const double dlog = (wa * (-(x - c_)) + wb * (-(x + c_))) / (sd_ * sd_ * (wa + wb));
      ev.loss_gradient = Eigen::VectorXd::Constant(1, -dlog);
    }
    return ev;
  }

 private:
  double c_, sd_;
};

class FlatTarget final : public Target {
 public:
  explicit FlatTarget(Index n) : n_(n) {}
  Index dimension() const override { return n_; }
  Evaluation evaluate(const ModelState&, bool with_gradient) const override {
    Evaluation ev;
    ev.train_mse = 0.0;
    if (with_gradient) ev.loss_gradient = Eigen::VectorXd::Zero(n_);
    return ev;
  }

 private:
  Index n_;
};

// Batch-means standard error of the mean of `x`.
inline double batch_means_se(const Eigen::VectorXd& x, Index n_batches = 50) {
  const Index b = x.size() / n_batches;
  Eigen::VectorXd means(n_batches);
  for (Index i = 0; i < n_batches; ++i) means[i] = x.segment(i * b, b).mean();
  const double mu = means.mean();
  const double var = (means.array() - mu).square().sum() / static_cast<double>(n_batches - 1);
  return std::sqrt(var / static_cast<double>(n_batches));
}

}  // namespace bae::oracle
