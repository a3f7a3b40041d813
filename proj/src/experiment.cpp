#include "bae/experiment.hpp"

#include "bae/errors.hpp"
#include "bae/target.hpp"

namespace bae {

std::pair<Dataset, Dataset> prepare_data(const ExperimentConfig& config) {
  auto data = split(materialize(config.dataset), config.split);
  if (data.first.n_features() != config.layers.front())
    throw ConfigError("dataset has " + std::to_string(data.first.n_features()) +
                      " features but the input layer has " +
                      std::to_string(config.layers.front()) + " units");
  return data;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentOutcome out;
  std::tie(out.train, out.test) = prepare_data(config);
  const Topology topology = config.topology();
  const AutoencoderTarget target(topology, config.prior, out.train.features,
                                 out.test.n_instances() > 0
                                     ? std::optional<Eigen::MatrixXd>(out.test.features)
                                     : std::nullopt);
  out.result =
      run_ensemble(config.tempering, config.proposal, target, config.ensemble_options());
  const Eigen::MatrixXd& test = out.test.n_instances() > 0 ? out.test.features : out.train.features;
  out.summary = summarize(out.result.posterior, topology, config.prior, out.train.features, test);
  attach_run_stats(out.summary, out.result);
  return out;
}

}  // namespace bae
