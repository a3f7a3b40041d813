#pragma once

#include <utility>

#include "bae/config.hpp"
#include "bae/diagnostics.hpp"

namespace bae {

/// Materialises, splits and normalises the configured dataset.
/// Throws ConfigError if the feature count disagrees with the input layer.
std::pair<Dataset, Dataset> prepare_data(const ExperimentConfig& config);

struct ExperimentOutcome {
  Dataset train;
  Dataset test;
  EnsembleResult result;
  PosteriorSummary summary;
};

/// Validate, prepare data, sample, summarise. EnsembleAborted propagates.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace bae
