#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bae/autoencoder.hpp"
#include "bae/bayes_model.hpp"
#include "bae/dataset.hpp"
#include "bae/proposals.hpp"
#include "bae/tempering.hpp"
#include "bae/text_format.hpp"

namespace bae {

enum class DatasetKind { swiss_roll, madelon_like, clusters, csv };

std::string_view to_string(DatasetKind kind);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::swiss_roll;
  std::string path;           // csv only
  bool has_labels = false;    // csv only
  Index label_column = -1;    // csv only; -1 = last column
  Index n_points = 5000;
  double noise_sd = 0.0;
  Index n_features = 500;     // madelon_like / clusters
  Index n_classes = 2;        // clusters
  double separation = 10.0;   // clusters
  double cluster_sd = 0.1;    // clusters
  std::uint64_t seed = 1;
};

/// Everything needed to reproduce a run. Serialises to flat dotted
/// key=value text (e.g. `tempering.n_replicas=8`).
struct ExperimentConfig {
  DatasetSpec dataset;
  SplitSpec split{3750, 1250, 1};
  std::vector<Index> layers{3, 10, 5, 2, 5, 10, 3};
  Activation hidden_activation = Activation::sigmoid;
  Activation output_activation = Activation::sigmoid;
  double init_sd = 0.1;
  bool shared_init = true;
  PriorConfig prior;
  ProposalConfig proposal;
  TemperingConfig tempering;
  ExecutionMode mode = ExecutionMode::worker_pool;
  Index n_workers = 0;
  Index thin = 1;
  bool snapshot_burn_in = false;
  std::string output_dir = "runs/latest";
  std::vector<Index> rhat_ids{0, 50, 100, 150};
  Index knn_k = 5;
  Index max_members = 100;

  Topology topology() const;
  EnsembleOptions ensemble_options() const;
};

/// Named starting points: swiss_roll_desk, swiss_roll_full, madelon_desk,
/// madelon_full, coil_desk, coil_full.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Applies `key=value` overrides. A `preset` key, if present, is applied
/// first. Keys starting with `manifest.` are ignored. Unknown keys and
/// unparsable values raise ConfigError.
void apply_overrides(ExperimentConfig& config, const KeyValueFile& values);
void apply_override(ExperimentConfig& config, std::string_view key, std::string_view value);

ExperimentConfig load_config(const std::filesystem::path& path);
KeyValueFile to_key_values(const ExperimentConfig& config);

/// Static checks that do not need the data: ranges, R_switch <= R_max,
/// topology shape, referenced paths, input dimension for generated data.
/// Collects every problem before throwing ConfigError.
void validate(const ExperimentConfig& config);

/// Generates or loads the raw (unnormalised) dataset described by `spec`.
Dataset materialize(const DatasetSpec& spec);

}  // namespace bae
