#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bae/config.hpp"
#include "bae/tempering.hpp"

namespace bae {

/// Parameter vector file, version 1:
///
///   # bae-params v1 layers=3-10-5-2-5-10-3 latent=3 hidden=sigmoid output=sigmoid
///   log_tau_sq=<value>
///   <theta_0>
///   ...
///
/// One value per line in the fixed layer-by-layer layout.
void write_param_vector(const std::filesystem::path& path, const Topology& topology,
                        const ModelState& state);
std::pair<Topology, ModelState> read_param_vector(const std::filesystem::path& path);

std::string params_header(const Topology& topology);
Topology parse_params_header(std::string_view line);

/// Plain numeric CSV with a `<prefix>0,<prefix>1,...` header.
std::string matrix_csv(const Eigen::MatrixXd& values, std::string_view column_prefix);

std::string trace_csv(const ReplicaChain& chain);
std::string snapshots_csv(const ReplicaChain& chain, const Topology& topology);
std::string swap_log_csv(const std::vector<SwapRecord>& swaps);
std::string temperature_log_csv(const std::vector<TemperatureRecord>& log, Index n_replicas);

/// Writes a self-describing run directory:
///   manifest.txt            config echo + manifest.* run facts
///   train.csv, test.csv     normalised splits (+ .meta sidecars)
///   chain_<r>.csv           per-replica trace
///   params_<r>.csv          per-replica parameter snapshots
///   swap_log.csv            every swap offer
///   temperatures.csv        replica temperatures after each barrier
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config,
               const EnsembleResult& result, const Dataset& train, const Dataset& test,
               bool complete = true);

struct RunArtifacts {
  ExperimentConfig config;
  Topology topology;
  Dataset train;
  Dataset test;
  EnsembleResult result;  // chains, swaps, counters; wall time from manifest
  bool complete = false;
};

/// Reads a directory written by write_run. Throws DataError on missing or
/// corrupt files.
RunArtifacts load_run(const std::filesystem::path& dir);

}  // namespace bae
