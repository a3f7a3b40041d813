#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bae/types.hpp"

namespace bae {

/// Feature matrix (rows = instances) plus the min-max bounds used to scale it.
///
/// `norm_min`/`norm_max` are empty until the data has been normalised.
/// `labels` are only ever consumed by the downstream kNN benchmark; the
/// autoencoder never sees them. `color` is a per-row scalar kept for plotting
/// (the Swiss Roll angle).
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd norm_min;
  Eigen::VectorXd norm_max;
  std::vector<std::uint8_t> degenerate;  // per feature: min == max
  std::optional<Eigen::VectorXi> labels;
  std::optional<Eigen::VectorXd> color;
  std::uint64_t seed = 0;

  Index n_instances() const { return features.rows(); }
  Index n_features() const { return features.cols(); }
  bool normalized() const { return norm_min.size() == features.cols() && features.cols() > 0; }
};

struct SplitSpec {
  Index train_count = 0;
  Index test_count = 0;
  std::uint64_t shuffle_seed = 0;
};

/// Parses comma-separated numeric text. A first row that does not parse as
/// numbers is treated as a header. Errors carry the 1-based row/column.
Dataset load_csv(const std::filesystem::path& path, bool has_labels = false,
                 Index label_column = -1);

/// Writes features (and labels / color when present) as CSV with a header
/// row, plus a `<path>.meta` key=value sidecar holding bounds and seed.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Reads a file written by save_dataset, restoring the sidecar metadata.
Dataset load_dataset(const std::filesystem::path& path);

/// (u cos u, v, u sin u) + noise, u ~ U[1.5 pi, 4.5 pi], v ~ U[0, 21].
/// The angle u is recorded in `color`.
Dataset generate_swiss_roll(Index n_points, double noise_sd, std::uint64_t seed);

/// Madelon-style synthetic classification data: 32 Gaussian clusters on the
/// vertices of a 5-d hypercube, 15 random linear combinations of those five
/// coordinates, then N(0,1) distractors up to `n_features` columns.
/// Informative columns come first. Labels are 0/1, random per cluster.
Dataset generate_madelon_like(Index n_points, Index n_features, std::uint64_t seed);

/// Isotropic Gaussian clusters (one per class) with centres spaced
/// `separation` apart along the first axis.
Dataset generate_clusters(Index n_points, Index n_features, Index n_classes,
                          double separation, double cluster_sd, std::uint64_t seed);

/// Per-feature min-max scaling to [0, 1]. Constant columns become zeros and
/// are flagged in `degenerate`.
Dataset normalize(const Dataset& dataset);

/// Scales `dataset` with bounds taken from `reference` (which must be
/// normalised). Values outside the reference range are not clipped.
Dataset apply_normalization(const Dataset& dataset, const Dataset& reference);

/// Inverse of normalize on non-degenerate columns.
Eigen::MatrixXd denormalize(const Eigen::MatrixXd& normalized, const Dataset& reference);

/// Shuffles row order with `spec.shuffle_seed`, takes the first train_count
/// rows as train and the next test_count as test, and normalises both with
/// bounds computed on train alone.
std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec);

/// Keeps the listed feature columns (in order); labels/color carried along.
Dataset select_features(const Dataset& dataset, const std::vector<Index>& columns);

}  // namespace bae
