#include "bae/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "bae/errors.hpp"
#include "bae/random.hpp"
#include "bae/text_format.hpp"

namespace bae {
namespace {

Dataset take_rows(const Dataset& src, const std::vector<Index>& rows) {
  Dataset out;
  out.seed = src.seed;
  out.features.resize(static_cast<Index>(rows.size()), src.n_features());
  if (src.labels) out.labels = Eigen::VectorXi(static_cast<Index>(rows.size()));
  if (src.color) out.color = Eigen::VectorXd(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    const auto dst = static_cast<Index>(i);
    out.features.row(dst) = src.features.row(r);
    if (src.labels) (*out.labels)[dst] = (*src.labels)[r];
    if (src.color) (*out.color)[dst] = (*src.color)[r];
  }
  return out;
}

bool looks_numeric(const std::vector<std::string_view>& fields) {
  return std::all_of(fields.begin(), fields.end(),
                     [](std::string_view f) { return parse_double(f).has_value(); });
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, bool has_labels, Index label_column) {
  if (!std::filesystem::exists(path)) throw DataError("missing file '" + path.string() + "'");
  const std::string text = read_text_file(path);

  std::vector<std::vector<double>> rows;
  std::vector<long> row_lines;
  std::size_t width = 0;
  long line_no = 0;
  bool first = true;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, ',');
    if (first) {
      first = false;
      width = fields.size();
      if (!looks_numeric(fields)) continue;  // header
    }
    if (fields.size() != width)
      throw DataError("ragged row: expected " + std::to_string(width) + " columns, found " +
                          std::to_string(fields.size()),
                      line_no);
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = parse_double(fields[c]);
      if (!v)
        throw DataError("non-numeric cell '" + std::string(fields[c]) + "'", line_no,
                        static_cast<long>(c + 1));
      values[c] = *v;
    }
    rows.push_back(std::move(values));
    row_lines.push_back(line_no);
  }

  const auto n = static_cast<Index>(rows.size());
  const auto w = static_cast<Index>(width);
  Index label_col = -1;
  if (has_labels) {
    label_col = label_column < 0 ? w - 1 : label_column;
    if (label_col >= w) throw DataError("label column out of range");
  }

  Dataset out;
  out.features.resize(n, has_labels ? w - 1 : w);
  if (has_labels) out.labels = Eigen::VectorXi(n);
  for (Index r = 0; r < n; ++r) {
    Index dst = 0;
    for (Index c = 0; c < w; ++c) {
      const double v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (c == label_col) {
        if (v != std::round(v)) throw DataError("non-integer label", row_lines[static_cast<std::size_t>(r)],
                                                   static_cast<long>(c + 1));
        (*out.labels)[r] = static_cast<int>(v);
      } else {
        out.features(r, dst++) = v;
      }
    }
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::string csv;
  for (Index c = 0; c < dataset.n_features(); ++c) {
    if (c) csv += ',';
    csv += "f" + std::to_string(c);
  }
  if (dataset.labels) csv += ",label";
  if (dataset.color) csv += ",color";
  csv += '\n';
  for (Index r = 0; r < dataset.n_instances(); ++r) {
    for (Index c = 0; c < dataset.n_features(); ++c) {
      if (c) csv += ',';
      csv += format_double(dataset.features(r, c));
    }
    if (dataset.labels) csv += "," + std::to_string((*dataset.labels)[r]);
    if (dataset.color) csv += "," + format_double((*dataset.color)[r]);
    csv += '\n';
  }
  write_text_file(path, csv);

  KeyValueFile meta;
  meta.set("format", "bae-dataset-v1");
  meta.set("n_instances", std::to_string(dataset.n_instances()));
  meta.set("n_features", std::to_string(dataset.n_features()));
  meta.set("has_labels", dataset.labels ? "1" : "0");
  meta.set("has_color", dataset.color ? "1" : "0");
  meta.set("seed", std::to_string(dataset.seed));
  meta.set("normalized", dataset.normalized() ? "1" : "0");
  meta.set("norm_min", join_doubles(dataset.norm_min));
  meta.set("norm_max", join_doubles(dataset.norm_max));
  std::string degenerate;
  for (std::size_t i = 0; i < dataset.degenerate.size(); ++i) {
    if (i) degenerate += ',';
    degenerate += dataset.degenerate[i] ? '1' : '0';
  }
  meta.set("degenerate", degenerate);
  meta.write(path.string() + ".meta");
}

Dataset load_dataset(const std::filesystem::path& path) {
  const std::filesystem::path meta_path = path.string() + ".meta";
  if (!std::filesystem::exists(meta_path)) return load_csv(path);

  const auto meta = KeyValueFile::read(meta_path);
  const auto flag = [&](const char* key) { return meta.get(key).value_or("0") == "1"; };
  const bool has_labels = flag("has_labels");
  const bool has_color = flag("has_color");

  Dataset raw = load_csv(path);
  Index d = raw.n_features() - (has_labels ? 1 : 0) - (has_color ? 1 : 0);
  const auto expected = parse_integer(meta.get("n_features").value_or(""));
  if (d < 0 || !expected || *expected != d)
    throw DataError("column count does not match metadata in '" + meta_path.string() + "'");

  Dataset out;
  out.features = raw.features.leftCols(d);
  if (has_labels) {
    out.labels = Eigen::VectorXi(raw.n_instances());
    for (Index r = 0; r < raw.n_instances(); ++r)
      (*out.labels)[r] = static_cast<int>(std::lround(raw.features(r, d)));
  }
  if (has_color) out.color = raw.features.col(raw.n_features() - 1);
  out.seed = static_cast<std::uint64_t>(parse_integer(meta.get("seed").value_or("0")).value_or(0));
  if (flag("normalized")) {
    auto lo = parse_doubles(meta.get("norm_min").value_or(""));
    auto hi = parse_doubles(meta.get("norm_max").value_or(""));
    if (!lo || !hi || lo->size() != d || hi->size() != d)
      throw DataError("corrupt normalisation bounds in '" + meta_path.string() + "'");
    out.norm_min = *lo;
    out.norm_max = *hi;
    out.degenerate.assign(static_cast<std::size_t>(d), 0);
    const auto deg = meta.get("degenerate").value_or("");
    const auto fields = split_fields(deg, ',');
    for (std::size_t i = 0; i < fields.size() && i < out.degenerate.size(); ++i)
      out.degenerate[i] = fields[i] == "1";
  }
  return out;
}

Dataset generate_swiss_roll(Index n_points, double noise_sd, std::uint64_t seed) {
  if (n_points <= 0) throw std::invalid_argument("generate_swiss_roll: n_points must be > 0");
  if (noise_sd < 0) throw std::invalid_argument("generate_swiss_roll: noise_sd must be >= 0");
  constexpr double pi = std::numbers::pi;
  RandomStream rng(mix_seed(seed, stream::data));
  Dataset out;
  out.seed = seed;
  out.features.resize(n_points, 3);
  out.color = Eigen::VectorXd(n_points);
  for (Index i = 0; i < n_points; ++i) {
    const double u = 1.5 * pi * (1.0 + 2.0 * rng.uniform());
    const double v = 21.0 * rng.uniform();
    out.features(i, 0) = u * std::cos(u) + noise_sd * rng.normal();
    out.features(i, 1) = v + noise_sd * rng.normal();
    out.features(i, 2) = u * std::sin(u) + noise_sd * rng.normal();
    (*out.color)[i] = u;
  }
  return out;
}

Dataset generate_madelon_like(Index n_points, Index n_features, std::uint64_t seed) {
  if (n_points <= 0 || n_features <= 0)
    throw std::invalid_argument("generate_madelon_like: sizes must be > 0");
  constexpr Index base_dims = 5;
  constexpr Index n_clusters = 32;
  constexpr Index informative = 20;
  RandomStream rng(mix_seed(seed, stream::data));

  Eigen::VectorXi cluster_label(n_clusters);
  for (Index c = 0; c < n_clusters; ++c) cluster_label[c] = c < n_clusters / 2 ? 1 : 0;
  std::shuffle(cluster_label.data(), cluster_label.data() + n_clusters, rng.engine());

  Eigen::MatrixXd mixing(informative - base_dims, base_dims);
  for (Index i = 0; i < mixing.size(); ++i) mixing.data()[i] = 2.0 * rng.uniform() - 1.0;

  Dataset out;
  out.seed = seed;
  out.features.resize(n_points, n_features);
  out.labels = Eigen::VectorXi(n_points);
  Eigen::VectorXd base(base_dims);
  for (Index i = 0; i < n_points; ++i) {
    const Index cluster = i % n_clusters;
    for (Index k = 0; k < base_dims; ++k)
      base[k] = ((cluster >> k) & 1 ? 1.0 : -1.0) + rng.normal();
    Eigen::VectorXd row(std::max(n_features, informative));
    row.head(base_dims) = base;
    row.segment(base_dims, informative - base_dims) = mixing * base;
    for (Index k = informative; k < row.size(); ++k) row[k] = rng.normal();
    out.features.row(i) = row.head(n_features).transpose();
    (*out.labels)[i] = cluster_label[cluster];
  }
  return out;
}

Dataset generate_clusters(Index n_points, Index n_features, Index n_classes, double separation,
                          double cluster_sd, std::uint64_t seed) {
  if (n_points <= 0 || n_features <= 0 || n_classes <= 0)
    throw std::invalid_argument("generate_clusters: sizes must be > 0");
  RandomStream rng(mix_seed(seed, stream::data));
  Dataset out;
  out.seed = seed;
  out.features.resize(n_points, n_features);
  out.labels = Eigen::VectorXi(n_points);
  for (Index i = 0; i < n_points; ++i) {
    const Index c = i % n_classes;
    for (Index j = 0; j < n_features; ++j)
      out.features(i, j) = (j == 0 ? separation * static_cast<double>(c) : 0.0) +
                           cluster_sd * rng.normal();
    (*out.labels)[i] = static_cast<int>(c);
  }
  return out;
}

Dataset normalize(const Dataset& dataset) {
  Dataset out = dataset;
  const Index d = dataset.n_features();
  if (dataset.n_instances() == 0) {
    out.norm_min = Eigen::VectorXd::Zero(d);
    out.norm_max = Eigen::VectorXd::Zero(d);
    out.degenerate.assign(static_cast<std::size_t>(d), 1);
    return out;
  }
  out.norm_min = dataset.features.colwise().minCoeff().transpose();
  out.norm_max = dataset.features.colwise().maxCoeff().transpose();
  out.degenerate.assign(static_cast<std::size_t>(d), 0);
  for (Index j = 0; j < d; ++j) {
    const double lo = out.norm_min[j];
    const double range = out.norm_max[j] - lo;
    if (range == 0.0) {
      out.features.col(j).setZero();
      out.degenerate[static_cast<std::size_t>(j)] = 1;
    } else {
      out.features.col(j) = (dataset.features.col(j).array() - lo) / range;
    }
  }
  return out;
}

Dataset apply_normalization(const Dataset& dataset, const Dataset& reference) {
  if (!reference.normalized() || reference.n_features() != dataset.n_features())
    throw std::invalid_argument("apply_normalization: reference bounds missing or mismatched");
  Dataset out = dataset;
  out.norm_min = reference.norm_min;
  out.norm_max = reference.norm_max;
  out.degenerate = reference.degenerate;
  for (Index j = 0; j < dataset.n_features(); ++j) {
    const double lo = reference.norm_min[j];
    const double range = reference.norm_max[j] - lo;
    if (range == 0.0)
      out.features.col(j).setZero();
    else
      out.features.col(j) = (dataset.features.col(j).array() - lo) / range;
  }
  return out;
}

Eigen::MatrixXd denormalize(const Eigen::MatrixXd& normalized, const Dataset& reference) {
  if (!reference.normalized() || normalized.cols() != reference.n_features())
    throw std::invalid_argument("denormalize: reference bounds missing or mismatched");
  Eigen::MatrixXd out(normalized.rows(), normalized.cols());
  for (Index j = 0; j < normalized.cols(); ++j) {
    const double lo = reference.norm_min[j];
    const double range = reference.norm_max[j] - lo;
    out.col(j) = (normalized.col(j).array() * range + lo).matrix();
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec) {
  if (spec.train_count < 1 || spec.test_count < 0 ||
      spec.train_count + spec.test_count > dataset.n_instances())
    throw std::invalid_argument("split: train_count + test_count exceeds n_instances (" +
                                std::to_string(dataset.n_instances()) + ")");
  std::vector<Index> order(static_cast<std::size_t>(dataset.n_instances()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 engine(mix_seed(spec.shuffle_seed, stream::data));
  std::shuffle(order.begin(), order.end(), engine);

  const auto n_train = static_cast<std::size_t>(spec.train_count);
  const auto n_test = static_cast<std::size_t>(spec.test_count);
  const std::vector<Index> train_rows(order.begin(), order.begin() + n_train);
  const std::vector<Index> test_rows(order.begin() + n_train, order.begin() + n_train + n_test);

  Dataset train = normalize(take_rows(dataset, train_rows));
  Dataset test = apply_normalization(take_rows(dataset, test_rows), train);
  return {std::move(train), std::move(test)};
}

Dataset select_features(const Dataset& dataset, const std::vector<Index>& columns) {
  Dataset out = dataset;
  out.features.resize(dataset.n_instances(), static_cast<Index>(columns.size()));
  const bool norm = dataset.normalized();
  if (norm) {
    out.norm_min.resize(out.features.cols());
    out.norm_max.resize(out.features.cols());
    out.degenerate.assign(columns.size(), 0);
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Index c = columns[i];
    if (c < 0 || c >= dataset.n_features())
      throw std::out_of_range("select_features: column " + std::to_string(c));
    const auto dst = static_cast<Index>(i);
    out.features.col(dst) = dataset.features.col(c);
    if (norm) {
      out.norm_min[dst] = dataset.norm_min[c];
      out.norm_max[dst] = dataset.norm_max[c];
      out.degenerate[i] = dataset.degenerate[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

}  // namespace bae
