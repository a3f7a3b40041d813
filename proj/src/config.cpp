#include "bae/config.hpp"

#include <functional>
#include <map>

#include "bae/errors.hpp"

namespace bae {
namespace {

std::string join_indices(const std::vector<Index>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(values[i]);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) +
                    " (expected " + std::string(want) + ")");
}

double as_double(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

long long as_integer(std::string_view key, std::string_view value) {
  const auto v = parse_integer(value);
  if (!v) bad_value(key, value, "an integer");
  return *v;
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  bad_value(key, value, "true/false");
}

std::vector<Index> as_indices(std::string_view key, std::string_view value) {
  std::vector<Index> out;
  if (trim(value).empty()) return out;
  for (const auto f : split_fields(value, ',')) out.push_back(static_cast<Index>(as_integer(key, f)));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  const char* key;
  Setter set;
  Getter get;
};

#define BAE_DOUBLE(KEY, MEMBER)                                                           \
  Field {                                                                                 \
    KEY, [](ExperimentConfig& c, std::string_view k, std::string_view v) {                \
      c.MEMBER = as_double(k, v);                                                         \
    },                                                                                    \
        [](const ExperimentConfig& c) { return format_double(c.MEMBER); }                 \
  }
#define BAE_INDEX(KEY, MEMBER)                                                            \
  Field {                                                                                 \
    KEY, [](ExperimentConfig& c, std::string_view k, std::string_view v) {                \
      c.MEMBER = static_cast<decltype(c.MEMBER)>(as_integer(k, v));                       \
    },                                                                                    \
        [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }                \
  }
#define BAE_BOOL(KEY, MEMBER)                                                             \
  Field {                                                                                 \
    KEY, [](ExperimentConfig& c, std::string_view k, std::string_view v) {                \
      c.MEMBER = as_bool(k, v);                                                           \
    },                                                                                    \
        [](const ExperimentConfig& c) { return std::string(c.MEMBER ? "true" : "false"); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"dataset.kind",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         if (v == "swiss_roll") c.dataset.kind = DatasetKind::swiss_roll;
         else if (v == "madelon_like") c.dataset.kind = DatasetKind::madelon_like;
         else if (v == "clusters") c.dataset.kind = DatasetKind::clusters;
         else if (v == "csv") c.dataset.kind = DatasetKind::csv;
         else bad_value(k, v, "swiss_roll|madelon_like|clusters|csv");
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.dataset.kind)); }},
      {"dataset.path",
       [](ExperimentConfig& c, std::string_view, std::string_view v) { c.dataset.path = std::string(v); },
       [](const ExperimentConfig& c) { return c.dataset.path; }},
      BAE_BOOL("dataset.has_labels", dataset.has_labels),
      BAE_INDEX("dataset.label_column", dataset.label_column),
      BAE_INDEX("dataset.n_points", dataset.n_points),
      BAE_DOUBLE("dataset.noise_sd", dataset.noise_sd),
      BAE_INDEX("dataset.n_features", dataset.n_features),
      BAE_INDEX("dataset.n_classes", dataset.n_classes),
      BAE_DOUBLE("dataset.separation", dataset.separation),
      BAE_DOUBLE("dataset.cluster_sd", dataset.cluster_sd),
      BAE_INDEX("dataset.seed", dataset.seed),
      BAE_INDEX("split.train_count", split.train_count),
      BAE_INDEX("split.test_count", split.test_count),
      BAE_INDEX("split.seed", split.shuffle_seed),
      {"model.layers",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.layers = as_indices(k, v); },
       [](const ExperimentConfig& c) { return join_indices(c.layers); }},
      {"model.hidden_activation",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         try {
           c.hidden_activation = parse_activation(v);
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "sigmoid|tanh|identity");
         }
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.hidden_activation)); }},
      {"model.output_activation",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         try {
           c.output_activation = parse_activation(v);
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "sigmoid|tanh|identity");
         }
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.output_activation)); }},
      BAE_DOUBLE("model.init_sd", init_sd),
      BAE_BOOL("model.shared_init", shared_init),
      BAE_DOUBLE("prior.sigma_sq", prior.sigma_sq),
      BAE_DOUBLE("prior.nu_1", prior.nu_1),
      BAE_DOUBLE("prior.nu_2", prior.nu_2),
      BAE_DOUBLE("proposal.step_sd", proposal.step_sd),
      BAE_DOUBLE("proposal.learn_rate", proposal.learn_rate),
      BAE_DOUBLE("proposal.tau_step_sd", proposal.tau_step_sd),
      BAE_DOUBLE("proposal.lg_rate", proposal.lg_rate),
      BAE_DOUBLE("proposal.adam_beta1", proposal.adam_beta1),
      BAE_DOUBLE("proposal.adam_beta2", proposal.adam_beta2),
      BAE_DOUBLE("proposal.adam_eps", proposal.adam_eps),
      BAE_INDEX("tempering.n_replicas", tempering.n_replicas),
      BAE_DOUBLE("tempering.t_max", tempering.t_max),
      BAE_INDEX("tempering.swap_interval", tempering.swap_interval),
      BAE_INDEX("tempering.max_samples", tempering.max_samples),
      BAE_INDEX("tempering.switch_sample", tempering.switch_sample),
      BAE_INDEX("tempering.seed", tempering.seed),
      {"tempering.mode",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         if (v == "reference") c.mode = ExecutionMode::reference;
         else if (v == "worker_pool") c.mode = ExecutionMode::worker_pool;
         else bad_value(k, v, "reference|worker_pool");
       },
       [](const ExperimentConfig& c) {
         return std::string(c.mode == ExecutionMode::reference ? "reference" : "worker_pool");
       }},
      BAE_INDEX("tempering.n_workers", n_workers),
      BAE_INDEX("output.thin", thin),
      BAE_BOOL("output.snapshot_burn_in", snapshot_burn_in),
      {"output.dir",
       [](ExperimentConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); },
       [](const ExperimentConfig& c) { return c.output_dir; }},
      {"diagnostics.param_ids",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.rhat_ids = as_indices(k, v); },
       [](const ExperimentConfig& c) { return join_indices(c.rhat_ids); }},
      BAE_INDEX("diagnostics.knn_k", knn_k),
      BAE_INDEX("diagnostics.max_members", max_members),
  };
  return table;
}

#undef BAE_DOUBLE
#undef BAE_INDEX
#undef BAE_BOOL

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::swiss_roll:
      return "swiss_roll";
    case DatasetKind::madelon_like:
      return "madelon_like";
    case DatasetKind::clusters:
      return "clusters";
    case DatasetKind::csv:
      return "csv";
  }
  return "unknown";
}

Topology ExperimentConfig::topology() const {
  return Topology::from_sizes(layers, hidden_activation, output_activation);
}

EnsembleOptions ExperimentConfig::ensemble_options() const {
  EnsembleOptions o;
  o.mode = mode;
  o.n_workers = n_workers;
  o.thin = thin;
  o.snapshot_burn_in = snapshot_burn_in;
  o.init_sd = init_sd;
  o.shared_init = shared_init;
  return o;
}

std::vector<std::string> preset_names() {
  return {"swiss_roll_desk", "swiss_roll_full", "madelon_desk",
          "madelon_full",   "coil_desk",        "coil_full"};
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;  // defaults are the full-scale hyperparameters
  if (name == "swiss_roll_full" || name == "swiss_roll_desk") {
    c.dataset.kind = DatasetKind::swiss_roll;
    c.dataset.n_points = 5000;
    c.split = {3750, 1250, 1};
    c.layers = {3, 10, 5, 2, 5, 10, 3};
    c.rhat_ids = {0, 50, 100, 150};
    if (name == "swiss_roll_desk") {
      c.tempering.n_replicas = 4;
      c.tempering.max_samples = 2000;
      c.tempering.switch_sample = 1000;
    }
    return c;
  }
  if (name == "madelon_full" || name == "madelon_desk") {
    c.dataset.kind = DatasetKind::madelon_like;
    c.dataset.n_points = 3800;
    c.dataset.n_features = 500;
    c.split = {2000, 1800, 1};
    c.layers = {500, 450, 400, 300, 400, 450, 500};
    c.rhat_ids = {0, 50, 100, 150, 2000, 3000, 4000, 6000, 9000, 10000};
    c.thin = 100;
    if (name == "madelon_desk") {
      c.dataset.n_points = 700;
      c.dataset.n_features = 50;
      c.split = {500, 200, 1};
      c.layers = {50, 45, 40, 30, 40, 45, 50};
      c.tempering.n_replicas = 4;
      c.tempering.max_samples = 1000;
      c.tempering.switch_sample = 500;
      c.thin = 5;
    }
    return c;
  }
  if (name == "coil_full" || name == "coil_desk") {
    c.dataset.kind = DatasetKind::csv;
    c.dataset.path = "data/coil2000.csv";
    c.dataset.has_labels = true;
    c.dataset.label_column = -1;
    c.split = {5822, 4000, 1};
    c.layers = {85, 70, 60, 50, 60, 70, 85};
    c.rhat_ids = {0, 50, 100, 150, 2000, 3000, 4000, 6000, 9000, 10000};
    c.thin = 10;
    if (name == "coil_desk") {
      c.split = {1000, 500, 1};
      c.tempering.n_replicas = 4;
      c.tempering.max_samples = 1000;
      c.tempering.switch_sample = 500;
      c.thin = 5;
    }
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

void apply_override(ExperimentConfig& config, std::string_view key, std::string_view value) {
  if (key.starts_with("manifest.")) return;
  if (key == "preset") {
    config = preset(value);
    return;
  }
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(config, key, trim(value));
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void apply_overrides(ExperimentConfig& config, const KeyValueFile& values) {
  if (const auto p = values.get("preset")) config = preset(*p);
  for (const auto& [k, v] : values.entries())
    if (k != "preset") apply_override(config, k, v);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig config;
  try {
    apply_overrides(config, KeyValueFile::read(path));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return config;
}

KeyValueFile to_key_values(const ExperimentConfig& config) {
  KeyValueFile kv;
  for (const auto& f : fields()) kv.set(f.key, f.get(config));
  return kv;
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> problems;
  auto check = [&](bool ok, std::string msg) {
    if (!ok) problems.push_back(std::move(msg));
  };
  auto guard = [&](auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      problems.emplace_back(e.what());
    }
  };
  guard([&] { c.prior.validate(); });
  guard([&] { c.proposal.validate(); });
  guard([&] { c.tempering.validate(); });
  guard([&] { (void)c.topology(); });
  check(c.thin >= 1, "output.thin must be >= 1");
  check(c.knn_k >= 1, "diagnostics.knn_k must be >= 1");
  check(c.max_members >= 1, "diagnostics.max_members must be >= 1");
  check(c.init_sd >= 0.0, "model.init_sd must be >= 0");
  check(c.split.train_count >= 1, "split.train_count must be >= 1");
  check(c.split.test_count >= 0, "split.test_count must be >= 0");

  Index input_dim = -1;
  switch (c.dataset.kind) {
    case DatasetKind::swiss_roll:
      input_dim = 3;
      break;
    case DatasetKind::madelon_like:
    case DatasetKind::clusters:
      input_dim = c.dataset.n_features;
      check(c.dataset.n_features >= 1, "dataset.n_features must be >= 1");
      break;
    case DatasetKind::csv:
      check(!c.dataset.path.empty(), "dataset.path is required for csv datasets");
      check(c.dataset.path.empty() || std::filesystem::exists(c.dataset.path),
            "dataset.path '" + c.dataset.path + "' does not exist");
      break;
  }
  if (c.dataset.kind != DatasetKind::csv) {
    check(c.dataset.n_points >= 1, "dataset.n_points must be >= 1");
    check(c.split.train_count + c.split.test_count <= c.dataset.n_points,
          "split.train_count + split.test_count exceeds dataset.n_points");
    check(c.dataset.noise_sd >= 0.0, "dataset.noise_sd must be >= 0");
  }
  if (input_dim > 0 && !c.layers.empty())
    check(c.layers.front() == input_dim,
          "model.layers input size " + std::to_string(c.layers.front()) +
              " does not match dataset feature count " + std::to_string(input_dim));

  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

Dataset materialize(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::swiss_roll:
      return generate_swiss_roll(spec.n_points, spec.noise_sd, spec.seed);
    case DatasetKind::madelon_like:
      return generate_madelon_like(spec.n_points, spec.n_features, spec.seed);
    case DatasetKind::clusters:
      return generate_clusters(spec.n_points, spec.n_features, spec.n_classes, spec.separation,
                               spec.cluster_sd, spec.seed);
    case DatasetKind::csv:
      // Files written by `generate` carry a sidecar describing label/color columns.
      if (std::filesystem::exists(spec.path + ".meta")) return load_dataset(spec.path);
      return load_csv(spec.path, spec.has_labels, spec.label_column);
  }
  throw ConfigError("unknown dataset kind");
}

}  // namespace bae
