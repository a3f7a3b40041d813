// bae: sample Bayesian autoencoders with parallel-tempered MCMC.
//
// Exit codes: 0 ok, 2 usage, 3 configuration, 4 data / IO, 5 runtime.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "bae/errors.hpp"
#include "bae/experiment.hpp"
#include "bae/run_io.hpp"

namespace fs = std::filesystem;
using namespace bae;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kUsage = 2, kConfig = 3, kData = 4, kRuntime = 5 };

fs::path output_root() {
  if (const char* root = std::getenv("BAE_OUTPUT_ROOT"); root && *root) return root;
  return ".";
}

fs::path resolve_output(const std::string& dir) {
  const fs::path p(dir);
  return p.is_absolute() ? p : output_root() / p;
}

/// --preset, --config, --set key=value and one --<key> flag per config key.
struct ConfigFlags {
  std::string preset_name;
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> keyed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--preset", preset_name, "start from a named preset")
        ->check(CLI::IsMember(preset_names()));
    cmd->add_option("--config", config_path, "key=value configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "override: key=value (repeatable)");
    const KeyValueFile defaults = to_key_values(ExperimentConfig{});
    for (const auto& [key, value] : defaults.entries())
      cmd->add_option("--" + key, keyed[key], "default " + value);
  }

  ExperimentConfig build() const {
    ExperimentConfig config;
    if (!preset_name.empty()) config = preset(preset_name);
    if (!config_path.empty()) apply_overrides(config, KeyValueFile::read(config_path));
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      apply_override(config, s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, value] : keyed)
      if (!value.empty()) apply_override(config, key, value);
    return config;
  }
};

void print_summary(const PosteriorSummary& s) {
  std::cout << "train MSE best " << s.train.best << " mean " << s.train.mean << " std "
            << s.train.std << "\n"
            << "test  MSE best " << s.test.best << " mean " << s.test.mean << " std "
            << s.test.std << "\n"
            << "acceptance " << s.acceptance_pct << "% (all samples " << s.acceptance_pct_all
            << "%), swap " << s.swap_pct << "%, " << s.wall_minutes << " min\n";
}

KeyValueFile summary_values(const PosteriorSummary& s, Index posterior_size) {
  KeyValueFile kv;
  kv.set("posterior_size", std::to_string(posterior_size));
  kv.set("train_mse.best", format_double(s.train.best));
  kv.set("train_mse.mean", format_double(s.train.mean));
  kv.set("train_mse.std", format_double(s.train.std));
  kv.set("test_mse.best", format_double(s.test.best));
  kv.set("test_mse.mean", format_double(s.test.mean));
  kv.set("test_mse.std", format_double(s.test.std));
  kv.set("acceptance_pct", format_double(s.acceptance_pct));
  kv.set("acceptance_pct_all", format_double(s.acceptance_pct_all));
  kv.set("swap_pct", format_double(s.swap_pct));
  kv.set("wall_minutes", format_double(s.wall_minutes));
  kv.set("map.index", std::to_string(s.map_index));
  kv.set("map.log_posterior", format_double(s.map_log_posterior));
  kv.set("map.tau_sq", format_double(s.map_state.tau_sq()));
  return kv;
}

PosteriorSummary summarize_run(const RunArtifacts& run) {
  if (run.result.posterior.empty())
    throw DataError("run has no post-burn-in snapshots; nothing to summarise");
  const Eigen::MatrixXd& test =
      run.test.n_instances() > 0 ? run.test.features : run.train.features;
  auto s = summarize(run.result.posterior, run.topology, run.config.prior, run.train.features,
                     test);
  attach_run_stats(s, run.result);
  return s;
}

// ---- generate -------------------------------------------------------------

int cmd_generate(const ConfigFlags& flags, const std::string& out) {
  const ExperimentConfig config = flags.build();
  if (config.dataset.n_points <= 0) throw UsageError("dataset.n_points must be positive");
  if (config.dataset.kind == DatasetKind::csv)
    throw UsageError("generate needs a synthetic dataset.kind, not csv");
  const Dataset data = materialize(config.dataset);
  const fs::path path = out.empty() ? resolve_output("data") / (std::string(to_string(config.dataset.kind)) + ".csv")
                                    : fs::path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_dataset(data, path);
  std::cout << "wrote " << path.string() << " (" << data.n_instances() << " x "
            << data.n_features() << ") and " << path.string() << ".meta\n";
  return kOk;
}

// ---- sample ---------------------------------------------------------------

int cmd_sample(const ConfigFlags& flags, const std::string& out) {
  ExperimentConfig config = flags.build();
  if (!out.empty()) config.output_dir = out;
  validate(config);
  const fs::path dir = resolve_output(config.output_dir);
  fs::create_directories(dir);

  auto [train, test] = prepare_data(config);
  const Topology topology = config.topology();
  std::cout << "topology " << topology.describe() << ", " << total_params(topology)
            << " parameters, " << config.tempering.n_replicas << " replicas, "
            << config.tempering.max_samples << " samples\n";
  const AutoencoderTarget target(
      topology, config.prior, train.features,
      test.n_instances() > 0 ? std::optional<Eigen::MatrixXd>(test.features) : std::nullopt);
  EnsembleResult result;
  try {
    result = run_ensemble(config.tempering, config.proposal, target, config.ensemble_options());
  } catch (const EnsembleAborted& e) {
    write_run(dir, config, e.partial(), train, test, false);
    std::cerr << "run aborted: " << e.what() << "\npartial results in " << dir.string() << "\n";
    return kRuntime;
  }
  write_run(dir, config, result, train, test, true);
  if (!result.posterior.empty()) {
    const Eigen::MatrixXd& t = test.n_instances() > 0 ? test.features : train.features;
    auto s = summarize(result.posterior, topology, config.prior, train.features, t);
    attach_run_stats(s, result);
    summary_values(s, static_cast<Index>(result.posterior.size())).write(dir / "summary.txt");
    write_param_vector(dir / "map_params.txt", topology, s.map_state);
    print_summary(s);
  }
  std::cout << "run written to " << dir.string() << "\n";
  return kOk;
}

// ---- diagnose -------------------------------------------------------------

int cmd_diagnose(const std::string& run_dir, const std::optional<std::string>& ids_text) {
  const RunArtifacts run = load_run(run_dir);
  std::vector<Index> ids = run.config.rhat_ids;
  if (ids_text) {
    ids.clear();
    for (const auto f : split_fields(*ids_text, ',')) {
      if (trim(f).empty()) continue;
      const auto v = parse_integer(trim(f));
      if (!v || *v < 0) throw UsageError("bad parameter id '" + std::string(f) + "'");
      ids.push_back(static_cast<Index>(*v));
    }
  }

  const fs::path dir(run_dir);
  const auto chains = posterior_chains(run.result);
  std::string table = "parameter_id,r_hat,status\n";
  for (const Index id : ids) {
    std::string row = std::to_string(id) + ",";
    try {
      const auto report = rhat_report(chains, {id});
      const auto& r = report.entries.front().r_hat;
      row += r ? format_double(*r) + ",ok" : ",degenerate";
    } catch (const std::exception& e) {
      row += ",error: " + std::string(e.what());
    }
    table += row + "\n";
    std::cout << "R-hat " << row << "\n";
  }
  if (!ids.empty()) write_text_file(dir / "rhat.csv", table);

  const auto s = summarize_run(run);
  summary_values(s, static_cast<Index>(run.result.posterior.size())).write(dir / "summary.txt");
  print_summary(s);

  std::string trace = "sample";
  for (const auto& c : run.result.chains) trace += ",log_likelihood_" + std::to_string(c.replica_id);
  trace += "\n";
  const std::size_t n = run.result.chains.empty() ? 0 : run.result.chains.front().trace.size();
  for (std::size_t i = 0; i < n; ++i) {
    trace += std::to_string(run.result.chains.front().trace[i].sample);
    for (const auto& c : run.result.chains)
      trace += "," + (i < c.trace.size() ? format_double(c.trace[i].log_likelihood) : "");
    trace += "\n";
  }
  write_text_file(dir / "likelihood_trace.csv", trace);
  return kOk;
}

// ---- reduce ---------------------------------------------------------------

int cmd_reduce(const std::string& run_dir, const std::string& data_path, const std::string& split_name,
               Index max_members, bool per_member) {
  if (max_members < 1) throw UsageError("--max-members must be >= 1");
  const RunArtifacts run = load_run(run_dir);
  if (run.result.posterior.empty()) throw DataError("run has no posterior samples");

  Dataset data;
  if (!data_path.empty()) {
    data = apply_normalization(load_dataset(data_path), run.train);
  } else if (split_name == "test") {
    data = run.test;
  } else {
    data = run.train;
  }
  if (data.n_features() != run.topology.input_dim())
    throw DataError("data has " + std::to_string(data.n_features()) + " features, model expects " +
                    std::to_string(run.topology.input_dim()));

  const auto reduced = reduce_ensemble(run.result.posterior, data.features, run.topology, max_members);
  const fs::path dir = fs::path(run_dir) / "reduced";
  fs::create_directories(dir);
  write_text_file(dir / "latent_mean.csv", matrix_csv(reduced.mean, "z"));
  write_text_file(dir / "latent_sd.csv", matrix_csv(reduced.sd, "sd_z"));
  if (per_member)
    for (std::size_t i = 0; i < reduced.members.size(); ++i)
      write_text_file(dir / ("member_" + std::to_string(reduced.member_indices[i]) + ".csv"),
                      matrix_csv(reduced.members[i], "z"));
  if (data.color) {
    std::string scatter;
    for (Index c = 0; c < reduced.mean.cols(); ++c) scatter += "z" + std::to_string(c) + ",";
    scatter += "color\n";
    for (Index r = 0; r < reduced.mean.rows(); ++r)
      scatter += join_doubles(reduced.mean.row(r).transpose()) + "," + format_double((*data.color)[r]) + "\n";
    write_text_file(dir / "scatter.csv", scatter);
  }
  std::cout << "reduced " << data.n_instances() << " x " << data.n_features() << " to "
            << reduced.mean.rows() << " x " << reduced.mean.cols() << " using "
            << reduced.members.size() << " posterior members; files in " << dir.string() << "\n";
  return kOk;
}

// ---- benchmark ------------------------------------------------------------

int cmd_benchmark(const std::string& run_dir, Index k, Index max_members) {
  if (k < 1) throw UsageError("--k must be >= 1");
  if (max_members < 1) throw UsageError("--max-members must be >= 1");
  const RunArtifacts run = load_run(run_dir);
  if (!run.train.labels || !run.test.labels)
    throw DataError("benchmark needs labelled train and test data in the run directory");
  if (run.test.n_instances() == 0) throw DataError("benchmark needs a non-empty test split");
  if (run.result.posterior.empty()) throw DataError("run has no posterior samples");

  const auto& ytr = *run.train.labels;
  const auto& yte = *run.test.labels;
  const double original = knn_classify(run.train.features, ytr, run.test.features, yte, k);

  const auto s = summarize_run(run);
  const auto enc = [&](const ModelState& st, const Eigen::MatrixXd& x) {
    return encode<double>(run.topology, st.params, x);
  };
  const double map_acc = knn_classify(enc(s.map_state, run.train.features), ytr,
                                      enc(s.map_state, run.test.features), yte, k);

  const auto train_red = reduce_ensemble(run.result.posterior, run.train.features, run.topology, max_members);
  const auto test_red = reduce_ensemble(run.result.posterior, run.test.features, run.topology, max_members);
  std::vector<double> member_acc;
  for (std::size_t i = 0; i < train_red.members.size(); ++i)
    member_acc.push_back(knn_classify(train_red.members[i], ytr, test_red.members[i], yte, k));
  double best = 0, mean = 0, var = 0;
  for (double a : member_acc) {
    best = std::max(best, a);
    mean += a / static_cast<double>(member_acc.size());
  }
  for (double a : member_acc) var += (a - mean) * (a - mean);
  const double sd = member_acc.size() > 1 ? std::sqrt(var / static_cast<double>(member_acc.size() - 1)) : 0.0;

  KeyValueFile kv;
  kv.set("k", std::to_string(k));
  kv.set("original.accuracy", format_double(original));
  kv.set("map_reduced.accuracy", format_double(map_acc));
  kv.set("members.count", std::to_string(member_acc.size()));
  kv.set("members.best", format_double(best));
  kv.set("members.mean", format_double(mean));
  kv.set("members.std", format_double(sd));
  kv.write(fs::path(run_dir) / "benchmark.txt");
  std::cout << kv.to_string();
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const ConfigFlags& flags, const std::string& axis, const std::string& values_text,
              const std::string& out) {
  if (axis != "lg_rate" && axis != "n_replicas")
    throw UsageError("--axis must be lg_rate or n_replicas");
  std::vector<std::string> values;
  for (const auto f : split_fields(values_text, ','))
    if (!trim(f).empty()) values.emplace_back(trim(f));
  if (values.empty()) throw UsageError("--values must list at least one value");

  const ExperimentConfig base = flags.build();
  const std::string key = axis == "lg_rate" ? "proposal.lg_rate" : "tempering.n_replicas";
  // Check every variant before running any of them.
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig c = base;
    apply_override(c, key, v);
    validate(c);
    configs.push_back(std::move(c));
  }

  const fs::path root = resolve_output(out.empty() ? base.output_dir : out);
  fs::create_directories(root);
  std::string table =
      axis + ",status,train_best,train_mean,train_std,test_best,test_mean,test_std,swap_pct,"
             "acceptance_pct,minutes,error\n";
  int failures = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::cout << "== " << axis << " = " << values[i] << std::endl;
    std::string row = values[i] + ",";
    try {
      const auto o = run_experiment(configs[i]);
      write_run(root / (axis + "_" + values[i]), configs[i], o.result, o.train, o.test, true);
      const auto& s = o.summary;
      row += "ok," + format_double(s.train.best) + "," + format_double(s.train.mean) + "," +
             format_double(s.train.std) + "," + format_double(s.test.best) + "," +
             format_double(s.test.mean) + "," + format_double(s.test.std) + "," +
             format_double(s.swap_pct) + "," + format_double(s.acceptance_pct) + "," +
             format_double(s.wall_minutes) + ",";
      print_summary(s);
    } catch (const std::exception& e) {
      ++failures;
      std::string msg = e.what();
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      row += "failed,,,,,,,,,," + msg;
      std::cerr << "run failed: " << e.what() << "\n";
    }
    table += row + "\n";
    write_text_file(root / "sweep.csv", table);
  }
  std::cout << "sweep table written to " << (root / "sweep.csv").string() << "\n";
  return failures == 0 ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian autoencoders sampled with parallel-tempered Langevin MCMC"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, sample_flags, sweep_flags;
  std::string gen_out, sample_out, sweep_out, run_dir, data_path, split_name = "train", axis,
                                                                   values;
  std::optional<std::string> ids;
  Index max_members = 100, k = 5;
  bool per_member = false;

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset and its metadata sidecar");
  gen_flags.attach(gen);
  gen->add_option("-o,--out", gen_out, "output CSV path (default $BAE_OUTPUT_ROOT/data/<kind>.csv)");

  auto* sample = app.add_subcommand("sample", "run the tempered ensemble and write a run directory");
  sample_flags.attach(sample);
  sample->add_option("-o,--out", sample_out, "run directory (overrides output.dir)");

  auto* diagnose = app.add_subcommand("diagnose", "R-hat table and posterior summary for a run");
  diagnose->add_option("run_dir", run_dir)->required()->check(CLI::ExistingDirectory);
  diagnose->add_option("--ids", ids, "comma-separated parameter ids (default from the run config)");

  auto* reduce = app.add_subcommand("reduce", "encode data with the posterior ensemble");
  reduce->add_option("run_dir", run_dir)->required()->check(CLI::ExistingDirectory);
  reduce->add_option("--data", data_path, "raw data file, scaled with the run's training bounds");
  reduce->add_option("--split", split_name, "run split to reduce when --data is absent")
      ->check(CLI::IsMember({"train", "test"}));
  reduce->add_option("--max-members", max_members, "posterior members to use");
  reduce->add_flag("--per-member", per_member, "also write each member's latent matrix");

  auto* bench = app.add_subcommand("benchmark", "kNN accuracy on original and reduced features");
  bench->add_option("run_dir", run_dir)->required()->check(CLI::ExistingDirectory);
  bench->add_option("--k", k, "neighbours");
  bench->add_option("--max-members", max_members, "posterior members to score");

  auto* sweep = app.add_subcommand("sweep", "one run per value of lg_rate or n_replicas");
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", axis, "lg_rate | n_replicas")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("-o,--out", sweep_out, "sweep directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_flags, gen_out);
    if (*sample) return cmd_sample(sample_flags, sample_out);
    if (*diagnose) return cmd_diagnose(run_dir, ids);
    if (*reduce) return cmd_reduce(run_dir, data_path, split_name, max_members, per_member);
    if (*bench) return cmd_benchmark(run_dir, k, max_members);
    if (*sweep) return cmd_sweep(sweep_flags, axis, values, sweep_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
