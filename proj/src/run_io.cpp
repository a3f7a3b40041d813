#include "bae/run_io.hpp"

#include <sstream>

#include "bae/errors.hpp"

namespace bae {
namespace {

constexpr std::string_view kParamsMagic = "# bae-params v1";

std::string field_after(std::string_view line, std::string_view key) {
  const auto pos = line.find(std::string(key) + "=");
  if (pos == std::string_view::npos) return {};
  const auto start = pos + key.size() + 1;
  const auto end = line.find(' ', start);
  return std::string(line.substr(start, end == std::string_view::npos ? line.size() - start
                                                                      : end - start));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) lines.push_back(line);
  return lines;
}

KernelKind parse_kind(std::string_view s, const std::filesystem::path& path, long row) {
  if (s == "random_walk") return KernelKind::random_walk;
  if (s == "lg") return KernelKind::lg;
  if (s == "adapt_lg") return KernelKind::adapt_lg;
  throw DataError("unknown kernel kind '" + std::string(s) + "' in " + path.string(), row);
}

double need_double(std::string_view s, const std::filesystem::path& path, long row, long col) {
  const auto v = parse_double(s);
  if (!v) throw DataError("bad number in " + path.string(), row, col);
  return *v;
}

long long need_int(std::string_view s, const std::filesystem::path& path, long row, long col) {
  const auto v = parse_integer(s);
  if (!v) throw DataError("bad integer in " + path.string(), row, col);
  return *v;
}

}  // namespace

std::string params_header(const Topology& topology) {
  return std::string(kParamsMagic) + " layers=" + topology.describe() +
         " latent=" + std::to_string(topology.latent_index) +
         " hidden=" + std::string(to_string(topology.hidden)) +
         " output=" + std::string(to_string(topology.output));
}

Topology parse_params_header(std::string_view line) {
  if (!line.starts_with(kParamsMagic)) throw DataError("not a bae-params v1 header");
  Topology t;
  for (const auto f : split_fields(field_after(line, "layers"), '-')) {
    const auto v = parse_integer(f);
    if (!v) throw DataError("bad layer list in parameter header");
    t.layer_sizes.push_back(static_cast<Index>(*v));
  }
  const auto latent = parse_integer(field_after(line, "latent"));
  if (!latent) throw DataError("missing latent index in parameter header");
  t.latent_index = static_cast<Index>(*latent);
  try {
    t.hidden = parse_activation(field_after(line, "hidden"));
    t.output = parse_activation(field_after(line, "output"));
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("parameter header: ") + e.what());
  }
  return t;
}

void write_param_vector(const std::filesystem::path& path, const Topology& topology,
                        const ModelState& state) {
  if (state.params.size() != total_params(topology))
    throw std::invalid_argument("write_param_vector: length does not match topology");
  std::string out = params_header(topology) + "\n";
  out += "log_tau_sq=" + format_double(state.log_tau_sq) + "\n";
  for (Index i = 0; i < state.params.size(); ++i) out += format_double(state.params[i]) + "\n";
  write_text_file(path, out);
}

std::pair<Topology, ModelState> read_param_vector(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw DataError("truncated parameter file " + path.string());
  Topology topology = parse_params_header(lines[0]);
  ModelState state;
  const std::string_view tau_line = lines[1];
  if (!tau_line.starts_with("log_tau_sq="))
    throw DataError("missing log_tau_sq line in " + path.string(), 2);
  state.log_tau_sq = need_double(tau_line.substr(11), path, 2, 1);
  const Index L = total_params(topology);
  if (static_cast<Index>(lines.size()) - 2 != L)
    throw DataError("parameter file " + path.string() + " holds " +
                    std::to_string(lines.size() - 2) + " values, topology needs " +
                    std::to_string(L));
  state.params.resize(L);
  for (Index i = 0; i < L; ++i)
    state.params[i] = need_double(lines[static_cast<std::size_t>(i) + 2], path,
                                  static_cast<long>(i) + 3, 1);
  return {std::move(topology), std::move(state)};
}

std::string matrix_csv(const Eigen::MatrixXd& values, std::string_view column_prefix) {
  std::string out;
  for (Index c = 0; c < values.cols(); ++c) {
    if (c) out += ',';
    out += std::string(column_prefix) + std::to_string(c);
  }
  out += '\n';
  for (Index r = 0; r < values.rows(); ++r) out += join_doubles(values.row(r).transpose()) + "\n";
  return out;
}

std::string trace_csv(const ReplicaChain& chain) {
  std::string out =
      "sample,kernel,accepted,log_likelihood,train_mse,test_mse,log_tau_sq,temperature,ladder_slot\n";
  for (const auto& r : chain.trace) {
    out += std::to_string(r.sample) + "," + std::string(to_string(r.kind)) + "," +
           (r.accepted ? "1" : "0") + "," + format_double(r.log_likelihood) + "," +
           format_double(r.train_mse) + "," + format_double(r.test_mse) + "," +
           format_double(r.log_tau_sq) + "," + format_double(r.temperature) + "," +
           std::to_string(r.ladder_slot) + "\n";
  }
  return out;
}

std::string snapshots_csv(const ReplicaChain& chain, const Topology& topology) {
  std::string out = params_header(topology) + "\n";
  out += "sample,log_tau_sq,params...\n";
  for (const auto& s : chain.snapshots) {
    out += std::to_string(s.sample) + "," + format_double(s.state.log_tau_sq) + "," +
           join_doubles(s.state.params) + "\n";
  }
  return out;
}

std::string swap_log_csv(const std::vector<SwapRecord>& swaps) {
  std::string out =
      "barrier,sample,slot_a,slot_b,replica_a,replica_b,log_ratio,accepted,post_switch\n";
  for (const auto& s : swaps) {
    out += std::to_string(s.barrier) + "," + std::to_string(s.sample) + "," +
           std::to_string(s.slot_a) + "," + std::to_string(s.slot_b) + "," +
           std::to_string(s.replica_a) + "," + std::to_string(s.replica_b) + "," +
           format_double(s.log_ratio) + "," + (s.accepted ? "1" : "0") + "," +
           (s.post_switch ? "1" : "0") + "\n";
  }
  return out;
}

std::string temperature_log_csv(const std::vector<TemperatureRecord>& log, Index n_replicas) {
  std::string out = "barrier,sample";
  for (Index r = 0; r < n_replicas; ++r) out += ",replica_" + std::to_string(r);
  out += "\n";
  for (const auto& rec : log) {
    out += std::to_string(rec.barrier) + "," + std::to_string(rec.sample);
    for (double t : rec.replica_temperature) out += "," + format_double(t);
    out += "\n";
  }
  return out;
}

void write_run(const std::filesystem::path& dir, const ExperimentConfig& config,
               const EnsembleResult& result, const Dataset& train, const Dataset& test,
               bool complete) {
  std::filesystem::create_directories(dir);
  const Topology topology = config.topology();

  save_dataset(train, dir / "train.csv");
  save_dataset(test, dir / "test.csv");
  for (const auto& chain : result.chains) {
    const auto id = std::to_string(chain.replica_id);
    write_text_file(dir / ("chain_" + id + ".csv"), trace_csv(chain));
    write_text_file(dir / ("params_" + id + ".csv"), snapshots_csv(chain, topology));
  }
  write_text_file(dir / "swap_log.csv", swap_log_csv(result.swaps));
  write_text_file(dir / "temperatures.csv",
                  temperature_log_csv(result.temperature_log, config.tempering.n_replicas));

  KeyValueFile manifest = to_key_values(config);
  manifest.set("manifest.format", "bae-run-v1");
  manifest.set("manifest.status", complete ? "complete" : "aborted");
  manifest.set("manifest.topology", topology.describe());
  manifest.set("manifest.n_params", std::to_string(total_params(topology)));
  manifest.set("manifest.seed", std::to_string(config.tempering.seed));
  manifest.set("manifest.ladder",
               join_doubles(Eigen::Map<const Eigen::VectorXd>(
                   result.ladder.data(), static_cast<Index>(result.ladder.size()))));
  manifest.set("manifest.n_chains", std::to_string(result.chains.size()));
  manifest.set("manifest.swap_log", "swap_log.csv");
  manifest.set("manifest.temperature_log", "temperatures.csv");
  manifest.set("manifest.train_data", "train.csv");
  manifest.set("manifest.test_data", "test.csv");
  manifest.set("manifest.swap_attempts", std::to_string(result.swap_attempts));
  manifest.set("manifest.swap_accepts", std::to_string(result.swap_accepts));
  manifest.set("manifest.post_switch_swap_attempts", std::to_string(result.post_switch_swap_attempts));
  manifest.set("manifest.post_switch_swap_accepts", std::to_string(result.post_switch_swap_accepts));
  manifest.set("manifest.wall_seconds", format_double(result.wall_time.count()));
  manifest.write(dir / "manifest.txt");
}

RunArtifacts load_run(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.txt";
  if (!std::filesystem::exists(manifest_path))
    throw DataError("no manifest.txt in run directory '" + dir.string() + "'");
  const auto manifest = KeyValueFile::read(manifest_path);
  if (manifest.get("manifest.format") != "bae-run-v1")
    throw DataError("unrecognised run format in " + manifest_path.string());

  RunArtifacts run;
  try {
    apply_overrides(run.config, manifest);
    run.topology = run.config.topology();
  } catch (const std::exception& e) {
    throw DataError(std::string("corrupt manifest: ") + e.what());
  }
  run.complete = manifest.get("manifest.status") == "complete";
  run.train = load_dataset(dir / manifest.get("manifest.train_data").value_or("train.csv"));
  run.test = load_dataset(dir / manifest.get("manifest.test_data").value_or("test.csv"));

  auto& result = run.result;
  result.switch_sample = run.config.tempering.switch_sample;
  result.ladder = build_ladder(run.config.tempering.n_replicas, run.config.tempering.t_max);
  const auto count = [&](const char* key) {
    return static_cast<std::uint64_t>(parse_integer(manifest.get(key).value_or("0")).value_or(0));
  };
  result.swap_attempts = count("manifest.swap_attempts");
  result.swap_accepts = count("manifest.swap_accepts");
  result.post_switch_swap_attempts = count("manifest.post_switch_swap_attempts");
  result.post_switch_swap_accepts = count("manifest.post_switch_swap_accepts");
  result.wall_time = std::chrono::duration<double>(
      parse_double(manifest.get("manifest.wall_seconds").value_or("0")).value_or(0.0));

  const Index n_chains =
      static_cast<Index>(parse_integer(manifest.get("manifest.n_chains").value_or("0")).value_or(0));
  const Index L = total_params(run.topology);
  for (Index r = 0; r < n_chains; ++r) {
    ReplicaChain chain;
    chain.replica_id = r;
    const auto trace_path = dir / ("chain_" + std::to_string(r) + ".csv");
    const auto trace_lines = read_lines(trace_path);
    for (std::size_t i = 1; i < trace_lines.size(); ++i) {
      const long row = static_cast<long>(i) + 1;
      const auto f = split_fields(trace_lines[i], ',');
      if (f.size() != 9) throw DataError("ragged trace row in " + trace_path.string(), row);
      TraceRow t;
      t.sample = static_cast<Index>(need_int(f[0], trace_path, row, 1));
      t.kind = parse_kind(f[1], trace_path, row);
      t.accepted = f[2] == "1";
      t.log_likelihood = need_double(f[3], trace_path, row, 4);
      t.train_mse = need_double(f[4], trace_path, row, 5);
      t.test_mse = need_double(f[5], trace_path, row, 6);
      t.log_tau_sq = need_double(f[6], trace_path, row, 7);
      t.temperature = need_double(f[7], trace_path, row, 8);
      t.ladder_slot = static_cast<Index>(need_int(f[8], trace_path, row, 9));
      auto& counters = t.sample < result.switch_sample ? chain.burn_in : chain.post_burn_in;
      counters.proposed[static_cast<std::size_t>(t.kind)]++;
      counters.accepted[static_cast<std::size_t>(t.kind)] += t.accepted;
      chain.trace.push_back(t);
    }
    if (!chain.trace.empty()) chain.temperature = chain.trace.back().temperature;

    const auto snap_path = dir / ("params_" + std::to_string(r) + ".csv");
    const auto snap_lines = read_lines(snap_path);
    if (snap_lines.size() < 2) throw DataError("truncated snapshot file " + snap_path.string());
    const Topology header = parse_params_header(snap_lines[0]);
    if (header.layer_sizes != run.topology.layer_sizes)
      throw DataError("snapshot topology does not match manifest in " + snap_path.string());
    for (std::size_t i = 2; i < snap_lines.size(); ++i) {
      const long row = static_cast<long>(i) + 1;
      const auto f = split_fields(snap_lines[i], ',');
      if (static_cast<Index>(f.size()) != L + 2)
        throw DataError("snapshot row has wrong width in " + snap_path.string(), row);
      ParamSnapshot s;
      s.sample = static_cast<Index>(need_int(f[0], snap_path, row, 1));
      s.state.log_tau_sq = need_double(f[1], snap_path, row, 2);
      s.state.params.resize(L);
      for (Index j = 0; j < L; ++j)
        s.state.params[j] = need_double(f[static_cast<std::size_t>(j) + 2], snap_path, row,
                                        static_cast<long>(j) + 3);
      chain.snapshots.push_back(std::move(s));
    }
    result.chains.push_back(std::move(chain));
  }
  for (const auto& chain : result.chains)
    for (const auto& snap : chain.snapshots)
      if (snap.sample >= result.switch_sample) result.posterior.push_back(snap.state);

  const auto swap_path = dir / manifest.get("manifest.swap_log").value_or("swap_log.csv");
  const auto swap_lines = read_lines(swap_path);
  for (std::size_t i = 1; i < swap_lines.size(); ++i) {
    const long row = static_cast<long>(i) + 1;
    const auto f = split_fields(swap_lines[i], ',');
    if (f.size() != 9) throw DataError("ragged swap log row", row);
    SwapRecord s;
    s.barrier = static_cast<Index>(need_int(f[0], swap_path, row, 1));
    s.sample = static_cast<Index>(need_int(f[1], swap_path, row, 2));
    s.slot_a = static_cast<Index>(need_int(f[2], swap_path, row, 3));
    s.slot_b = static_cast<Index>(need_int(f[3], swap_path, row, 4));
    s.replica_a = static_cast<Index>(need_int(f[4], swap_path, row, 5));
    s.replica_b = static_cast<Index>(need_int(f[5], swap_path, row, 6));
    s.log_ratio = need_double(f[6], swap_path, row, 7);
    s.accepted = f[7] == "1";
    s.post_switch = f[8] == "1";
    result.swaps.push_back(s);
  }
  return run;
}

}  // namespace bae
