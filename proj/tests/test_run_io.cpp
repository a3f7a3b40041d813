#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "bae/errors.hpp"
#include "bae/experiment.hpp"
#include "bae/run_io.hpp"
#include "bae/text_format.hpp"

using namespace bae;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "bae_tests" /
                       (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig toy_config() {
  ExperimentConfig c;
  c.dataset.kind = DatasetKind::clusters;
  c.dataset.n_points = 120;
  c.dataset.n_features = 4;
  c.dataset.n_classes = 3;
  c.dataset.separation = 3.0;
  c.dataset.cluster_sd = 0.5;
  c.split = {90, 30, 2};
  c.layers = {4, 3, 2, 3, 4};
  c.proposal.step_sd = 0.05;
  c.proposal.learn_rate = 0.001;
  c.tempering = {3, 2.0, 5, 60, 30, 11};
  c.mode = ExecutionMode::reference;
  c.thin = 2;
  c.rhat_ids = {0, 5};
  return c;
}

}  // namespace

TEST(ParamVector, RoundTrip) {
  const auto dir = scratch_dir();
  const auto t = Topology::from_sizes({3, 4, 2, 4, 3}, Activation::tanh, Activation::identity);
  std::mt19937_64 rng(1);
  const ModelState s{init_params(t, 1.0, rng), -1.2345678901234567};
  write_param_vector(dir / "p.txt", t, s);
  const auto [t2, s2] = read_param_vector(dir / "p.txt");
  EXPECT_EQ(t2.describe(), t.describe());
  EXPECT_EQ(t2.hidden, Activation::tanh);
  EXPECT_EQ(t2.output, Activation::identity);
  EXPECT_EQ(s2, s);
  EXPECT_EQ(parse_params_header(params_header(t)).describe(), "3-4-2-4-3");
}

TEST(ParamVector, CorruptFilesAreDataErrors) {
  const auto dir = scratch_dir();
  const auto t = Topology::from_sizes({2, 1, 2});
  write_param_vector(dir / "p.txt", t, {Eigen::VectorXd::Ones(7), 0.0});
  auto text = read_text_file(dir / "p.txt");
  write_text_file(dir / "short.txt", text.substr(0, text.rfind('1')));
  EXPECT_THROW(read_param_vector(dir / "short.txt"), DataError);
  write_text_file(dir / "junk.txt", text + "abc\n");
  EXPECT_THROW(read_param_vector(dir / "junk.txt"), DataError);
  write_text_file(dir / "header.txt", "# something else\n" + text);
  EXPECT_THROW(read_param_vector(dir / "header.txt"), DataError);
  EXPECT_THROW(read_param_vector(dir / "missing.txt"), DataError);
}

TEST(RunDirectory, WriteThenLoadPreservesEverything) {
  const auto dir = scratch_dir();
  const auto config = toy_config();
  const auto out = run_experiment(config);
  write_run(dir, config, out.result, out.train, out.test);
  const auto loaded = load_run(dir);

  EXPECT_TRUE(loaded.complete);
  EXPECT_EQ(to_key_values(loaded.config).to_string(), to_key_values(config).to_string());
  EXPECT_EQ(loaded.topology.describe(), "4-3-2-3-4");
  EXPECT_EQ(loaded.train.features, out.train.features);
  EXPECT_EQ(loaded.test.features, out.test.features);
  EXPECT_EQ(loaded.train.norm_min, out.train.norm_min);
  ASSERT_EQ(loaded.result.chains.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(trace_csv(loaded.result.chains[r]), trace_csv(out.result.chains[r]));
    EXPECT_EQ(loaded.result.chains[r].post_burn_in.total_accepted(),
              out.result.chains[r].post_burn_in.total_accepted());
    EXPECT_EQ(loaded.result.chains[r].burn_in.proposed, out.result.chains[r].burn_in.proposed);
  }
  EXPECT_EQ(swap_log_csv(loaded.result.swaps), swap_log_csv(out.result.swaps));
  EXPECT_EQ(loaded.result.swap_attempts, out.result.swap_attempts);
  EXPECT_EQ(loaded.result.post_switch_swap_accepts, out.result.post_switch_swap_accepts);
  ASSERT_EQ(loaded.result.posterior.size(), out.result.posterior.size());
  for (std::size_t i = 0; i < out.result.posterior.size(); ++i)
    EXPECT_EQ(loaded.result.posterior[i], out.result.posterior[i]);
}

// The manifest alone is enough to regenerate the run bit-for-bit.
TEST(RunDirectory, ManifestReproducesRun) {
  const auto dir = scratch_dir();
  auto config = toy_config();
  config.proposal.lg_rate = 0.5;
  const auto first = run_experiment(config);
  write_run(dir, config, first.result, first.train, first.test);

  const auto again = run_experiment(load_config(dir / "manifest.txt"));
  for (std::size_t r = 0; r < first.result.chains.size(); ++r)
    EXPECT_EQ(trace_csv(again.result.chains[r]), trace_csv(first.result.chains[r]));
  EXPECT_EQ(swap_log_csv(again.result.swaps), swap_log_csv(first.result.swaps));
}

TEST(RunDirectory, MissingOrCorruptFilesAreDataErrors) {
  const auto config = toy_config();
  const auto out = run_experiment(config);
  auto fresh = [&](const fs::path& dir) {
    fs::remove_all(dir);
    write_run(dir, config, out.result, out.train, out.test);
  };
  const auto root = scratch_dir();

  EXPECT_THROW(load_run(root / "nothing"), DataError);

  fresh(root / "a");
  fs::remove(root / "a" / "chain_1.csv");
  EXPECT_THROW(load_run(root / "a"), DataError);

  fresh(root / "b");
  auto text = read_text_file(root / "b" / "chain_0.csv");
  write_text_file(root / "b" / "chain_0.csv", text + "7,lg,1,oops\n");
  EXPECT_THROW(load_run(root / "b"), DataError);

  fresh(root / "c");
  text = read_text_file(root / "c" / "params_2.csv");
  write_text_file(root / "c" / "params_2.csv", text.substr(0, text.size() / 2));
  EXPECT_THROW(load_run(root / "c"), DataError);
}

TEST(RunDirectory, PartialRunIsMarked) {
  const auto dir = scratch_dir();
  const auto config = toy_config();
  const auto out = run_experiment(config);
  write_run(dir, config, out.result, out.train, out.test, false);
  EXPECT_FALSE(load_run(dir).complete);
  EXPECT_EQ(*KeyValueFile::read(dir / "manifest.txt").get("manifest.status"), "aborted");
}

TEST(Experiment, RejectsInputSizeMismatch) {
  auto config = toy_config();
  config.layers = {5, 3, 5};
  EXPECT_THROW(run_experiment(config), ConfigError);
}
