#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "bae/dataset.hpp"
#include "bae/errors.hpp"
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

Dataset random_dataset(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(2.0, 3.0);
  Dataset d;
  d.features.resize(rows, cols);
  for (Index i = 0; i < d.features.size(); ++i) d.features.data()[i] = n(rng);
  return d;
}

}  // namespace

TEST(TextFormat, DoublesRoundTripExactly) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    double v;
    const std::uint64_t b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto back = parse_double(format_double(v));
    ASSERT_TRUE(back.has_value()) << format_double(v);
    EXPECT_EQ(std::memcmp(&*back, &v, sizeof v), 0) << format_double(v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(TextFormat, ParsingRejectsJunk) {
  EXPECT_FALSE(parse_double("1.5x").has_value());
  EXPECT_FALSE(parse_double("").has_value());
  EXPECT_EQ(*parse_double(" 2.5 "), 2.5);
  EXPECT_EQ(*parse_integer("-12"), -12);
  EXPECT_FALSE(parse_integer("1.0").has_value());
  const auto v = parse_doubles("1,2.5,-3");
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(*v, Eigen::Vector3d(1, 2.5, -3));
  EXPECT_FALSE(parse_doubles("1,,3").has_value());
  EXPECT_EQ(join_doubles(Eigen::Vector3d(1, 2.5, -3)), "1,2.5,-3");
}

TEST(KeyValueFile, RoundTripAndComments) {
  KeyValueFile kv;
  kv.set("b", "2");
  kv.set("a", "x y");
  kv.set("b", "3");
  EXPECT_EQ(kv.entries().size(), 2u);
  EXPECT_EQ(*kv.get("b"), "3");
  const auto back = KeyValueFile::parse("# comment\n\n" + kv.to_string());
  EXPECT_EQ(back.entries(), kv.entries());
  EXPECT_FALSE(back.get("c").has_value());
  EXPECT_THROW(KeyValueFile::parse("no equals sign\n"), ConfigError);
}

TEST(Normalize, MapsTrainToUnitRangeAndInverts) {
  const auto raw = random_dataset(40, 5, 2);
  const auto n = normalize(raw);
  ASSERT_TRUE(n.normalized());
  EXPECT_NEAR(n.features.minCoeff(), 0.0, 1e-15);
  EXPECT_NEAR(n.features.maxCoeff(), 1.0, 1e-15);
  for (Index j = 0; j < 5; ++j) {
    EXPECT_EQ(n.features.col(j).minCoeff(), 0.0);
    EXPECT_NEAR(n.features.col(j).maxCoeff(), 1.0, 1e-15);
  }
  EXPECT_LT((denormalize(n.features, n) - raw.features).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalize, IdempotentOnNormalisedData) {
  const auto once = normalize(random_dataset(30, 4, 3));
  const auto twice = normalize(once);
  EXPECT_LT((twice.features - once.features).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Normalize, ConstantColumnIsFlaggedAndZeroed) {
  auto raw = random_dataset(10, 3, 4);
  raw.features.col(1).setConstant(7.0);
  const auto n = normalize(raw);
  EXPECT_EQ(n.degenerate, (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_TRUE((n.features.col(1).array() == 0.0).all());
  EXPECT_TRUE(n.features.allFinite());
}

TEST(Split, UsesTrainBoundsOnly) {
  auto raw = random_dataset(100, 3, 5);
  raw.labels = Eigen::VectorXi::LinSpaced(100, 0, 99);
  const auto [train, test] = split(raw, {70, 30, 9});
  EXPECT_EQ(train.n_instances(), 70);
  EXPECT_EQ(test.n_instances(), 30);
  EXPECT_EQ(train.norm_min, test.norm_min);
  EXPECT_EQ(train.norm_max, test.norm_max);
  EXPECT_EQ(train.features.minCoeff(), 0.0);

  // Recover the raw rows through the labels and check the train bounds.
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (Index i = 0; i < 70; ++i) {
    const Eigen::VectorXd row = raw.features.row((*train.labels)[i]).transpose();
    lo = lo.cwiseMin(row);
    hi = hi.cwiseMax(row);
  }
  EXPECT_EQ(train.norm_min, lo);
  EXPECT_EQ(train.norm_max, hi);
  for (Index i = 0; i < 30; ++i) {
    const Eigen::RowVectorXd row = raw.features.row((*test.labels)[i]);
    const Eigen::RowVectorXd expected =
        ((row.transpose() - lo).array() / (hi - lo).array()).matrix().transpose();
    EXPECT_LT((test.features.row(i) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }

  // Every row lands in exactly one side.
  std::vector<int> seen(100, 0);
  for (Index i = 0; i < 70; ++i) seen[(*train.labels)[i]]++;
  for (Index i = 0; i < 30; ++i) seen[(*test.labels)[i]]++;
  for (int s : seen) EXPECT_EQ(s, 1);

  EXPECT_THROW(split(raw, {90, 20, 1}), std::invalid_argument);
}

TEST(Split, DeterministicForSeed) {
  const auto raw = random_dataset(50, 2, 6);
  const auto a = split(raw, {30, 20, 4});
  const auto b = split(raw, {30, 20, 4});
  const auto c = split(raw, {30, 20, 5});
  EXPECT_EQ(a.first.features, b.first.features);
  EXPECT_NE(a.first.features, c.first.features);
}

TEST(Generators, DeterministicAndShaped) {
  const auto s1 = generate_swiss_roll(200, 0.1, 3);
  const auto s2 = generate_swiss_roll(200, 0.1, 3);
  EXPECT_EQ(s1.features, s2.features);
  EXPECT_NE(s1.features, generate_swiss_roll(200, 0.1, 4).features);
  ASSERT_TRUE(s1.color.has_value());
  EXPECT_EQ(s1.features.cols(), 3);
  const auto clean = generate_swiss_roll(500, 0.0, 8);
  for (Index i = 0; i < 500; ++i) {
    const double u = (*clean.color)[i];
    EXPECT_GE(u, 1.5 * M_PI);
    EXPECT_LE(u, 4.5 * M_PI);
    EXPECT_NEAR(clean.features(i, 0), u * std::cos(u), 1e-12);
    EXPECT_NEAR(clean.features(i, 2), u * std::sin(u), 1e-12);
    EXPECT_GE(clean.features(i, 1), 0.0);
    EXPECT_LE(clean.features(i, 1), 21.0);
  }

  const auto m = generate_madelon_like(300, 40, 2);
  EXPECT_EQ(m.features.rows(), 300);
  EXPECT_EQ(m.features.cols(), 40);
  ASSERT_TRUE(m.labels.has_value());
  EXPECT_EQ(m.features, generate_madelon_like(300, 40, 2).features);
  const int ones = m.labels->sum();
  EXPECT_GT(ones, 0);
  EXPECT_LT(ones, 300);

  const auto c = generate_clusters(90, 4, 3, 10.0, 0.1, 1);
  EXPECT_EQ(c.labels->maxCoeff(), 2);
  for (Index i = 0; i < 90; ++i) EXPECT_NEAR(c.features(i, 0), 10.0 * (*c.labels)[i], 1.0);
}

TEST(Csv, LoadsWithHeaderAndLabels) {
  const auto dir = scratch_dir();
  write_text_file(dir / "d.csv", "x,y,label\n1,2,0\n3.5,-4,1\n\n5,6,1\n");
  const auto d = load_csv(dir / "d.csv", true);
  ASSERT_EQ(d.features.rows(), 3);
  EXPECT_EQ(d.features(1, 0), 3.5);
  EXPECT_EQ(d.features(1, 1), -4.0);
  EXPECT_EQ(*d.labels, Eigen::Vector3i(0, 1, 1));
  const auto first = load_csv(dir / "d.csv", true, 1);
  EXPECT_EQ(first.features(0, 1), 0.0);
  try {
    load_csv(dir / "d.csv", true, 0);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 3);
    EXPECT_EQ(e.column(), 1);
  }
}

TEST(Csv, ErrorsCarryRowAndColumn) {
  const auto dir = scratch_dir();
  write_text_file(dir / "ragged.csv", "1,2,3\n4,5\n");
  try {
    load_csv(dir / "ragged.csv");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 2);
  }
  write_text_file(dir / "junk.csv", "a,b\n1,2\n3,oops\n");
  try {
    load_csv(dir / "junk.csv");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 3);
    EXPECT_EQ(e.column(), 2);
    EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
  }
  EXPECT_THROW(load_csv(dir / "missing.csv"), DataError);
}

TEST(Csv, SaveAndLoadKeepsBoundsAndSeed) {
  const auto dir = scratch_dir();
  auto raw = generate_clusters(40, 3, 2, 5.0, 1.0, 7);
  raw.color = Eigen::VectorXd::LinSpaced(40, 0, 1);
  const auto n = normalize(raw);
  save_dataset(n, dir / "n.csv");
  const auto back = load_dataset(dir / "n.csv");
  EXPECT_EQ(back.features, n.features);
  EXPECT_EQ(back.norm_min, n.norm_min);
  EXPECT_EQ(back.norm_max, n.norm_max);
  EXPECT_EQ(*back.labels, *n.labels);
  EXPECT_EQ(*back.color, *n.color);
  EXPECT_EQ(back.seed, 7u);
}

TEST(SelectFeatures, KeepsColumnsInOrder) {
  const auto raw = random_dataset(5, 4, 9);
  const auto s = select_features(raw, {3, 1});
  EXPECT_EQ(s.features.col(0), raw.features.col(3));
  EXPECT_EQ(s.features.col(1), raw.features.col(1));
}
