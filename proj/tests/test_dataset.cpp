#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "fwsel/adaboost.hpp"
#include "fwsel/dataset.hpp"
#include "fwsel/metrics.hpp"
#include "fwsel/rng.hpp"

using namespace fwsel;

namespace {

std::string error_of(const std::string& csv) {
  try {
    parse_csv(csv, "t.csv");
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

Dataset balanced(std::size_t pos, std::size_t neg) {
  Dataset ds;
  ds.features = Matrix(pos + neg, 2);
  for (std::size_t i = 0; i < pos + neg; ++i) {
    ds.labels.push_back(i < pos ? 1 : 0);
    ds.features(i, 0) = static_cast<double>(i);
    ds.features(i, 1) = -static_cast<double>(i);
  }
  ds.feature_names = {"a", "b"};
  return ds;
}

double test_accuracy(const Dataset& ds, const std::vector<std::size_t>& cols) {
  auto split = stratified_split(ds.subset_cols(cols), 0.3, 11);
  auto model = train_adaboost(split.train.features, split.train.labels, 50);
  auto preds = predict(model, split.test.features);
  return basic_metrics(confusion(split.test.labels, preds)).acc;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("csv with 4 rows and 3 features parses in column order") {
    const auto ds = parse_csv("f1,f2,label,f3\n1,2,0,3\n4,5,0,6\n7,8,1,9\n10,11,1,12\n");
    CHECK(ds.dims() == 3);
    CHECK(ds.rows() == 4);
    CHECK(ds.labels == std::vector<int>{0, 0, 1, 1});
    CHECK(ds.feature_names == std::vector<std::string>{"f1", "f2", "f3"});
    CHECK(ds.features(2, 2) == 9.0);
    CHECK(ds.features(3, 1) == 11.0);
  }

  TEST_CASE("crlf line endings are accepted") {
    const auto ds = parse_csv("a,label\r\n0.5,1\r\n-2,0\r\n");
    CHECK(ds.rows() == 2);
    CHECK(ds.features(1, 0) == -2.0);
  }

  TEST_CASE("missing field names its row") {
    const auto msg = error_of("a,b,label\n1,2,0\n3,4,1\n5,0\n7,8,1\n");
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("expected 3 fields, found 2") != std::string::npos);
  }

  TEST_CASE("label 2 at row 5 is rejected with coordinates") {
    const auto msg = error_of("a,label\n1,0\n2,1\n3,0\n4,1\n5,2\n");
    CHECK(msg.find("row 5") != std::string::npos);
    CHECK(msg.find("label outside {0,1}") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }

  TEST_CASE("non-numeric and empty inputs") {
    CHECK(error_of("a,label\nx,1\n").find("non-numeric") != std::string::npos);
    CHECK(error_of("").find("empty file") != std::string::npos);
    CHECK(error_of("a,label\n").find("no data rows") != std::string::npos);
    CHECK(error_of("a,b\n1,2\n").find("label") != std::string::npos);
  }

  TEST_CASE("csv round trip is bit exact") {
    SynthSpec spec;
    spec.seed = 3;
    const auto ds = generate_synthetic(spec);
    const auto back = parse_csv(format_csv(ds));
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
    CHECK(back.feature_names == ds.feature_names);

    const auto path = std::filesystem::temp_directory_path() / "fwsel_roundtrip.csv";
    save_csv(ds, path);
    CHECK(load_csv(path).features == ds.features);
    std::filesystem::remove(path);
  }

  TEST_CASE("10 samples, fraction 0.4 gives 2 positives and 2 negatives in test") {
    const auto split = stratified_split(balanced(5, 5), 0.4, 1);
    CHECK(split.test.rows() == 4);
    CHECK(split.test.positives() == 2);
    CHECK(split.train.positives() == 3);
  }

  TEST_CASE("split is a deterministic partition") {
    const auto ds = balanced(17, 83);
    const auto a = stratified_split(ds, 0.3, 9);
    const auto b = stratified_split(ds, 0.3, 9);
    CHECK(a.train_rows == b.train_rows);
    CHECK(a.test_rows == b.test_rows);
    std::set<std::size_t> all(a.train_rows.begin(), a.train_rows.end());
    for (auto r : a.test_rows) CHECK(all.insert(r).second);
    CHECK(all.size() == 100);
    CHECK(*all.rbegin() == 99);
    // 17 * 0.3 = 5.1
    CHECK((a.test.positives() == 5 || a.test.positives() == 6));
    for (std::size_t i = 0; i < a.test_rows.size(); ++i)
      CHECK(a.test.features.row(i)[0] == ds.features(a.test_rows[i], 0));
  }

  TEST_CASE("split errors") {
    CHECK_THROWS_AS(stratified_split(balanced(1, 5), 0.3, 1), DataError);
    CHECK_THROWS_AS(stratified_split(balanced(5, 5), 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(stratified_split(balanced(5, 5), 1.0, 1), std::invalid_argument);
  }

  TEST_CASE("canonical synthetic spec") {
    SynthSpec spec;
    spec.seed = 42;
    const auto ds = generate_synthetic(spec);
    CHECK(ds.dims() == 25);
    CHECK(ds.rows() == 200);
    CHECK(ds.positives() == 34);
    CHECK(std::count(ds.informative.begin(), ds.informative.end(), true) == 5);
    for (std::size_t j = 0; j < 5; ++j) CHECK(ds.informative[j]);
    CHECK(generate_synthetic(spec).features == ds.features);
    spec.seed = 43;
    CHECK_FALSE(generate_synthetic(spec).features == ds.features);
  }

  TEST_CASE("noise_sigma 0 gives two point masses per informative column") {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
    spec.seed = 5;
    const auto ds = generate_synthetic(spec);
    for (std::size_t i = 0; i < ds.rows(); ++i)
      for (std::size_t j = 0; j < spec.d_informative; ++j)
        CHECK(ds.features(i, j) == (ds.labels[i] == 1 ? 0.5 : -0.5));
  }

  TEST_CASE("informative columns beat noise columns") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SynthSpec spec;
      spec.seed = seed;
      const auto ds = generate_synthetic(spec);
      wins += test_accuracy(ds, {0, 1, 2, 3, 4}) > test_accuracy(ds, {5, 6, 7, 8, 9});
    }
    CHECK(wins >= 4);
  }

  TEST_CASE("z-scores of [1,2,3]") {
    SplitPair split;
    split.train.features = Matrix(3, 2);
    split.train.labels = {0, 1, 0};
    split.train.feature_names = {"v", "c"};
    for (std::size_t i = 0; i < 3; ++i) {
      split.train.features(i, 0) = static_cast<double>(i + 1);
      split.train.features(i, 1) = 5.0;
    }
    split.test.features = Matrix(1, 2);
    split.test.features(0, 0) = 2.0;
    split.test.features(0, 1) = 7.0;
    split.test.labels = {1};
    split.test.feature_names = {"v", "c"};
    const auto st = standardize(split);
    CHECK(split.train.features(0, 0) == doctest::Approx(-1.2247448714).epsilon(1e-9));
    CHECK(split.train.features(1, 0) == doctest::Approx(0.0));
    CHECK(split.train.features(2, 0) == doctest::Approx(1.2247448714).epsilon(1e-9));
    for (std::size_t i = 0; i < 3; ++i) CHECK(split.train.features(i, 1) == 0.0);
    CHECK(split.test.features(0, 0) == 0.0);
    CHECK(split.test.features(0, 1) == 0.0);
    CHECK(st.mean[0] == 2.0);
    CHECK(st.scale[1] == 0.0);
  }

  TEST_CASE("validate catches shape and label problems") {
    auto ds = balanced(2, 2);
    ds.labels.pop_back();
    CHECK_THROWS_AS(ds.validate(), DataError);
    ds = balanced(2, 2);
    ds.labels[0] = 3;
    CHECK_THROWS_AS(ds.validate(), DataError);
    ds = balanced(2, 2);
    ds.features(0, 0) = std::nan("");
    CHECK_THROWS_AS(ds.validate(), DataError);
  }
}
