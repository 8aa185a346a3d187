#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "hlp/error.h"
#include "hlp/learners.h"

using namespace hlp;

namespace {

LabeledSet two_clusters(std::uint64_t seed, int n = 40) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.15);
  LabeledSet d;
  d.kind = ModelKind::kBinary;
  d.arity = 2;
  for (int i = 0; i < n; ++i) {
    const int y = i % 2;
    const double c = y ? 0.6 : -0.6;
    const std::array<double, 2> x{c + g(rng), c + g(rng)};
    d.add(x, y, "s" + std::to_string(i % 5));
  }
  return d;
}

LabeledSet blobs(std::uint64_t seed, int per_class = 15) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.08);
  LabeledSet d;
  d.kind = ModelKind::kMulticlass8;
  d.arity = 2;
  for (int k = 0; k < kNumClasses; ++k) {
    const double a = 2 * 3.141592653589793 * k / kNumClasses;
    for (int i = 0; i < per_class; ++i) {
      const std::array<double, 2> x{std::cos(a) + g(rng), std::sin(a) + g(rng)};
      d.add(x, k, "s" + std::to_string(i % 5));
    }
  }
  return d;
}

LabeledSet regression(std::uint64_t seed, int n, auto f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LabeledSet d;
  d.kind = ModelKind::kRegressor2;
  d.arity = 2;
  for (int i = 0; i < n; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    d.add(x, f(x), "s" + std::to_string(i % 5));
  }
  return d;
}

LabeledSet duplicated(const LabeledSet& d) {
  std::vector<std::size_t> rows(d.size() * 2);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i % d.size();
  return d.subset(rows);
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hlp-test-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("binary fit on separable clusters") {
  const LabeledSet d = two_clusters(1);
  TrainReport rep;
  const KernelModel m = train_binary(d, {}, &rep);
  CHECK(evaluate(m, d) >= 0.95);
  for (std::size_t i = 1; i < rep.loss_history.size(); ++i) {
    CHECK(rep.loss_history[i] <= rep.loss_history[i - 1] + 1e-12);
  }
  const std::array<double, 2> pos{0.6, 0.6}, neg{-0.6, -0.6};
  CHECK(m.predict_proba(pos) > 0.5);
  CHECK(m.predict_proba(neg) < 0.5);
  const std::array<double, 3> wrong{0, 0, 0};
  CHECK_THROWS_AS(m.predict_proba(wrong), Error);
}

TEST_CASE("flipped labels complement the probabilities") {
  LabeledSet d = two_clusters(2);
  LabeledSet f = d;
  for (int& y : f.labels) y = 1 - y;
  const KernelModel a = train_binary(d);
  const KernelModel b = train_binary(f);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    CHECK(a.predict_proba(x) + b.predict_proba(x) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("duplicated data leaves the classifier unchanged") {
  const LabeledSet d = two_clusters(4);
  const KernelModel a = train_binary(d);
  const KernelModel b = train_binary(duplicated(d));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    CHECK(a.decision(x)(0) == doctest::Approx(b.decision(x)(0)).epsilon(1e-6));
  }
}

TEST_CASE("probabilities are bounded and continuous") {
  const KernelModel m = train_binary(two_clusters(6));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    const std::array<double, 2> y{x[0] + 1e-6, x[1] - 1e-6};
    const double p = m.predict_proba(x);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    worst = std::max(worst, std::abs(p - m.predict_proba(y)) / (std::sqrt(2.0) * 1e-6));
  }
  // The gradient of a logistic over a finite Gaussian expansion is bounded by
  // 1/4 * sum |w_j| * sqrt(2 gamma / e).
  const double bound = 0.25 * m.weights().cwiseAbs().sum() * std::sqrt(2 * m.gamma() / std::exp(1.0));
  CHECK(worst <= bound + 1e-6);
}

TEST_CASE("single class is degenerate") {
  LabeledSet d = two_clusters(8);
  for (int& y : d.labels) y = 1;
  try {
    train_binary(d);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateData);
  }
  LabeledSet mc;
  mc.kind = ModelKind::kMulticlass8;
  mc.arity = 1;
  for (int i = 0; i < 10; ++i) {
    const std::array<double, 1> x{double(i)};
    mc.add(x, 3);
  }
  CHECK_THROWS_AS(train_multiclass(mc), Error);
}

TEST_CASE("multiclass blobs") {
  const LabeledSet d = blobs(9);
  const KernelModel m = train_multiclass(d);
  CHECK(evaluate(m, d) >= 0.9);
}

TEST_CASE("multiclass scores follow a relabelling") {
  const LabeledSet d = blobs(10);
  std::array<int, kNumClasses> perm{3, 7, 0, 5, 1, 6, 2, 4};
  LabeledSet p = d;
  for (int& y : p.labels) y = perm[y];
  const KernelModel a = train_multiclass(d);
  const KernelModel b = train_multiclass(p);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    const auto sa = a.class_scores(x);
    const auto sb = b.class_scores(x);
    for (int k = 0; k < kNumClasses; ++k) CHECK(sb[perm[k]] == doctest::Approx(sa[k]).epsilon(1e-9));
  }
}

TEST_CASE("argmax ignores positive scaling") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> c(0.01, 100);
  for (int i = 0; i < 200; ++i) {
    std::array<double, kNumClasses> s{};
    for (double& v : s) v = g(rng);
    const int before = argmax(s);
    const double k = c(rng);
    for (double& v : s) v *= k;
    CHECK(argmax(s) == before);
  }
  const std::array<double, 3> tie{1.0, 1.0, 0.5};
  CHECK(argmax(tie) == 0);
}

TEST_CASE("kernel symmetry") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0, 1);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 5> a{}, b{};
    for (double& v : a) v = g(rng);
    for (double& v : b) v = g(rng);
    CHECK(std::abs(gaussian_kernel(a, b, 0.7) - gaussian_kernel(b, a, 0.7)) <= 1e-15);
  }
}

TEST_CASE("regressor") {
  const auto lin = [](const std::array<double, 2>& x) {
    return std::array<double, 2>{0.8 * x[0] - 0.1, -0.5 * x[0] + 0.3};
  };
  const LabeledSet train = regression(14, 120, lin);
  const LabeledSet test = regression(15, 60, lin);
  const KernelModel m = train_regressor(train);
  CHECK(evaluate(m, test) <= 0.05 * 1.6);

  // Training RMSE never exceeds that of predicting the mean.
  const auto wave = [](const std::array<double, 2>& x) {
    return std::array<double, 2>{std::sin(3 * x[0]) * x[1], std::cos(2 * x[1])};
  };
  const LabeledSet w = regression(16, 80, wave);
  std::array<double, 2> mean{};
  for (const auto& t : w.targets) {
    mean[0] += t[0] / w.size();
    mean[1] += t[1] / w.size();
  }
  double base = 0.0;
  for (const auto& t : w.targets) base += std::pow(t[0] - mean[0], 2) + std::pow(t[1] - mean[1], 2);
  base = std::sqrt(base / (2.0 * w.size()));
  CHECK(evaluate(train_regressor(w), w) <= base);

  const LabeledSet flat = regression(17, 30, [](const std::array<double, 2>&) {
    return std::array<double, 2>{0.42, -1.3};
  });
  const KernelModel c = train_regressor(flat);
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 50; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    const auto v = c.predict_values(x);
    CHECK(v[0] == doctest::Approx(0.42).epsilon(1e-6));
    CHECK(v[1] == doctest::Approx(-1.3).epsilon(1e-6));
  }

  const KernelModel d1 = train_regressor(w);
  const KernelModel d2 = train_regressor(duplicated(w));
  for (int i = 0; i < 50; ++i) {
    const std::array<double, 2> x{u(rng) / 3, u(rng) / 3};
    CHECK(d1.predict_values(x)[0] == doctest::Approx(d2.predict_values(x)[0]).epsilon(1e-6));
  }

  LabeledSet tiny = regression(19, 4, lin);
  CHECK_THROWS_AS(train_regressor(tiny), Error);
}

TEST_CASE("model save and load") {
  const KernelModel m = train_binary(two_clusters(20));
  const auto path = temp_file("binary.json");
  save_model(m, path);
  const KernelModel r = load_model(path);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 100; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    CHECK(r.predict_proba(x) == m.predict_proba(x));
  }

  // Recompute three decisions straight from the serialized document.
  std::ifstream in(path);
  const nlohmann::json doc = nlohmann::json::parse(in);
  for (int i = 0; i < 3; ++i) {
    const std::array<double, 2> x{u(rng), u(rng)};
    double f = doc.at("bias")[0].get<double>();
    const double gamma = doc.at("gamma").get<double>();
    for (std::size_t j = 0; j < doc.at("support_points").size(); ++j) {
      const auto& s = doc.at("support_points")[j];
      const double d2 = std::pow(x[0] - s[0].get<double>(), 2) + std::pow(x[1] - s[1].get<double>(), 2);
      f += doc.at("weights")[j][0].get<double>() * std::exp(-gamma * d2);
    }
    CHECK(f == doctest::Approx(m.decision(x)(0)).epsilon(1e-12));
  }

  const std::string text = doc.dump();
  const auto cut = temp_file("truncated.json");
  std::ofstream(cut) << text.substr(0, text.size() / 2);
  try {
    load_model(cut);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormatVersion);
  }
  try {
    load_model(temp_file("missing.json"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("training is deterministic") {
  const LabeledSet d = blobs(22);
  TrainOptions o;
  o.seed = 5;
  CHECK(to_json(train_multiclass(d, o)).dump() == to_json(train_multiclass(d, o)).dump());
}

TEST_CASE("group folds are disjoint") {
  const LabeledSet d = two_clusters(23, 60);
  const auto folds = group_folds(d, 5);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    std::set<std::string> groups;
    for (std::size_t i : f) {
      CHECK(all.insert(i).second);
      groups.insert(d.groups[i]);
    }
    for (const auto& g : folds) {
      if (&g == &f) continue;
      for (std::size_t i : g) CHECK(groups.count(d.groups[i]) == 0);
    }
  }
  CHECK(all.size() == d.size());
}

TEST_CASE("cross validation picks from the grid") {
  const CrossValidationResult r = cross_validate(two_clusters(24, 60), 5);
  const std::set<double> lambdas{1e-3, 1e-4, 1e-5, 1e-6};
  CHECK(lambdas.count(r.lambda) == 1);
  bool on_grid = false;
  for (double m : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) on_grid |= std::abs(r.gamma - m / 2.0) < 1e-12;
  CHECK(on_grid);
  CHECK(r.score >= 0.9);
}

}
