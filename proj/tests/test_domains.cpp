#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "moqd/domains.hpp"
#include "moqd/errors.hpp"
#include "moqd/kernels.hpp"

using namespace moqd;
using Vec = std::vector<double>;

TEST_CASE("clip") {
  CHECK(clip(3.0) == 3.0);
  CHECK(clip(5.12) == 5.12);
  CHECK(clip(6.0) == doctest::Approx(0.853333).epsilon(1e-5));
  CHECK(clip(-10.0) == doctest::Approx(-0.512));
}

TEST_CASE("sphere at the first shift") {
  const auto spec = DomainSpec::make(DomainKind::sphere, 4, 2);
  const Vec x(4, 4.0);
  const auto raw = sphere_raw(x, spec.shifts);
  CHECK(raw[0] == 0.0);
  CHECK(raw[1] == doctest::Approx(-256.0));
  const auto ev = eval_sphere(x, spec);
  CHECK(ev.objectives[0] == doctest::Approx(100.0));
  // -256 lies beyond the normalization span for n = 4.
  CHECK(ev.objectives[1] == 0.0);
  CHECK(ev.measures == Vec{8.0, 8.0});
  CHECK_FALSE(ev.failed);
}

TEST_CASE("sphere measures for n = 100") {
  const auto spec = DomainSpec::make(DomainKind::sphere, 100, 2);
  const auto ev = evaluate(Vec(100, 4.0), spec);
  CHECK(ev.measures[0] == doctest::Approx(200.0));
  CHECK(ev.measures[1] == doctest::Approx(200.0));
}

TEST_CASE("rastrigin at the first shift") {
  const auto spec = DomainSpec::make(DomainKind::rastrigin, 2, 2);
  const auto raw = rastrigin_raw(Vec{4.0, 4.0}, spec.shifts);
  CHECK(raw[0] == doctest::Approx(20.0));
  CHECK(raw[1] == doctest::Approx(-108.0));
  const auto ev = evaluate(Vec{4.0, 4.0}, spec);
  const double b = 202.1497 * 2;
  CHECK(ev.objectives[1] == doctest::Approx(100.0 * (b - 108.0) / b));
  CHECK(ev.objectives[0] == 100.0);
}

TEST_CASE("three-objective variants use shifts 4, 0, -4") {
  const auto spec = DomainSpec::make(DomainKind::rastrigin, 6, 3);
  CHECK(spec.shifts == Vec{4.0, 0.0, -4.0});
  CHECK(evaluate(Vec(6, 0.0), spec).objectives.size() == 3);
}

TEST_CASE("objectives stay in [0, 100] and measures inside the bounds") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> wide(0.0, 30.0);
  for (auto kind : {DomainKind::sphere, DomainKind::rastrigin, DomainKind::arm}) {
    const auto spec = DomainSpec::make(kind, 10, 2);
    const auto bounds = spec.measure_bounds();
    for (int t = 0; t < 2000; ++t) {
      Vec x(10);
      for (double& v : x) v = wide(rng);
      const auto ev = evaluate(x, spec);
      for (double o : ev.objectives) {
        CHECK(o >= 0.0);
        CHECK(o <= 100.0);
      }
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(ev.measures[j] >= bounds.low[j]);
        CHECK(ev.measures[j] <= bounds.high[j]);
      }
    }
  }
}

TEST_CASE("constant vectors between the shifts trade objectives off") {
  const auto spec = DomainSpec::make(DomainKind::sphere, 8, 2);
  std::vector<Vec> objs;
  for (int i = 0; i <= 16; ++i) objs.push_back(evaluate(Vec(8, -2.0 + 0.25 * i), spec).objectives);
  for (std::size_t a = 0; a < objs.size(); ++a)
    for (std::size_t b = 0; b < objs.size(); ++b)
      if (a != b) CHECK_FALSE(dominates(objs[a], objs[b]));
}

TEST_CASE("arm with zero angles points along the x axis") {
  const auto spec = DomainSpec::make(DomainKind::arm, 4, 2);
  const auto ev = evaluate(Vec(4, 0.0), spec);
  CHECK(ev.measures[0] == doctest::Approx(4.0));
  CHECK(ev.measures[1] == doctest::Approx(0.0));
  CHECK(ev.objectives == Vec{100.0, 100.0});
  CHECK_FALSE(ev.failed);
}

TEST_CASE("arm folds back on itself") {
  const auto spec = DomainSpec::make(DomainKind::arm, 2, 2);
  const auto ev = evaluate(Vec{0.0, std::numbers::pi}, spec);
  CHECK(ev.measures[0] == doctest::Approx(0.0));
  CHECK(std::abs(ev.measures[1]) < 1e-12);
}

TEST_CASE("arm flags joint spreads beyond the variance bound") {
  const auto spec = DomainSpec::make(DomainKind::arm, 4, 2);
  const double a = std::sqrt(7.0);
  const auto bad = evaluate(Vec{a, -a, 0.0, 0.0}, spec);
  CHECK(bad.failed);
  CHECK(bad.objectives[0] == 0.0);
  const double b = std::sqrt(6.0);
  const auto ok = evaluate(Vec{b, -b, 0.0, 0.0}, spec);
  CHECK_FALSE(ok.failed);
  CHECK(ok.objectives[0] == doctest::Approx(100.0 * (1.0 - 6.0 / 6.58)));
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::arm, 4, 3), ConfigError);
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::sphere, 3, 2), ConfigError);
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::sphere, 4, 4), ConfigError);
  DomainSpec same = DomainSpec::make(DomainKind::sphere, 4, 2);
  same.shifts = {1.0, 1.0};
  CHECK_THROWS_AS(same.validate(), ConfigError);
  CHECK_THROWS_AS(evaluate(Vec(6, 0.0), DomainSpec::make(DomainKind::sphere, 4, 2)), ContractViolation);
  CHECK(parse_domain_kind("rastrigin") == DomainKind::rastrigin);
  CHECK_THROWS_AS(parse_domain_kind("ackley"), ConfigError);
}

TEST_CASE("serial and OpenMP kernels agree") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  kernels::PointSet points(2, 5000);
  kernels::PointSet centroids(2, 64);
  for (double& v : points.data) v = normal(rng);
  for (double& v : centroids.data) v = normal(rng);
  // Duplicate a centroid so ties are exercised.
  centroids.row(10)[0] = centroids.row(3)[0];
  centroids.row(10)[1] = centroids.row(3)[1];
  std::vector<std::size_t> serial(points.size());
  std::vector<std::size_t> parallel(points.size());
  kernels::nearest_centroid_serial(points, centroids, serial);
  kernels::nearest_centroid_parallel(points, centroids, parallel);
  CHECK(serial == parallel);
  CHECK(std::find(serial.begin(), serial.end(), 10) == serial.end());

  for (auto kind : {DomainKind::sphere, DomainKind::rastrigin, DomainKind::arm}) {
    const auto spec = DomainSpec::make(kind, 20, 2);
    std::vector<Eigen::VectorXd> xs;
    for (int i = 0; i < 300; ++i) {
      Eigen::VectorXd x(20);
      for (Eigen::Index j = 0; j < 20; ++j) x[j] = 3.0 * normal(rng);
      xs.push_back(x);
    }
    const auto a = kernels::evaluate_batch_serial(xs, spec);
    const auto b = kernels::evaluate_batch_parallel(xs, spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].objectives == b[i].objectives);
      CHECK(a[i].measures == b[i].measures);
      CHECK(a[i].failed == b[i].failed);
    }
  }
}

TEST_CASE("batch evaluation propagates contract violations") {
  const auto spec = DomainSpec::make(DomainKind::sphere, 4, 2);
  std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(kernels::evaluate_batch_parallel(xs, spec), ContractViolation);
  CHECK_THROWS_AS(kernels::evaluate_batch_serial(xs, spec), ContractViolation);
}
