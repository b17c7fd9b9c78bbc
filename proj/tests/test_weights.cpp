#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "udsp/errors.hpp"
#include "udsp/weights.hpp"

using namespace udsp;

TEST_CASE("polynomial weight values") {
  CHECK(weight_eval(Weight::polynomial(1.0), 0.0) == 1.0);
  CHECK(weight_eval(Weight::polynomial(2.0), 3.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(weight_eval(Weight::polynomial(0.0), 1e6) == 1.0);
}

TEST_CASE("exponential and gaussian weight values") {
  CHECK(weight_eval(Weight::exponential(0.5), -2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(weight_eval(Weight::gaussian(1.0), 2.0) == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("negative exponent is rejected") {
  CHECK_THROWS_AS((void)Weight::polynomial(-0.1), ConfigError);
  CHECK_THROWS_AS((void)Weight::exponential(-1.0), ConfigError);
  Weight w{WeightFamily::polynomial, -1.0};
  CHECK_THROWS_AS((void)weight_eval(w, 1.0), ConfigError);
}

TEST_CASE("admissibility excludes the gaussian family") {
  CHECK_NOTHROW(require_admissible(Weight::polynomial(1.0)));
  CHECK_NOTHROW(require_admissible(Weight::exponential(1.0)));
  CHECK_THROWS_AS(require_admissible(Weight::gaussian(1.0)), ConfigError);
}

TEST_CASE("inverse weight matches the reciprocal") {
  for (double t : {-50.0, -1.0, 0.0, 2.5, 300.0}) {
    for (const auto &w : {Weight::polynomial(1.3), Weight::exponential(0.2)})
      CHECK(weight_inverse(w, t) == doctest::Approx(1.0 / weight_eval(w, t)).epsilon(1e-14));
  }
}

namespace {

auto square_grid(double lo, double hi, int n) {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pairs.emplace_back(lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1));
  return pairs;
}

} // namespace

TEST_CASE("submultiplicativity on a square grid") {
  const auto pairs = square_grid(-10.0, 10.0, 41);
  CHECK(submultiplicativity_check(Weight::polynomial(1.0), pairs).holds);
  CHECK(submultiplicativity_check(Weight::exponential(1.0), pairs).holds);
}

TEST_CASE("gaussian counterexample at (1, 1)") {
  const std::vector<std::pair<double, double>> pairs{{1.0, 1.0}};
  const auto rep = submultiplicativity_check(Weight::gaussian(1.0), pairs);
  CHECK_FALSE(rep.holds);
  CHECK(rep.worst_ratio == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(rep.worst_pair.first == 1.0);
  CHECK(rep.worst_pair.second == 1.0);
}

TEST_CASE("empty pair grid is rejected") {
  const std::vector<std::pair<double, double>> none;
  CHECK_THROWS_AS((void)submultiplicativity_check(Weight::polynomial(1.0), none), ConfigError);
}

TEST_CASE("property: polynomial weights are submultiplicative on random pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ts(-1e4, 1e4), alphas(0.0, 4.0);
  for (int rep = 0; rep < 5; ++rep) {
    const auto w = Weight::polynomial(alphas(rng));
    std::vector<std::pair<double, double>> pairs(10000);
    for (auto &p : pairs)
      p = {ts(rng), ts(rng)};
    const auto r = submultiplicativity_check(w, pairs);
    CHECK(r.holds);
    CHECK(r.worst_ratio <= 1.0 + kSubmultiplicativityTol);
  }
}

TEST_CASE("property: even and nonincreasing in |t|") {
  for (const auto &w : {Weight::polynomial(0.7), Weight::exponential(0.3), Weight::gaussian(0.1)}) {
    double prev = 1.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.25 * i;
      const double v = weight_eval(w, t);
      CHECK(v == weight_eval(w, -t));
      CHECK(v <= prev);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("json round trip") {
  const auto w = Weight::polynomial(1.0);
  const nlohmann::json j = w;
  CHECK(j.at("family") == "polynomial");
  CHECK(j.at("alpha") == 1.0);
  const auto back = j.get<Weight>();
  CHECK(back.family == WeightFamily::polynomial);
  CHECK(back.alpha == 1.0);
  CHECK_THROWS_AS((void)weight_family_from_string("cauchy"), ConfigError);
}
