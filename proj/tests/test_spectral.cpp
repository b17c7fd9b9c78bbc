#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "udsp/errors.hpp"
#include "udsp/spectral.hpp"

using namespace udsp;
using std::numbers::pi;

namespace {

// X_m(w) by Gauss-Legendre with enough panels to resolve the oscillation.
auto quadrature_transform(const SymbolicSignal &x, double m, double w) -> cplx {
  const double freq = x.max_abs_freq() + std::abs(w) + 1.0;
  const int panels = std::max(50, static_cast<int>(4.0 * m * freq));
  return oracle::integrate([&](double t) { return std::polar(1.0, -w * t) * x(t); }, -m, m, panels);
}

} // namespace

TEST_CASE("truncated transform of the constant") {
  const auto x = SymbolicSignal::monomial(0);
  const double m = 3.7;
  const auto s = truncated_transform(x, m, {0.0, 0.9, -2.5});
  CHECK(std::abs(s.values[0] - 2.0 * m) < 1e-13);
  CHECK(std::abs(s.values[1] - 2.0 * std::sin(m * 0.9) / 0.9) < 1e-13);
  CHECK(std::abs(s.values[2] - 2.0 * std::sin(m * 2.5) / 2.5) < 1e-13);
  CHECK(std::abs(quadrature_transform(x, m, 0.9) - s.values[1]) < 1e-12);
}

TEST_CASE("truncated transform at a signal frequency uses the limit value") {
  const double m = 2.0, nu = 1.3;
  const auto odd = truncated_transform(SymbolicSignal({{1.0, 1, nu}}), m, {nu});
  CHECK(std::abs(odd.values[0]) < 1e-14);
  const auto even = truncated_transform(SymbolicSignal({{1.0, 2, nu}}), m, {nu});
  CHECK(std::abs(even.values[0] - 2.0 * m * m * m / 3.0) < 1e-13);
  // Nearby frequencies approach the limit continuously.
  const auto near = truncated_transform(SymbolicSignal({{1.0, 2, nu}}), m, {nu + 1e-7});
  CHECK(std::abs(near.values[0] - even.values[0]) < 1e-6);
}

TEST_CASE("truncated transform rejects m <= 0") {
  CHECK_THROWS_AS((void)truncated_transform(SymbolicSignal::monomial(0), 0.0, {0.0}), ConfigError);
  CHECK_THROWS_AS((void)monomial_exp_integral(1, 1.0, -1.0), ConfigError);
}

TEST_CASE("property: closed form matches quadrature on 100 random (m, w)") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ms(0.1, 30.0), ws(-6.0, 6.0), u(-1.0, 1.0);
  std::uniform_int_distribution<int> ks(0, 4);
  for (int i = 0; i < 100; ++i) {
    const SymbolicSignal x({{{u(rng), u(rng)}, ks(rng), 3.0 * u(rng)},
                            {{u(rng), u(rng)}, ks(rng), 3.0 * u(rng)}});
    const double m = ms(rng), w = ws(rng);
    const cplx closed = truncated_transform(x, m, {w}).values[0];
    const cplx quad = quadrature_transform(x, m, w);
    CHECK(std::abs(closed - quad) <= 1e-8 * std::max(1.0, std::abs(quad)));
  }
}

TEST_CASE("sampled truncated transform agrees with the symbolic one") {
  const SymbolicSignal x({{1.0, 1, 0.5}, {cplx(0.0, 2.0), 0, -1.0}});
  const auto xs = sample([&](double t) { return x(t); }, window_grid(-10.0, 10.0, 20000));
  const std::vector<double> w{-1.0, 0.0, 0.25, 2.0};
  const auto a = truncated_transform(x, 5.0, w);
  const auto b = truncated_transform(xs, 5.0, w);
  for (std::size_t j = 0; j < w.size(); ++j)
    CHECK(std::abs(a.values[j] - b.values[j]) < 1e-4);
}

TEST_CASE("bump profile shape") {
  for (int d : {1, 2}) {
    const auto f = make_bump(3.0, 1.0, d, 0.4);
    CHECK(std::abs(f.profile(3.0) - 1.0) == 0.0);
    CHECK(std::abs(f.profile(3.4) - 1.0) == 0.0);
    CHECK(std::abs(f.profile(2.6) - 1.0) == 0.0);
    CHECK(std::abs(f.profile(4.0)) < 1e-15);
    CHECK(std::abs(f.profile(1.99)) == 0.0);
    CHECK(std::abs(f.profile(4.01)) == 0.0);
    // Continuous: small steps give small changes.
    double jump = 0.0;
    for (double w = 1.9; w < 4.1; w += 1e-4)
      jump = std::max(jump, std::abs(f.profile(w + 1e-4) - f.profile(w)));
    CHECK(jump < 1e-3);
  }
  CHECK_THROWS_AS((void)make_bump(0.0, -1.0, 2, 0.5), ConfigError);
  CHECK_THROWS_AS((void)make_bump(0.0, 1.0, 3, 0.5), ConfigError);
  CHECK_THROWS_AS((void)make_bump(0.0, 1.0, 2, 1.0), ConfigError);
}

TEST_CASE("probe samples match direct quadrature of the profile") {
  const auto f = make_bump(1.0, 0.8, 2, 0.5);
  const auto s = probe_samples(f, 16.0, 1 << 14);
  for (std::size_t j : {std::size_t{8192}, std::size_t{8200}, std::size_t{9000}, std::size_t{7000}}) {
    const double t = s->t0 + static_cast<double>(j) * s->dt;
    const cplx expected =
        oracle::integrate([&](double w) { return f.profile(w) * std::polar(1.0, -w * t); }, 0.2,
                          1.8, 200);
    CHECK(std::abs(s->fhat[j] - expected) < 1e-7);
  }
  // Cached: the same object comes back.
  CHECK(probe_samples(f, 16.0, 1 << 14).get() == s.get());
}

TEST_CASE("property: probe transforms decay like |t|^-(d+1)") {
  for (int d : {1, 2}) {
    const auto f = make_bump(0.0, 1.0, d, 0.5);
    const auto s = probe_samples(f, 8.0, 1 << 16);
    auto band_max = [&](double lo, double hi) {
      double m = 0.0;
      for (std::size_t j = 0; j < s->fhat.size(); ++j) {
        const double t = std::abs(s->t0 + static_cast<double>(j) * s->dt);
        if (t >= lo && t < hi)
          m = std::max(m, std::abs(s->fhat[j]));
      }
      return m;
    };
    const double r = band_max(400.0, 800.0) / band_max(200.0, 400.0);
    CHECK(r == doctest::Approx(std::pow(2.0, -(d + 1))).epsilon(0.15));
    CHECK(band_max(400.0, 800.0) <= f.decay_constant() * std::pow(400.0, -(d + 1)));
  }
}

TEST_CASE("pairing of exponentials: 2 pi F(nu)") {
  const auto f = make_bump(1.0, 1.0, 2, 0.4);
  for (double nu : {0.5, 1.0, 1.7, 2.5}) {
    const auto r = pairing(SymbolicSignal::exponential(nu), f);
    CHECK(std::abs(r.value - 2.0 * pi * f.profile(nu)) < 1e-6);
    CHECK(r.converged);
  }
}

TEST_CASE("pairing of t e^{i nu t}: -2 pi i F'(nu)") {
  const auto f = make_bump(1.0, 1.0, 2, 0.4);
  for (double nu : {0.3, 0.5, 1.5}) {
    const auto r = pairing(SymbolicSignal({{1.0, 1, nu}}), f);
    const cplx deriv = oracle::derivative_c([&](double w) { return f.profile(w); }, nu, 1e-3);
    CHECK(std::abs(r.value - cplx(0.0, -2.0 * pi) * deriv) < 1e-4);
  }
}

TEST_CASE("pairing diverges when growth beats probe decay") {
  const auto f = make_bump(1.0, 1.0, 1, 0.4);
  CHECK_THROWS_AS((void)pairing(SymbolicSignal::monomial(1), f), DivergenceError);
  CHECK_THROWS_AS((void)pairing(SymbolicSignal::monomial(2), make_bump(1.0, 1.0, 2, 0.4)),
                  DivergenceError);
}

TEST_CASE("property: pairing is linear in x and conjugate-linear in f") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto f = make_bump(0.5, 1.2, 2, 0.5);
  PairingOptions o;
  o.T = 600.0;
  for (int i = 0; i < 5; ++i) {
    // Shared frequency band, so that all three pairings use the same grid.
    const double nu = 1.5 * u(rng);
    const SymbolicSignal x1({{{u(rng), u(rng)}, 1, nu}});
    const SymbolicSignal x2({{{u(rng), u(rng)}, 0, -nu}});
    const cplx c(u(rng), u(rng));
    const auto lhs = pairing(x1 + x2.scaled(c), f, o).value;
    const auto rhs = pairing(x1, f, o).value + c * pairing(x2, f, o).value;
    CHECK(std::abs(lhs - rhs) < 1e-10);

    auto fa = f;
    fa.amplitude = c;
    const auto conj_pair = pairing(x1, fa.conj(), o).value;
    CHECK(std::abs(conj_pair - std::conj(c) * pairing(x1, f, o).value) < 1e-10);
  }
}

TEST_CASE("property: doubling T stays within the tail estimate") {
  const SymbolicSignal x({{1.0, 1, 0.3}, {0.5, 0, 2.2}});
  const auto f = make_bump(1.0, 1.0, 2, 0.5);
  for (double T : {100.0, 300.0, 1000.0}) {
    PairingOptions a, b;
    a.T = T;
    b.T = 2.0 * T;
    const auto ra = pairing(x, f, a);
    const auto rb = pairing(x, f, b);
    CHECK(std::abs(rb.value - ra.value) <= ra.tail_estimate);
  }
}

TEST_CASE("property: pairing is bounded by norm times probe weighted-L1 norm") {
  const SymbolicSignal x({{0.7, 1, 0.9}, {cplx(0.0, 1.0), 0, 1.4}});
  const auto f = make_bump(1.0, 1.0, 2, 0.5);
  const auto r = pairing(x, f);
  const double xnorm = weighted_sup_norm(x, Weight::polynomial(1.0), -r.T, r.T, 200001).estimate;
  const auto k = synthesize_kernel(f.transfer(), 16.0, 1 << 16);
  // f^(t) = 2 pi h_F(-t), and the weight is even.
  const double fnorm = 2.0 * pi * rho_l1_norm(k, Weight::polynomial(1.0)).norm;
  CHECK(std::abs(r.value) <= xnorm * fnorm + r.tail_estimate);
}

TEST_CASE("Parseval analog examples") {
  const auto f = make_bump(0.5, 1.0, 2, 0.5);
  auto rep = parseval_check(SymbolicSignal::exponential(0.5), f);
  CHECK(std::abs(rep.lhs - 1.0) < 1e-6);
  CHECK(std::abs(rep.rhs - 1.0) < 1e-6);
  rep = parseval_check(SymbolicSignal::exponential(2.0), f);
  CHECK(std::abs(rep.lhs) < 1e-6);
  CHECK(std::abs(rep.rhs) < 1e-6);
  rep = parseval_check(SymbolicSignal::exponential(0.5, 0.0), f);
  CHECK(std::abs(rep.lhs) == 0.0);
  CHECK(std::abs(rep.rhs) == 0.0);
  // Taper region with a complex amplitude.
  auto g = make_bump(0.0, 1.0, 2, 0.5);
  g.amplitude = cplx(0.6, -0.8);
  rep = parseval_check(SymbolicSignal::exponential(0.7), g);
  CHECK(std::abs(rep.lhs - std::conj(g.profile(0.7))) < 1e-6);
  CHECK(rep.abs_err < 1e-8);
}

TEST_CASE("gap test examples") {
  const SpectralGap gap{SpectralGap::Kind::exterior, 1.0};
  const std::vector<TestFunction> bank{make_bump(3.0, 1.0, 2, 0.5)};
  auto rep = gap_test(SymbolicSignal::exponential(0.5), gap, bank);
  CHECK(rep.pass);
  CHECK(rep.max_pairing < 1e-6);
  rep = gap_test(SymbolicSignal::exponential(3.0), gap, bank);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_pairing == doctest::Approx(2.0 * pi).epsilon(1e-6));
  rep = gap_test(SymbolicSignal::exponential(3.0), gap, {});
  CHECK(rep.pass);
  CHECK(rep.max_pairing == 0.0);
}

TEST_CASE("gap test rejects probes reaching into the excluded band") {
  const SpectralGap ext{SpectralGap::Kind::exterior, 2.0};
  CHECK_THROWS_AS((void)gap_test(SymbolicSignal::exponential(0.5), ext, {make_bump(2.5, 1.0, 2, 0.5)}),
                  ConfigError);
  const SpectralGap in{SpectralGap::Kind::interior, 1.0};
  CHECK_THROWS_AS((void)gap_test(SymbolicSignal::exponential(3.0), in, {make_bump(0.5, 0.6, 2, 0.5)}),
                  ConfigError);
  CHECK(gap_test(SymbolicSignal::exponential(3.0), in, default_probe_bank(in)).pass);
  for (const auto &f : default_probe_bank(ext))
    CHECK(ext.contains(f));
}

TEST_CASE("concurrent pairings agree with serial ones") {
  const auto x = SymbolicSignal({{1.0, 1, 0.2}});
  std::vector<TestFunction> bank;
  for (int i = 0; i < 6; ++i)
    bank.push_back(make_bump(0.3 * i, 0.7, 2, 0.5));
  std::vector<cplx> serial, parallel(bank.size());
  for (const auto &f : bank)
    serial.push_back(pairing(x, f).value);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < bank.size(); ++i)
      threads.emplace_back([&, i] { parallel[i] = pairing(x, bank[i]).value; });
  }
  for (std::size_t i = 0; i < bank.size(); ++i)
    CHECK(serial[i] == parallel[i]);
}

TEST_CASE("gap report json") {
  const SpectralGap gap{SpectralGap::Kind::exterior, 1.0};
  const auto rep = gap_test(SymbolicSignal::exponential(0.5), gap, default_probe_bank(gap));
  const nlohmann::json j = rep;
  CHECK(j.at("probes").size() == 3);
  CHECK(j.at("probes")[0].contains("pairing_re"));
  CHECK(j.at("probes")[0].contains("center"));
  CHECK(j.at("pass") == true);
}
