#include "udsp/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "udsp/filters.hpp"
#include "udsp/io.hpp"
#include "udsp/kernels.hpp"
#include "udsp/predictor.hpp"
#include "udsp/spectral.hpp"

namespace udsp {

namespace {

using std::numbers::pi;
using Clock = std::chrono::steady_clock;

auto fmt(double v) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

auto sup_diff(const SampledSignal &a, const std::function<cplx(double)> &f) -> double {
  double m = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j)
    m = std::max(m, std::abs(a.values[j] - f(a.time(j))));
  return m;
}

auto passband_signal() -> SymbolicSignal {
  return SymbolicSignal({{1.0, 0, 0.4}, {0.5, 1, 0.4}});
}

auto a2_spec() -> FilterSpec { return {1.0, 2.0, 2, FilterKind::lowpass, 1.0}; }

auto a1() -> CriterionResult {
  CriterionResult r;
  const FilterSpec spec{1.0, 2.0, 1, FilterKind::lowpass, 0.0};
  FilterOptions opts;
  opts.omega_max = 64.0;
  opts.kernel_n = std::size_t{1} << 17;
  const auto k = design_filter(spec, opts);
  double err = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double t = k.time(j);
    if (std::abs(t) <= 50.0)
      err = std::max(err, std::abs(k.values[j] - trapezoid_kernel_closed_form(1.0, 2.0, t)));
  }
  const double h0_err = std::abs(k.values[k.zero_index()] - 3.0 / (2.0 * pi));
  r.passed = err <= 1e-6 && h0_err <= 1e-9;
  r.detail = "max|h - closed form| on |t|<=50 = " + fmt(err) + ", |h(0) - 3/(2pi)| = " + fmt(h0_err);
  return r;
}

auto a2_a5_run() -> FilterResult {
  return apply_filter(a2_spec(), passband_signal(), -20.0, 20.0, 4001);
}

auto a2() -> CriterionResult {
  CriterionResult r;
  const auto x = passband_signal();
  const auto res = a2_a5_run();
  double xmax = 0.0;
  for (std::size_t j = 0; j < res.y.values.size(); ++j)
    xmax = std::max(xmax, std::abs(x(res.y.time(j))));
  const double rel = sup_diff(res.y, [&](double t) { return x(t); }) / xmax;
  r.passed = rel <= 1e-3;
  r.detail = "relative sup error = " + fmt(rel);
  return r;
}

auto a3() -> CriterionResult {
  CriterionResult r;
  FilterOptions opts;
  opts.run_gap_test = false;
  const auto res = apply_filter(a2_spec(), SymbolicSignal::exponential(3.0), -20.0, 20.0, 4001, opts);
  const double sup = sup_diff(res.y, [](double) { return cplx{}; });
  r.passed = sup <= 1e-3;
  r.detail = "sup|y| = " + fmt(sup);
  return r;
}

auto a4() -> CriterionResult {
  CriterionResult r;
  const auto x = passband_signal() + SymbolicSignal::exponential(3.0, {0.0, 2.0});
  FilterOptions opts;
  opts.run_gap_test = false;
  auto lp = a2_spec();
  auto hp = lp;
  hp.kind = FilterKind::highpass;
  const auto ylp = apply_filter(lp, x, -20.0, 20.0, 4001, opts).y;
  const auto yhp = apply_filter(hp, x, -20.0, 20.0, 4001, opts).y;
  double err = 0.0;
  for (std::size_t j = 0; j < ylp.values.size(); ++j)
    err = std::max(err, std::abs(ylp.values[j] + yhp.values[j] - x(ylp.time(j))));
  r.passed = err <= 1e-9;
  r.detail = "max|y_hp + y_lp - x| = " + fmt(err);
  return r;
}

auto a5() -> CriterionResult {
  CriterionResult r;
  const auto res = a2_a5_run();
  const auto &g = *res.gap_report;
  bool outside = true;
  for (const auto &p : g.probes)
    outside = outside && (p.probe.support_lo() >= 2.0 || p.probe.support_hi() <= -2.0);
  r.passed = g.pass && g.probes.size() == 3 && outside && g.max_pairing <= 1e-3;
  r.detail = "probes = " + std::to_string(g.probes.size()) + ", max|pairing| = " +
             fmt(g.max_pairing) + ", gap test " + (g.pass ? "passed" : "failed");
  return r;
}

auto a6() -> CriterionResult {
  CriterionResult r;
  const auto x = SymbolicSignal::exponential(0.5);
  const auto f = make_bump(0.5, 1.0, 2, 0.5);
  const auto rep = parseval_check(x, f);
  const cplx expected = std::conj(f.profile(0.5));
  const double dl = std::abs(rep.lhs - expected), dr = std::abs(rep.rhs - expected);
  r.passed = rep.abs_err <= 1e-4 && dl <= 1e-4 && dr <= 1e-4;
  r.detail = "|lhs - rhs| = " + fmt(rep.abs_err) + ", |lhs - conj F(0.5)| = " + fmt(dl) +
             ", |rhs - conj F(0.5)| = " + fmt(dr);
  return r;
}

auto a7() -> CriterionResult {
  CriterionResult r;
  const auto k = rectangle_kernel(1.0, 1.0, std::size_t{1} << 16);
  const auto est = rho_l1_norm(k, Weight::polynomial(0.0));
  double min_inc = std::numeric_limits<double>::infinity();
  const std::size_t last = std::min<std::size_t>(3, est.increments.size());
  for (std::size_t i = est.increments.size() - last; i < est.increments.size(); ++i)
    min_inc = std::min(min_inc, est.increments[i]);
  r.passed = est.diverging && last > 0 && min_inc > 1e-2;
  r.detail = std::string("diverging = ") + (est.diverging ? "true" : "false") +
             ", smallest of last dyadic increments = " + fmt(min_inc);
  return r;
}

auto a8() -> CriterionResult {
  CriterionResult r;
  PredictorSpec spec{1.0, 0.0, 8.0, 0.5, 1.0, Convention::proof_variant};
  auto symmetric = [&](double h) {
    return 0.5 * (predictor_transfer_z(spec, spec.a + h).value +
                  predictor_transfer_z(spec, spec.a - h).value);
  };
  const double h = 1e-6;
  const cplx extrap = (4.0 * symmetric(h / 2.0) - symmetric(h)) / 3.0;
  const cplx target = spec.gamma / cplx(spec.a + spec.epsilon(), -spec.omega_hat);
  const double rel = std::abs(extrap - target) / std::abs(target);
  auto printed = spec;
  printed.convention = Convention::as_printed;
  const cplx printed_limit = predictor_transfer_z(printed, spec.a).value;
  r.passed = rel <= 1e-6;
  r.detail = "relative error = " + fmt(rel) + " (proof_variant); as_printed limit = " +
             fmt(printed_limit.real()) + " = -gamma/(a - i omega_hat + eps)";
  return r;
}

auto a9() -> CriterionResult {
  CriterionResult r;
  const PredictorSpec spec{1.0, 0.0, 5.0, 0.5, 1.0, Convention::as_printed};
  const auto coarse = synthesize_predictor_kernel(spec, 2048.0, std::size_t{1} << 18);
  const auto fine = synthesize_predictor_kernel(spec, 4096.0, std::size_t{1} << 19);
  r.passed = coarse.anticausal_mass_fraction <= 1e-3 &&
             fine.anticausal_mass_fraction < coarse.anticausal_mass_fraction;
  r.detail = "anticausal mass fraction " + fmt(coarse.anticausal_mass_fraction) + " -> " +
             fmt(fine.anticausal_mass_fraction) + " after refinement";
  return r;
}

auto a10() -> CriterionResult {
  CriterionResult r;
  const auto x = SymbolicSignal::exponential(1.0);
  std::ostringstream detail;
  bool ok = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma : {4.0, 8.0, 16.0, 32.0}) {
    const PredictorSpec spec{1.0, 0.0, gamma, 0.5, 1.0, Convention::as_printed};
    const auto res = predict(spec, x, -10.0, 10.0, 2001, 0.25);
    const double bound = std::exp(-gamma / 2.0) / std::sqrt(2.0) + 1e-4;
    const bool within = res.sup_err <= bound;
    ok = ok && within && res.sup_err <= prev;
    detail << "g=" << gamma << ": " << fmt(res.sup_err) << (within ? " <= " : " > ") << fmt(bound)
           << " [" << to_string(res.route) << "]; ";
    prev = res.sup_err;
  }
  r.passed = ok;
  r.detail = detail.str();
  return r;
}

auto a11() -> CriterionResult {
  CriterionResult r;
  const PredictorSpec spec{1.0, 0.0, 8.0, 0.5, 1.0, Convention::as_printed};
  PredictOptions opts;
  opts.route = PredictRoute::time_domain;
  const double alpha = 0.25;
  const auto res = predict(spec, SymbolicSignal::exponential(1.0), -10.0, 10.0, 2001, alpha, opts);
  const cplx h1 = predictor_transfer(spec, 1.0).value;
  const auto w = Weight::polynomial(alpha);
  const double err = sup_diff(res.y_hat, [&](double t) {
    return weight_eval(w, t) * h1 * std::polar(1.0, t);
  });
  r.passed = err <= 1e-4;
  r.detail = "sup|y_hat - rho H(1) e^{it}| = " + fmt(err) + " (kernel n = " +
             std::to_string(res.kernel_n) + ")";
  return r;
}

auto a12() -> CriterionResult {
  CriterionResult r;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> center(-3.0, 3.0), width(0.5, 2.0), plateau(0.2, 0.8);
  std::uniform_int_distribution<int> smooth(1, 2);
  const auto w = Weight::polynomial(0.25);
  const double omega_max = 40.0;
  const std::size_t n = std::size_t{1} << 16;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto f = make_bump(center(rng), width(rng), smooth(rng), plateau(rng));
    const auto g = make_bump(center(rng), width(rng), smooth(rng), plateau(rng));
    const auto nf = rho_l1_norm(synthesize_kernel(f.transfer(), omega_max, n), w).norm;
    const auto ng = rho_l1_norm(synthesize_kernel(g.transfer(), omega_max, n), w).norm;
    const auto fg = TransferFunction::product(f.transfer(), g.transfer());
    const auto nfg = rho_l1_norm(synthesize_kernel(fg, omega_max, n), w).norm;
    worst = std::max(worst, nfg / (nf * ng));
  }
  r.passed = worst <= 1.0 + 1e-3;
  r.detail = "max ||fg|| / (||f|| ||g||) over 20 pairs = " + fmt(worst);
  return r;
}

auto a13() -> CriterionResult {
  CriterionResult r;
  const PredictorSpec base{1.0, 0.0, 1.0, 0.5, 1.0, Convention::as_printed};
  const auto study = vgamma_study(base, {1, 2, 4, 8, 16, 32}, -8.0, 8.0, 4096, 0.25);
  bool ok = study.size() == 12;
  std::size_t worst_sat = 0;
  for (const auto &e : study) {
    ok = ok && std::isfinite(e.sup_damped) && std::isfinite(e.rho_l1_of_damped);
    if (e.convention == Convention::as_printed) {
      worst_sat = std::max(worst_sat, e.saturated_points);
      ok = ok && static_cast<double>(e.saturated_points) < 0.01 * static_cast<double>(e.grid_points);
    }
  }
  r.passed = ok;
  r.detail = std::to_string(study.size()) + " (convention, gamma) entries; max as_printed saturated points = " +
             std::to_string(worst_sat) + "/4096";
  return r;
}

} // namespace

auto acceptance_criteria() -> std::vector<Criterion> {
  return {
      {"A1", "trapezoid kernel synthesis vs closed form", a1},
      {"A2", "lowpass passband identity", a2},
      {"A3", "lowpass stopband annihilation", a3},
      {"A4", "highpass + lowpass complement identity", a4},
      {"A5", "gap test on the filtered output", a5},
      {"A6", "Parseval analog", a6},
      {"A7", "ideal rectangle kernel flagged divergent", a7},
      {"A8", "predictor removable singularity", a8},
      {"A9", "predictor kernel causality", a9},
      {"A10", "predictor convergence over gamma", a10},
      {"A11", "transfer vs time-domain prediction", a11},
      {"A12", "weighted-L1 submultiplicativity of bump products", a12},
      {"A13", "V_gamma damped-profile study", a13},
  };
}

namespace {

// Wall-clock limits attached to individual criteria.
auto time_limit(const std::string &id) -> double {
  if (id == "A1")
    return 5.0;
  if (id == "A2")
    return 10.0;
  if (id == "A10")
    return 60.0;
  return std::numeric_limits<double>::infinity();
}

} // namespace

auto run_acceptance(const std::vector<std::string> &only) -> std::vector<CriterionResult> {
  std::vector<CriterionResult> out;
  for (const auto &c : acceptance_criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
      continue;
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = c.run();
    } catch (const std::exception &e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.id = c.id;
    r.description = c.description;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const double limit = time_limit(c.id);
    if (r.seconds > limit) {
      r.passed = false;
      r.detail += "; exceeded the " + fmt(limit) + " s limit";
    }
    out.push_back(std::move(r));
  }
  return out;
}

auto format_results(const std::vector<CriterionResult> &results) -> std::string {
  std::ostringstream s;
  for (const auto &r : results) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    s << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.description << " :: " << r.detail
      << " (" << secs << " s)\n";
  }
  return s.str();
}

} // namespace udsp
