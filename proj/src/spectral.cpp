#include "udsp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

#include "udsp/errors.hpp"
#include "udsp/filters.hpp"
#include "udsp/parallel.hpp"

namespace udsp {

namespace {

using std::numbers::pi;

auto next_pow2(double v) -> std::size_t {
  std::size_t n = 1;
  while (static_cast<double>(n) < v)
    n <<= 1;
  return n;
}

// Norm of x under the polynomial weight that certifies its growth order.
auto certified_norm(const SignalView &x, double alpha) -> double {
  return weighted_sup_norm(x, Weight::polynomial(alpha), -200.0, 200.0, 4001).estimate;
}

auto check_probe(const TestFunction &f) {
  if (!(f.half_width > 0.0))
    throw ConfigError("probe half-width must be positive");
  if (f.d != 1 && f.d != 2)
    throw ConfigError("probe smoothness d must be 1 or 2");
  if (!(f.plateau > 0.0 && f.plateau < 1.0))
    throw ConfigError("probe plateau fraction must lie in (0, 1)");
}

struct Partial {
  cplx full{}, half{}, three_quarter{};
};

} // namespace

auto monomial_exp_integral(int k, double beta, double m) -> cplx {
  if (k < 0)
    throw ConfigError("monomial power must be nonnegative");
  if (!(m > 0.0))
    throw ConfigError("truncation half-width m must be positive");
  const double bm = std::abs(beta) * m;
  if (bm <= static_cast<double>(k) + 2.0) {
    // sum_n (i beta)^n/n! int_{-m}^{m} t^{k+n} dt; only even k+n survive.
    cplx sum = 0.0;
    cplx coef = 1.0; // (i beta m)^n / n!
    const double mk1 = std::pow(m, k + 1);
    for (int n = 0; n < 200; ++n) {
      if ((k + n) % 2 == 0) {
        const cplx term = coef * (2.0 * mk1 / static_cast<double>(k + n + 1));
        sum += term;
        if (n > bm + 2 && std::abs(term) <= 1e-18 * std::abs(sum))
          break;
      }
      coef *= cplx(0.0, beta * m) / static_cast<double>(n + 1);
    }
    return sum;
  }
  // Antiderivative e^{i beta t} sum_j (-1)^j k!/(k-j)! t^{k-j} / (i beta)^{j+1}.
  const cplx ib(0.0, beta);
  auto antiderivative = [&](double t) {
    cplx acc = 0.0;
    double falling = 1.0; // k!/(k-j)!
    cplx ibpow = ib;      // (i beta)^{j+1}
    for (int j = 0; j <= k; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      acc += sign * falling * std::pow(t, k - j) / ibpow;
      falling *= static_cast<double>(k - j);
      ibpow *= ib;
    }
    return std::polar(1.0, beta * t) * acc;
  };
  return antiderivative(m) - antiderivative(-m);
}

auto truncated_transform(const SymbolicSignal &x, double m, const std::vector<double> &omega)
    -> TruncatedSpectrum {
  if (!(m > 0.0))
    throw ConfigError("truncation half-width m must be positive");
  TruncatedSpectrum out{m, omega, std::vector<cplx>(omega.size())};
  parallel_for(omega.size(), [&](std::size_t j) {
    cplx acc = 0.0;
    for (const auto &term : x.terms())
      if (term.coeff != cplx{})
        acc += term.coeff * monomial_exp_integral(term.power, term.freq - omega[j], m);
    out.values[j] = acc;
  });
  return out;
}

auto truncated_transform(const SampledSignal &x, double m, const std::vector<double> &omega)
    -> TruncatedSpectrum {
  if (!(m > 0.0))
    throw ConfigError("truncation half-width m must be positive");
  TruncatedSpectrum out{m, omega, std::vector<cplx>(omega.size())};
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < x.values.size(); ++j)
    if (std::abs(x.time(j)) <= m)
      idx.push_back(j);
  parallel_for(omega.size(), [&](std::size_t k) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t j = idx[i];
      const double wgt = (i == 0 || i + 1 == idx.size()) ? 0.5 : 1.0;
      acc += wgt * x.values[j] * std::polar(1.0, -omega[k] * x.time(j));
    }
    out.values[k] = acc * x.dt;
  });
  return out;
}

auto TestFunction::profile(double omega) const -> cplx {
  return amplitude * lowpass_profile(plateau * half_width, half_width, d, omega - center);
}

auto TestFunction::conj() const -> TestFunction {
  auto f = *this;
  f.amplitude = std::conj(amplitude);
  return f;
}

auto TestFunction::transfer() const -> TransferFunction {
  const TestFunction f = *this;
  return TransferFunction(TransferKind::bump, [f](double w) { return f.profile(w); },
                          nlohmann::json(f));
}

auto TestFunction::decay_constant() const -> double {
  const double taper = (1.0 - plateau) * half_width;
  const double c = d == 1 ? 4.0 / taper : 24.0 / (taper * taper);
  return std::abs(amplitude) * c;
}

auto make_bump(double center, double half_width, int d, double plateau) -> TestFunction {
  TestFunction f{center, half_width, d, plateau, 1.0};
  check_probe(f);
  return f;
}

auto probe_samples(const TestFunction &f, double omega_max, std::size_t n)
    -> std::shared_ptr<const ProbeSamples> {
  using Key = std::tuple<double, double, int, double, double, double, double, std::size_t>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const ProbeSamples>> cache;

  const Key key{f.center, f.half_width, f.d, f.plateau, f.amplitude.real(), f.amplitude.imag(),
                omega_max, n};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
  }
  const auto k = synthesize_kernel(f.transfer(), omega_max, n);
  auto s = std::make_shared<ProbeSamples>();
  s->t0 = k.t0;
  s->dt = k.dt;
  s->leakage = k.leakage;
  s->fhat.resize(n);
  // f^(t) = 2pi h_F(-t); -t_j = t_{n-j} on the periodic grid.
  for (std::size_t j = 0; j < n; ++j)
    s->fhat[j] = 2.0 * pi * k.values[(n - j) % n];

  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(s));
  return it->second;
}

namespace {

struct PairingGrid {
  double omega_max = 0.0;
  double T = 0.0;
  std::size_t n = 0;
};

auto pairing_grid(const SignalView &x, const TestFunction &f, const PairingOptions &opts)
    -> PairingGrid {
  check_probe(f);
  const int k = x.max_power;
  const int decay = f.d - k;
  if (decay <= 0)
    throw DivergenceError("pairing integral diverges: signal grows like t^" + std::to_string(k) +
                          " but the probe transform decays only like t^-" +
                          std::to_string(f.d + 1));
  const double band = std::abs(f.center) + f.half_width;
  const double sig_band = x.freqs.empty() ? band : x.max_abs_freq();
  PairingGrid g;
  g.omega_max = 4.0 * (band + sig_band);

  if (opts.T > 0.0) {
    g.T = opts.T;
  } else {
    const double alpha = static_cast<double>(k);
    const double xnorm = std::max(certified_norm(x, alpha), 1e-300);
    const double c = f.decay_constant();
    const double p = static_cast<double>(decay);
    const double target = 2.0 * c * std::pow(2.0, alpha) * xnorm / (p * 1e-6);
    const double taper = (1.0 - f.plateau) * f.half_width;
    g.T = std::clamp(std::pow(target, 1.0 / p), std::max(50.0, 20.0 / taper), opts.T_cap);
  }
  const double dt = pi / g.omega_max;
  g.n = std::max<std::size_t>(1024, next_pow2(4.0 * g.T / dt));
  return g;
}

auto integrate(const SignalView &x, const ProbeSamples &s, double T,
               const std::function<cplx(std::size_t)> &weight_of) -> Partial {
  const std::size_t n = s.fhat.size();
  std::vector<cplx> contrib(n, 0.0);
  parallel_for(n, [&](std::size_t j) {
    const double t = s.t0 + static_cast<double>(j) * s.dt;
    if (std::abs(t) <= T)
      contrib[j] = x.eval(t) * weight_of(j) * s.dt;
  });
  Partial p;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = std::abs(s.t0 + static_cast<double>(j) * s.dt);
    if (t > T)
      continue;
    p.full += contrib[j];
    if (t <= 0.75 * T)
      p.three_quarter += contrib[j];
    if (t <= 0.5 * T)
      p.half += contrib[j];
  }
  return p;
}

auto finish(const Partial &p, double T, double tol) -> PairingResult {
  PairingResult r;
  r.value = p.full;
  r.T = T;
  r.tail_estimate = std::max(std::abs(p.full - p.half), std::abs(p.full - p.three_quarter));
  r.converged = r.tail_estimate <= tol * std::max(1.0, std::abs(r.value));
  return r;
}

} // namespace

auto pairing(const SignalView &x, const TestFunction &f, const PairingOptions &opts)
    -> PairingResult {
  const auto g = pairing_grid(x, f, opts);
  const auto s = probe_samples(f, g.omega_max, g.n);
  const auto part = integrate(x, *s, g.T, [&](std::size_t j) { return s->fhat[j]; });
  return finish(part, g.T, opts.tol);
}

auto pairing(const SymbolicSignal &x, const TestFunction &f, const PairingOptions &opts)
    -> PairingResult {
  return pairing(view(x), f, opts);
}

auto parseval_check(const SignalView &x, const TestFunction &f, const PairingOptions &opts)
    -> ParsevalReport {
  const auto g = pairing_grid(x, f, opts);
  // Time-domain pair y of F, synthesized independently of the probe cache.
  const auto y = synthesize_kernel(f.transfer(), g.omega_max, g.n);
  ProbeSamples ys;
  ys.t0 = y.t0;
  ys.dt = y.dt;
  ys.fhat = y.values;
  const auto lhs_part = integrate(x, ys, g.T, [&](std::size_t j) { return std::conj(ys.fhat[j]); });
  const auto lhs = finish(lhs_part, g.T, opts.tol);

  auto popts = opts;
  popts.T = g.T;
  const auto rhs = pairing(x, f.conj(), popts);

  ParsevalReport rep;
  rep.lhs = lhs.value;
  rep.rhs = rhs.value / (2.0 * pi);
  rep.abs_err = std::abs(rep.lhs - rep.rhs);
  rep.tail_estimate = std::max(lhs.tail_estimate, rhs.tail_estimate / (2.0 * pi));
  rep.converged = lhs.converged && rhs.converged;
  return rep;
}

auto parseval_check(const SymbolicSignal &x, const TestFunction &f, const PairingOptions &opts)
    -> ParsevalReport {
  return parseval_check(view(x), f, opts);
}

auto SpectralGap::contains(const TestFunction &f) const -> bool {
  if (kind == Kind::exterior)
    return f.support_lo() >= edge || f.support_hi() <= -edge;
  return f.support_lo() >= -edge && f.support_hi() <= edge;
}

auto SpectralGap::describe() const -> std::string {
  const auto e = std::to_string(edge);
  return kind == Kind::exterior ? "R \\ [-" + e + ", " + e + "]" : "(-" + e + ", " + e + ")";
}

auto default_probe_bank(const SpectralGap &gap) -> std::vector<TestFunction> {
  const double e = gap.edge;
  if (gap.kind == SpectralGap::Kind::exterior)
    return {make_bump(1.5 * e, 0.4 * e, 2, 0.5), make_bump(2.0 * e, 0.4 * e, 2, 0.5),
            make_bump(3.0 * e, 0.4 * e, 2, 0.5)};
  return {make_bump(-0.5 * e, 0.4 * e, 2, 0.5), make_bump(0.0, 0.4 * e, 2, 0.5),
          make_bump(0.5 * e, 0.4 * e, 2, 0.5)};
}

auto gap_test(const SignalView &x, const SpectralGap &gap, const std::vector<TestFunction> &bank,
              const GapTestOptions &opts) -> GapReport {
  if (!(gap.edge > 0.0))
    throw ConfigError("gap edge must be positive");
  for (const auto &f : bank) {
    check_probe(f);
    if (!gap.contains(f))
      throw ConfigError("probe centered at " + std::to_string(f.center) + " with half-width " +
                        std::to_string(f.half_width) + " is not supported inside the gap " +
                        gap.describe());
  }
  GapReport rep;
  rep.gap = gap;
  rep.tolerance = opts.tol;
  if (bank.empty())
    return rep;

  const double alpha = opts.alpha.value_or(static_cast<double>(x.max_power));
  rep.signal_norm = certified_norm(x, alpha);
  bool all_converged = true;
  for (const auto &f : bank) {
    auto r = pairing(x, f, opts.pairing);
    rep.max_pairing = std::max(rep.max_pairing, std::abs(r.value));
    all_converged = all_converged && r.tail_estimate <= opts.tol;
    rep.probes.push_back({f, r});
  }
  rep.pass = all_converged && rep.max_pairing <= opts.tol * (1.0 + rep.signal_norm);
  return rep;
}

auto gap_test(const SymbolicSignal &x, const SpectralGap &gap,
              const std::vector<TestFunction> &bank, const GapTestOptions &opts) -> GapReport {
  return gap_test(view(x), gap, bank, opts);
}

void to_json(nlohmann::json &j, const TestFunction &f) {
  j = nlohmann::json{{"center", f.center},
                     {"half_width", f.half_width},
                     {"d", f.d},
                     {"plateau", f.plateau},
                     {"amplitude_re", f.amplitude.real()},
                     {"amplitude_im", f.amplitude.imag()}};
}

void to_json(nlohmann::json &j, const GapReport &r) {
  auto probes = nlohmann::json::array();
  for (const auto &p : r.probes)
    probes.push_back({{"center", p.probe.center},
                      {"half_width", p.probe.half_width},
                      {"pairing_re", p.pairing.value.real()},
                      {"pairing_im", p.pairing.value.imag()},
                      {"tail_estimate", p.pairing.tail_estimate},
                      {"T", p.pairing.T}});
  j = nlohmann::json{{"gap", r.gap.describe()},
                     {"probes", probes},
                     {"max_pairing", r.max_pairing},
                     {"signal_norm", r.signal_norm},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass}};
}

} // namespace udsp
