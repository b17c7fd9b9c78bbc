#include "udsp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "udsp/errors.hpp"
#include "udsp/parallel.hpp"

namespace udsp {

namespace {

constexpr cplx I{0.0, 1.0};

// e^E - 1 without cancellation for small |E|.
auto expm1_complex(cplx e) -> cplx {
  const double x = e.real(), y = e.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

auto sign_of(Convention c) -> double { return c == Convention::as_printed ? 1.0 : -1.0; }

// Clamp Re E to +-700 and report whether that was needed.
auto clamp_exponent(cplx e, bool &saturated) -> cplx {
  saturated = std::abs(e.real()) > kSaturationExponent;
  if (saturated)
    e = {std::copysign(kSaturationExponent, e.real()), e.imag()};
  return e;
}

} // namespace

auto to_string(Convention c) -> std::string {
  return c == Convention::as_printed ? "as_printed" : "proof_variant";
}

auto convention_from_string(const std::string &s) -> Convention {
  if (s == "as_printed" || s == "printed")
    return Convention::as_printed;
  if (s == "proof_variant" || s == "proof")
    return Convention::proof_variant;
  throw ConfigError("unknown sign convention '" + s + "' (expected printed or proof)");
}

void PredictorSpec::validate() const {
  if (!(a > 0.0))
    throw ConfigError("predictor base rate a must be positive");
  if (!(gamma > 0.0))
    throw ConfigError("predictor sharpness gamma must be positive");
  if (!(r_exp > 0.0))
    throw ConfigError("predictor regularization exponent r must be positive");
  if (!(c > 0.0))
    throw ConfigError("compensator strength c must be positive");
  if (!std::isfinite(omega_hat))
    throw ConfigError("omega_hat must be finite");
}

auto PredictorSpec::epsilon() const -> double { return std::pow(gamma, -r_exp); }

auto anticausal_base_transfer(double a, double omega) -> cplx {
  if (!(a > 0.0))
    throw ConfigError("anticausal base rate a must be positive");
  return 1.0 / cplx(a, -omega);
}

auto predictor_exponent(const PredictorSpec &spec, cplx z) -> cplx {
  const cplx denom = z - I * spec.omega_hat + spec.epsilon();
  return -sign_of(spec.convention) * spec.gamma * (z - spec.a) / denom;
}

auto predictor_re_exponent(const PredictorSpec &spec, double omega) -> double {
  const double eps = spec.epsilon();
  const double delta = omega - spec.omega_hat;
  return sign_of(spec.convention) * spec.gamma * (spec.a * eps - omega * delta) /
         (delta * delta + eps * eps);
}

auto predictor_transfer_z(const PredictorSpec &spec, cplx z) -> TransferValue {
  const cplx gap = spec.a - z;
  const cplx denom = z - I * spec.omega_hat + spec.epsilon();
  TransferValue out;
  if (std::abs(gap) < 1e-8 * (1.0 + std::abs(spec.a))) {
    // E/(a - z) = s gamma / denom exactly; (e^E - 1)/E = 1 + E/2 + E^2/6 + ...
    const cplx ratio = sign_of(spec.convention) * spec.gamma / denom;
    const cplx e = ratio * gap;
    out.value = -ratio * (1.0 + e / 2.0 + e * e / 6.0);
    return out;
  }
  const cplx e = clamp_exponent(predictor_exponent(spec, z), out.saturated);
  out.value = -expm1_complex(e) / gap;
  return out;
}

auto predictor_transfer(const PredictorSpec &spec, double omega) -> TransferValue {
  return predictor_transfer_z(spec, cplx(0.0, omega));
}

auto predictor_transfer_function(const PredictorSpec &spec) -> TransferFunction {
  spec.validate();
  // E -> -s gamma as |omega| -> inf, so H ~ C/(a - i omega) with C = 1 - e^{-s gamma}.
  const double e_inf = -sign_of(spec.convention) * spec.gamma;
  const double c_inf = -std::expm1(e_inf);
  return TransferFunction(
      TransferKind::predictor, [spec](double w) { return predictor_transfer(spec, w).value; },
      nlohmann::json(spec), 0.0, ExpTail{-c_inf, spec.a, true});
}

auto compensator(const PredictorSpec &spec, double omega, double nu) -> double {
  if (!(nu > 0.0))
    throw ConfigError("compensator regularization nu must be positive");
  const double delta = omega - spec.omega_hat;
  return std::exp(spec.c / (delta * delta + nu));
}

auto v_gamma_profile(const PredictorSpec &spec, const std::vector<double> &omega)
    -> VGammaProfile {
  spec.validate();
  const std::size_t n = omega.size();
  const double eps = spec.epsilon();
  VGammaProfile p;
  p.omega = omega;
  p.V.resize(n);
  p.damped.resize(n);
  p.re_exponent.resize(n);
  p.re_exponent_direct.resize(n);
  std::vector<char> sat(n, 0);
  parallel_for(n, [&](std::size_t j) {
    const double w = omega[j];
    const cplx z(0.0, w);
    const cplx e = predictor_exponent(spec, z);
    p.re_exponent_direct[j] = e.real();
    p.re_exponent[j] = predictor_re_exponent(spec, w);
    bool saturated = false;
    const cplx ec = clamp_exponent(e, saturated);
    sat[j] = saturated ? 1 : 0;
    // V = -e^E / (a - i w); damped in log space so that G never overflows.
    const cplx base = anticausal_base_transfer(spec.a, w);
    p.V[j] = -std::exp(ec) * base;
    const double delta = w - spec.omega_hat;
    const double log_damped = ec.real() + std::log(std::abs(base)) - spec.c / (delta * delta + eps);
    p.damped[j] = saturated ? 0.0 : std::exp(log_damped);
  });
  p.saturated.assign(sat.begin(), sat.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (sat[j])
      ++p.saturated_points;
    else
      p.sup_damped = std::max(p.sup_damped, p.damped[j]);
  }
  return p;
}

auto synthesize_predictor_kernel(const PredictorSpec &spec, double omega_max, std::size_t n)
    -> PredictorKernel {
  PredictorKernel out;
  out.kernel = synthesize_kernel(predictor_transfer_function(spec), omega_max, n);
  out.leakage = out.kernel.leakage;
  double total = 0.0, anti = 0.0;
  const double cutoff = -out.kernel.dt;
  for (std::size_t j = 0; j < out.kernel.size(); ++j) {
    const double m = std::abs(out.kernel.values[j]);
    total += m;
    if (out.kernel.time(j) < cutoff)
      anti += m;
  }
  out.anticausal_mass_fraction = total > 0.0 ? anti / total : 0.0;
  return out;
}

auto to_string(PredictRoute r) -> std::string {
  switch (r) {
  case PredictRoute::automatic:
    return "auto";
  case PredictRoute::time_domain:
    return "time_domain";
  case PredictRoute::spectral:
    return "spectral";
  }
  return "auto";
}

auto predict_route_from_string(const std::string &s) -> PredictRoute {
  if (s == "auto")
    return PredictRoute::automatic;
  if (s == "time_domain" || s == "time")
    return PredictRoute::time_domain;
  if (s == "spectral")
    return PredictRoute::spectral;
  throw ConfigError("unknown predict route '" + s + "' (expected auto, time_domain or spectral)");
}

auto peak_transfer_magnitude(const PredictorSpec &spec) -> double {
  spec.validate();
  const double half = 20.0 + std::abs(spec.omega_hat);
  constexpr std::size_t n = 40001;
  double log_peak = -std::numeric_limits<double>::infinity();
  auto visit = [&](double w) {
    const double re = predictor_re_exponent(spec, w);
    const double mag_base = std::abs(anticausal_base_transfer(spec.a, w));
    // |1 - e^E| <= 1 + e^{Re E}
    const double log_num = re > 0.0 ? re + std::log1p(std::exp(-re)) : std::log1p(std::exp(re));
    log_peak = std::max(log_peak, log_num + std::log(mag_base));
  };
  for (std::size_t j = 0; j < n; ++j)
    visit(spec.omega_hat - half + 2.0 * half * static_cast<double>(j) / (n - 1));
  visit(spec.omega_hat);
  visit(0.0);
  return std::exp(std::min(log_peak, kSaturationExponent));
}

auto anticausal_target(const SymbolicSignal &x, double a, double alpha, double t) -> cplx {
  cplx acc = 0.0;
  for (const auto &term : x.terms()) {
    if (term.coeff == cplx{})
      continue;
    const cplx beta(a, -term.freq);
    // int_0^inf e^{-beta u} (t + u)^k du = sum_j k!/(k-j)! t^{k-j} / beta^{j+1}
    cplx sum = 0.0;
    double falling = 1.0;
    cplx bpow = beta;
    for (int j = 0; j <= term.power; ++j) {
      sum += falling * std::pow(t, term.power - j) / bpow;
      falling *= static_cast<double>(term.power - j);
      bpow *= beta;
    }
    acc += term.coeff * std::polar(1.0, term.freq * t) * sum;
  }
  return weight_eval(Weight::polynomial(alpha), t) * acc;
}

auto predict(const PredictorSpec &spec, const SymbolicSignal &x, double lo, double hi,
             std::size_t n, double alpha, const PredictOptions &opts) -> PredictResult {
  spec.validate();
  if (!(alpha >= 0.0 && alpha < 0.5))
    throw ConfigError("prediction requires alpha in [0, 1/2), got " + std::to_string(alpha));
  if (static_cast<double>(x.max_power()) > alpha)
    throw ConfigError("signal grows like t^" + std::to_string(x.max_power()) +
                      ", faster than the weight exponent alpha = " + std::to_string(alpha));
  const auto cert = degeneracy_certificate(x, spec.omega_hat);
  if (!cert.member)
    throw ConfigError("signal is not in the degeneracy class for omega_hat = " +
                      std::to_string(spec.omega_hat) +
                      ": certificate margin = " + std::to_string(cert.margin));

  const auto grid = window_grid(lo, hi, n);
  const auto w = Weight::polynomial(alpha);
  PredictResult res;
  res.y_true = sample([&](double t) { return anticausal_target(x, spec.a, alpha, t); }, grid);
  res.peak_transfer = peak_transfer_magnitude(spec);

  res.route = opts.route;
  if (res.route == PredictRoute::automatic)
    res.route = res.peak_transfer < opts.peak_limit ? PredictRoute::time_domain
                                                    : PredictRoute::spectral;

  if (res.route == PredictRoute::time_domain) {
    std::size_t kn = opts.kernel_n;
    PredictorKernel pk;
    for (;;) {
      pk = synthesize_predictor_kernel(spec, opts.omega_max, kn);
      const auto &v = pk.kernel.values;
      const std::size_t edge = kn / 10;
      double edge_max = 0.0;
      for (std::size_t j = 0; j < edge; ++j)
        edge_max = std::max({edge_max, std::abs(v[j]), std::abs(v[kn - 1 - j])});
      if (edge_max <= opts.edge_tolerance || kn >= opts.kernel_n_max)
        break;
      kn *= 2;
    }
    res.kernel_n = kn;
    res.anticausal_mass_fraction = pk.anticausal_mass_fraction;
    ConvolveOptions copts;
    copts.causal_only = true;
    const ConvolvedSignal conv(pk.kernel, x, copts);
    res.y_hat = sample([&](double t) { return weight_eval(w, t) * conv(t); }, grid);
  } else {
    if (x.max_power() > 0)
      throw ConfigError("the spectral prediction route supports pure exponentials only");
    std::vector<std::pair<cplx, double>> modes;
    for (const auto &term : x.terms())
      if (term.coeff != cplx{})
        modes.emplace_back(term.coeff * predictor_transfer(spec, term.freq).value, term.freq);
    res.y_hat = sample(
        [&](double t) {
          cplx acc = 0.0;
          for (const auto &[amp, nu] : modes)
            acc += amp * std::polar(1.0, nu * t);
          return weight_eval(w, t) * acc;
        },
        grid);
  }
  for (std::size_t j = 0; j < n; ++j)
    res.sup_err = std::max(res.sup_err, std::abs(res.y_true.values[j] - res.y_hat.values[j]));
  return res;
}

auto vgamma_study(const PredictorSpec &base, const std::vector<double> &gammas, double lo,
                  double hi, std::size_t n, double alpha) -> std::vector<VGammaEntry> {
  base.validate();
  if (gammas.empty())
    throw ConfigError("vgamma-study needs at least one gamma");
  if (!(lo < hi) || n < 2)
    throw ConfigError("vgamma-study grid needs lo < hi and n >= 2");
  for (double g : gammas)
    if (!(g > 0.0))
      throw ConfigError("gamma values must be positive");
  const auto weight = Weight::polynomial(alpha);
  require_admissible(weight);

  const auto grid = window_grid(lo, hi, n);
  std::vector<double> omega(n);
  for (std::size_t j = 0; j < n; ++j)
    omega[j] = grid.at(j);
  const double omega_max = std::max(std::abs(lo), std::abs(hi));
  std::size_t kn = 16;
  while (kn < n)
    kn <<= 1;

  const Convention conventions[] = {Convention::as_printed, Convention::proof_variant};
  std::vector<VGammaEntry> out(2 * gammas.size());
  for (std::size_t ci = 0; ci < 2; ++ci) {
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      auto spec = base;
      spec.convention = conventions[ci];
      spec.gamma = gammas[gi];
      const auto prof = v_gamma_profile(spec, omega);

      const double eps = spec.epsilon();
      auto damped = [spec, eps](double w) -> cplx {
        bool saturated = false;
        const cplx e = clamp_exponent(predictor_exponent(spec, cplx(0.0, w)), saturated);
        if (saturated)
          return 0.0;
        const double delta = w - spec.omega_hat;
        return -std::exp(e - spec.c / (delta * delta + eps)) *
               anticausal_base_transfer(spec.a, w);
      };
      const TransferFunction tf(TransferKind::tabulated, damped, nlohmann::json(spec));
      const auto k = synthesize_kernel(tf, omega_max, kn);
      const auto norm = rho_l1_norm(k, weight);

      auto &e = out[ci * gammas.size() + gi];
      e.convention = spec.convention;
      e.gamma = spec.gamma;
      e.sup_damped = prof.sup_damped;
      e.saturated_points = prof.saturated_points;
      e.grid_points = n;
      e.rho_l1_of_damped = norm.norm;
      e.rho_l1_diverging = norm.diverging;
      e.leakage = k.leakage;
    }
  }
  return out;
}

void to_json(nlohmann::json &j, const PredictorSpec &s) {
  j = nlohmann::json{{"a", s.a},         {"omega_hat", s.omega_hat},
                     {"gamma", s.gamma}, {"r", s.r_exp},
                     {"c", s.c},         {"convention", to_string(s.convention)}};
}

void from_json(const nlohmann::json &j, PredictorSpec &s) {
  s.a = j.value("a", 1.0);
  s.omega_hat = j.value("omega_hat", 0.0);
  s.gamma = j.value("gamma", 8.0);
  s.r_exp = j.value("r", 0.5);
  s.c = j.value("c", 1.0);
  s.convention = convention_from_string(j.value("convention", std::string("as_printed")));
}

void to_json(nlohmann::json &j, const VGammaEntry &e) {
  j = nlohmann::json{{"convention", to_string(e.convention)},
                     {"gamma", e.gamma},
                     {"sup_damped", e.sup_damped},
                     {"saturated_points", e.saturated_points},
                     {"grid_points", e.grid_points},
                     {"rho_l1_of_damped", e.rho_l1_of_damped},
                     {"rho_l1_diverging", e.rho_l1_diverging},
                     {"leakage", e.leakage}};
}

} // namespace udsp
