#include "udsp/filters.hpp"

#include <algorithm>
#include <cmath>

#include "udsp/errors.hpp"

namespace udsp {

auto to_string(FilterKind k) -> std::string {
  return k == FilterKind::lowpass ? "lowpass" : "highpass";
}

auto filter_kind_from_string(const std::string &s) -> FilterKind {
  if (s == "lowpass" || s == "lp")
    return FilterKind::lowpass;
  if (s == "highpass" || s == "hp")
    return FilterKind::highpass;
  throw ConfigError("unknown filter kind '" + s + "' (expected lp or hp)");
}

void FilterSpec::validate() const {
  if (!(0.0 < p && p < q) || !std::isfinite(q))
    throw ConfigError("filter edges must satisfy 0 < p < q");
  if (d != 1 && d != 2)
    throw ConfigError("transition smoothness d must be 1 or 2");
  if (!(alpha >= 0.0))
    throw ConfigError("weight exponent alpha must be nonnegative");
  if (!(static_cast<double>(d) > alpha + 0.5))
    throw ConfigError("d = " + std::to_string(d) + " is not admissible for alpha = " +
                      std::to_string(alpha) + " (need d > alpha + 1/2)");
}

auto select_smoothness(double alpha) -> Smoothness {
  if (!(alpha >= 0.0))
    throw ConfigError("alpha must be nonnegative");
  if (alpha >= 1.5)
    throw ConfigError("alpha >= 3/2 needs transition profiles with d > 2, which are not provided");
  const int d = alpha < 0.5 ? 1 : 2;
  const double lo = std::max(1.0, 1.0 / (static_cast<double>(d) - alpha));
  return {d, 0.5 * (lo + 2.0)};
}

auto mu_profile(double p, double q, int d, double omega) -> double {
  const double s = (omega - p) / (q - p);
  if (d == 1)
    return 1.0 - s;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

auto lowpass_profile(double p, double q, int d, double omega) -> double {
  const double a = std::abs(omega);
  if (a <= p)
    return 1.0;
  if (a <= q)
    return mu_profile(p, q, d, a);
  return 0.0;
}

auto mu_eval(const FilterSpec &spec, double omega) -> double {
  spec.validate();
  if (omega < spec.p || omega > spec.q)
    throw ConfigError("mu is defined on [p, q] only");
  return mu_profile(spec.p, spec.q, spec.d, omega);
}

auto filter_transfer(const FilterSpec &spec, double omega) -> double {
  const double lp = lowpass_profile(spec.p, spec.q, spec.d, omega);
  return spec.kind == FilterKind::lowpass ? lp : 1.0 - lp;
}

auto make_transfer(const FilterSpec &spec) -> TransferFunction {
  spec.validate();
  nlohmann::json params = spec;
  const double p = spec.p, q = spec.q;
  const int d = spec.d;
  if (spec.kind == FilterKind::lowpass)
    return TransferFunction(
        TransferKind::lowpass, [p, q, d](double w) { return cplx(lowpass_profile(p, q, d, w)); },
        params);
  return TransferFunction(
      TransferKind::highpass,
      [p, q, d](double w) { return cplx(1.0 - lowpass_profile(p, q, d, w)); }, params, 1.0);
}

auto default_omega_max(const FilterSpec &spec) -> double { return 8.0 * spec.q; }

auto design_filter(const FilterSpec &spec, const FilterOptions &opts) -> Kernel {
  const auto h = make_transfer(spec);
  const double w = opts.omega_max > 0.0 ? opts.omega_max : default_omega_max(spec);
  auto k = synthesize_kernel(h, w, opts.kernel_n);
  k.closed_form = spec.d == 1 && spec.kind == FilterKind::lowpass ? std::optional<std::string>("trapezoid")
                                                                  : std::nullopt;
  return k;
}

auto claimed_gap(const FilterSpec &spec) -> SpectralGap {
  if (spec.kind == FilterKind::lowpass)
    return {SpectralGap::Kind::exterior, spec.q};
  return {SpectralGap::Kind::interior, spec.p};
}

auto apply_filter(const FilterSpec &spec, const SymbolicSignal &x, double lo, double hi,
                  std::size_t n, const FilterOptions &opts) -> FilterResult {
  spec.validate();
  if (!in_weighted_space(x, spec.alpha))
    throw ConfigError("signal grows like t^" + std::to_string(x.max_power()) +
                      ", outside rho^-1 L_inf for alpha = " + std::to_string(spec.alpha));

  auto kernel = design_filter(spec, opts);
  const auto weight = Weight::polynomial(spec.alpha);
  auto norm = rho_l1_norm(kernel, weight);
  if (norm.diverging)
    throw DivergenceError("filter kernel weighted-L1 norm diverges for alpha = " +
                          std::to_string(spec.alpha));
  kernel.rho_l1 = norm.norm;

  ConvolvedSignal out(kernel, x);
  auto y = sample([&](double t) { return out(t); }, window_grid(lo, hi, n));

  std::optional<GapReport> report;
  if (opts.run_gap_test) {
    const auto gap = claimed_gap(spec);
    auto gopts = opts.gap;
    if (!gopts.alpha)
      gopts.alpha = spec.alpha;
    report = gap_test(out.as_view(), gap, default_probe_bank(gap), gopts);
  }
  return {std::move(y), std::move(out), norm, std::move(report)};
}

void to_json(nlohmann::json &j, const FilterSpec &s) {
  j = nlohmann::json{{"p", s.p}, {"q", s.q}, {"d", s.d}, {"kind", to_string(s.kind)}, {"alpha", s.alpha}};
}

void from_json(const nlohmann::json &j, FilterSpec &s) {
  s.p = j.at("p").get<double>();
  s.q = j.at("q").get<double>();
  s.d = j.value("d", 2);
  s.kind = filter_kind_from_string(j.value("kind", std::string("lowpass")));
  s.alpha = j.value("alpha", 0.0);
}

} // namespace udsp
