#include "udsp/signals.hpp"

#include <algorithm>
#include <cmath>

#include "udsp/errors.hpp"
#include "udsp/parallel.hpp"

namespace udsp {

SymbolicSignal::SymbolicSignal(std::vector<SignalTerm> terms, int max_power)
    : terms_(std::move(terms)) {
  if (terms_.empty())
    throw ConfigError("symbolic signal needs at least one term");
  for (const auto &term : terms_) {
    if (term.power < 0 || term.power > max_power)
      throw ConfigError("term power " + std::to_string(term.power) + " outside [0, " +
                        std::to_string(max_power) + "]");
    if (!std::isfinite(term.freq) || !std::isfinite(term.coeff.real()) ||
        !std::isfinite(term.coeff.imag()))
      throw ConfigError("symbolic signal term has non-finite parameters");
  }
}

auto SymbolicSignal::exponential(double freq, cplx coeff) -> SymbolicSignal {
  return SymbolicSignal({SignalTerm{coeff, 0, freq}});
}

auto SymbolicSignal::monomial(int power, cplx coeff) -> SymbolicSignal {
  return SymbolicSignal({SignalTerm{coeff, power, 0.0}});
}

auto SymbolicSignal::operator()(double t) const -> cplx {
  cplx acc = 0.0;
  for (const auto &term : terms_) {
    if (term.coeff == cplx{})
      continue;
    acc += term.coeff * std::pow(t, term.power) * std::polar(1.0, term.freq * t);
  }
  return acc;
}

auto SymbolicSignal::max_power() const -> int {
  int k = 0;
  for (const auto &term : terms_)
    if (term.coeff != cplx{})
      k = std::max(k, term.power);
  return k;
}

auto SymbolicSignal::max_abs_freq() const -> double {
  double f = 0.0;
  for (const auto &term : terms_)
    if (term.coeff != cplx{})
      f = std::max(f, std::abs(term.freq));
  return f;
}

auto SymbolicSignal::is_zero() const -> bool {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const SignalTerm &term) { return term.coeff == cplx{}; });
}

auto SymbolicSignal::scaled(cplx s) const -> SymbolicSignal {
  auto terms = terms_;
  for (auto &term : terms)
    term.coeff *= s;
  return SymbolicSignal(std::move(terms));
}

auto SymbolicSignal::conj() const -> SymbolicSignal {
  auto terms = terms_;
  for (auto &term : terms) {
    term.coeff = std::conj(term.coeff);
    term.freq = -term.freq;
  }
  return SymbolicSignal(std::move(terms));
}

auto SymbolicSignal::operator+(const SymbolicSignal &other) const -> SymbolicSignal {
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return SymbolicSignal(std::move(terms));
}

auto eval_signal(const SymbolicSignal &x, double t) -> cplx { return x(t); }

auto window_grid(double lo, double hi, std::size_t n) -> UniformGrid {
  if (!(lo < hi))
    throw ConfigError("window must satisfy lo < hi");
  if (n < 2)
    throw ConfigError("window grid needs at least 2 points");
  return {lo, (hi - lo) / static_cast<double>(n), n};
}

SampledSignal::SampledSignal(double t0_, double dt_, std::vector<cplx> values_)
    : t0(t0_), dt(dt_), values(std::move(values_)) {
  if (!(dt > 0.0))
    throw ConfigError("sampled signal needs dt > 0");
}

auto SampledSignal::interpolate(double t) const -> cplx {
  if (values.empty())
    return 0.0;
  const double u = (t - t0) / dt;
  if (u < 0.0 || u > static_cast<double>(values.size() - 1))
    return 0.0;
  const auto j = static_cast<std::size_t>(std::floor(u));
  if (j + 1 >= values.size())
    return values.back();
  const double frac = u - static_cast<double>(j);
  return values[j] * (1.0 - frac) + values[j + 1] * frac;
}

auto sample(const std::function<cplx(double)> &f, const UniformGrid &g) -> SampledSignal {
  std::vector<cplx> v(g.n);
  parallel_for(g.n, [&](std::size_t j) { v[j] = f(g.at(j)); });
  return SampledSignal(g.t0, g.dt, std::move(v));
}

auto SignalView::max_abs_freq() const -> double {
  double f = 0.0;
  for (double nu : freqs)
    f = std::max(f, std::abs(nu));
  return f;
}

auto view(const SymbolicSignal &x) -> SignalView {
  SignalView v;
  v.eval = [x](double t) { return x(t); };
  v.max_power = x.max_power();
  for (const auto &term : x.terms())
    if (term.coeff != cplx{})
      v.freqs.push_back(term.freq);
  return v;
}

auto view(const SampledSignal &x) -> SignalView {
  SignalView v;
  v.eval = [x](double t) { return x.interpolate(t); };
  // Unknown growth; the samples are bounded on their window.
  v.max_power = 0;
  return v;
}

auto weighted_sup_norm(const SignalView &x, const Weight &w, double lo, double hi, std::size_t n)
    -> SupNormEstimate {
  require_admissible(w);
  const auto g = window_grid(lo, hi, n);
  std::vector<double> vals(n);
  parallel_for(n, [&](std::size_t j) {
    const double t = g.at(j);
    vals[j] = weight_eval(w, t) * std::abs(x.eval(t));
  });

  const double len = hi - lo;
  const double edge = 0.05 * len;
  double outer = 0.0, inner = 0.0, t_outer = 0.0, t_inner = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = g.at(j);
    const bool is_outer = (t - lo) < edge || (hi - t) <= edge;
    if (is_outer) {
      outer = std::max(outer, vals[j]);
      t_outer = std::max(t_outer, std::abs(t));
    } else {
      inner = std::max(inner, vals[j]);
      t_inner = std::max(t_inner, std::abs(t));
    }
  }

  SupNormEstimate out;
  out.estimate = std::max(outer, inner);
  // Envelope growth measured as a log-log slope across the outer band. A
  // bounded envelope approaching its sup (e.g. |t|/(1+|t|)) has slope ~1/T;
  // polynomial growth t^s keeps slope ~s.
  if (inner > 0.0 && outer > inner * (1.0 + 1e-6)) {
    const double span = std::log((1.0 + t_outer) / (1.0 + t_inner));
    if (span > 0.0) {
      const double slope = std::log(outer / inner) / span;
      const double threshold = std::max(1e-2, 10.0 / (1.0 + t_outer));
      out.diverging = slope > threshold;
    } else {
      out.diverging = true;
    }
  }
  return out;
}

auto weighted_sup_norm(const SymbolicSignal &x, const Weight &w, double lo, double hi,
                       std::size_t n) -> SupNormEstimate {
  return weighted_sup_norm(view(x), w, lo, hi, n);
}

auto weighted_sup_norm(const SampledSignal &x, const Weight &w, double lo, double hi,
                       std::size_t n) -> SupNormEstimate {
  return weighted_sup_norm(view(x), w, lo, hi, n);
}

auto degeneracy_certificate(const SymbolicSignal &x, double omega_hat) -> DegeneracyCertificate {
  DegeneracyCertificate cert;
  for (const auto &term : x.terms()) {
    if (term.coeff == cplx{})
      continue;
    cert.margin = std::min(cert.margin, std::abs(term.freq - omega_hat));
  }
  cert.member = cert.margin > 0.0;
  return cert;
}

auto in_weighted_space(const SymbolicSignal &x, double alpha) -> bool {
  return static_cast<double>(x.max_power()) <= alpha;
}

void to_json(nlohmann::json &j, const SymbolicSignal &x) {
  j = nlohmann::json::object();
  auto &arr = j["terms"] = nlohmann::json::array();
  for (const auto &term : x.terms())
    arr.push_back({{"re", term.coeff.real()},
                   {"im", term.coeff.imag()},
                   {"power", term.power},
                   {"freq", term.freq}});
}

void from_json(const nlohmann::json &j, SymbolicSignal &x) {
  if (!j.contains("terms") || !j.at("terms").is_array())
    throw ConfigError("signal JSON needs a 'terms' array");
  std::vector<SignalTerm> terms;
  for (const auto &t : j.at("terms")) {
    SignalTerm term;
    term.coeff = {t.value("re", 0.0), t.value("im", 0.0)};
    term.power = t.value("power", 0);
    term.freq = t.value("freq", 0.0);
    terms.push_back(term);
  }
  x = SymbolicSignal(std::move(terms));
}

} // namespace udsp
