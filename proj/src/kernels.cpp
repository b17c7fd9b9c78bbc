#include "udsp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "udsp/errors.hpp"
#include "udsp/parallel.hpp"

namespace udsp {

namespace {

using std::numbers::pi;

// FFTW planning is not thread-safe; execution is.
std::mutex &fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place unnormalized inverse DFT: out_j = sum_k in_k e^{+2 pi i jk/n}.
void inverse_dft(std::vector<cplx> &data) {
  const int n = static_cast<int>(data.size());
  auto *buf = reinterpret_cast<fftw_complex *>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

auto binomial(int n, int k) -> double {
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

} // namespace

auto to_string(TransferKind k) -> std::string {
  switch (k) {
  case TransferKind::lowpass:
    return "lowpass";
  case TransferKind::highpass:
    return "highpass";
  case TransferKind::predictor:
    return "predictor";
  case TransferKind::compensator:
    return "compensator";
  case TransferKind::anticausal_base:
    return "anticausal_base";
  case TransferKind::tabulated:
    return "tabulated";
  case TransferKind::bump:
    return "bump";
  case TransferKind::product:
    return "product";
  }
  return "tabulated";
}

auto ExpTail::transfer(double omega) const -> cplx {
  return causal ? coeff / cplx(rate, omega) : coeff / cplx(rate, -omega);
}

auto ExpTail::kernel(double t) const -> cplx {
  if (t == 0.0)
    return 0.5 * coeff;
  if (causal)
    return t > 0.0 ? coeff * std::exp(-rate * t) : cplx{};
  return t < 0.0 ? coeff * std::exp(rate * t) : cplx{};
}

TransferFunction::TransferFunction(TransferKind kind, Eval eval, nlohmann::json params,
                                   cplx constant, std::optional<ExpTail> tail)
    : kind_(kind), eval_(std::move(eval)), params_(std::move(params)), constant_(constant),
      tail_(tail) {}

auto TransferFunction::tabulated(std::vector<double> omega, std::vector<cplx> values)
    -> TransferFunction {
  if (omega.size() != values.size() || omega.size() < 2)
    throw ConfigError("tabulated transfer function needs matching grids of >= 2 points");
  if (!std::is_sorted(omega.begin(), omega.end()))
    throw ConfigError("tabulated transfer function grid must be sorted");
  auto eval = [omega = std::move(omega), values = std::move(values)](double w) -> cplx {
    if (w < omega.front() || w > omega.back())
      return 0.0;
    auto it = std::upper_bound(omega.begin(), omega.end(), w);
    if (it == omega.end())
      return values.back();
    const auto j = static_cast<std::size_t>(it - omega.begin());
    const double w0 = omega[j - 1], w1 = omega[j];
    const double f = (w - w0) / (w1 - w0);
    return values[j - 1] * (1.0 - f) + values[j] * f;
  };
  return TransferFunction(TransferKind::tabulated, std::move(eval));
}

auto TransferFunction::anticausal_base(double a) -> TransferFunction {
  if (!(a > 0.0))
    throw ConfigError("anticausal base rate a must be positive");
  return TransferFunction(
      TransferKind::anticausal_base, [a](double w) { return 1.0 / cplx(a, -w); },
      {{"a", a}}, 0.0, ExpTail{1.0, a, false});
}

auto TransferFunction::zero() -> TransferFunction {
  return TransferFunction(TransferKind::tabulated, [](double) { return cplx{}; });
}

auto TransferFunction::product(const TransferFunction &f, const TransferFunction &g)
    -> TransferFunction {
  return TransferFunction(
      TransferKind::product, [f, g](double w) { return f(w) * g(w); },
      {{"factors", nlohmann::json::array({f.params(), g.params()})}},
      f.constant_part() * g.constant_part());
}

auto is_power_of_two(std::size_t n) -> bool { return n != 0 && (n & (n - 1)) == 0; }

auto synthesize_kernel(const TransferFunction &h, double omega_max, std::size_t n) -> Kernel {
  if (!(omega_max > 0.0) || !std::isfinite(omega_max))
    throw ConfigError("omega_max must be positive");
  if (n < 16 || !is_power_of_two(n))
    throw ConfigError("kernel size must be a power of two >= 16, got " + std::to_string(n));

  const double dw = 2.0 * omega_max / static_cast<double>(n);
  const double dt = pi / omega_max;
  const auto &tail = h.tail();

  auto residual = [&](double w) {
    cplx v = h.b_part(w);
    if (tail)
      v -= tail->transfer(w);
    return v;
  };

  std::vector<cplx> buf(n);
  parallel_for(n, [&](std::size_t k) {
    const double w = -omega_max + static_cast<double>(k) * dw;
    cplx v = k == 0 ? 0.5 * (residual(-omega_max) + residual(omega_max)) : residual(w);
    buf[k] = (k % 2 == 0) ? v : -v;
  });

  Kernel out;
  out.dt = dt;
  out.t0 = -static_cast<double>(n / 2) * dt;
  out.delta = h.constant_part();
  out.omega_max = omega_max;

  const double edge = std::max(std::abs(residual(-omega_max)), std::abs(residual(omega_max)));
  if (edge > kLeakageThreshold) {
    out.leakage = true;
    out.warnings.push_back("spectral leakage: |H(+-omega_max)| = " + std::to_string(edge) +
                           " exceeds " + std::to_string(kLeakageThreshold));
  }

  inverse_dft(buf);
  const double scale = dw / (2.0 * pi);
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx v = buf[j] * scale;
    if (j % 2 == 1)
      v = -v;
    if (tail)
      v += tail->kernel(out.time(j));
    out.values[j] = v;
  }
  return out;
}

auto trapezoid_kernel_closed_form(double p, double q, double t) -> cplx {
  if (!(0.0 < p && p < q))
    throw ConfigError("trapezoid kernel needs 0 < p < q");
  if (std::abs(t) < 1e-4 / q) {
    // Taylor: (1/(pi(q-p))) * [(q^2-p^2)/2 - (q^4-p^4) t^2/24]
    const double t2 = t * t;
    return ((q * q - p * p) / 2.0 - (std::pow(q, 4) - std::pow(p, 4)) * t2 / 24.0) /
           (pi * (q - p));
  }
  // cos(pt) - cos(qt) = 2 sin((q+p)t/2) sin((q-p)t/2), cancellation-free form.
  const double num = 2.0 * std::sin(0.5 * (q + p) * t) * std::sin(0.5 * (q - p) * t);
  return num / (pi * (q - p) * t * t);
}

auto closed_form_kernel(const std::function<cplx(double)> &h, double dt, std::size_t n,
                        std::string tag) -> Kernel {
  if (!(dt > 0.0) || n < 2)
    throw ConfigError("closed-form kernel grid needs dt > 0 and n >= 2");
  Kernel out;
  out.dt = dt;
  out.t0 = -static_cast<double>(n / 2) * dt;
  out.omega_max = pi / dt;
  out.closed_form = std::move(tag);
  out.values.resize(n);
  parallel_for(n, [&](std::size_t j) { out.values[j] = h(out.time(j)); });
  return out;
}

auto rectangle_kernel(double p, double dt, std::size_t n) -> Kernel {
  if (!(p > 0.0))
    throw ConfigError("rectangle kernel needs p > 0");
  return closed_form_kernel(
      [p](double t) -> cplx {
        if (t == 0.0)
          return p / pi;
        return std::sin(p * t) / (pi * t);
      },
      dt, n, "rectangle");
}

auto rho_l1_norm(const Kernel &h, const Weight &w) -> NormEstimate {
  require_admissible(w);
  NormEstimate est;
  const std::size_t n = h.size();
  if (n == 0)
    return est;

  const double half_span = static_cast<double>(n / 2) * h.dt;
  const double r_min = std::max(1.0, 8.0 * h.dt);
  int shells = 0;
  while (r_min * std::pow(2.0, shells + 1) <= half_span)
    ++shells;
  const double r0 = half_span / std::pow(2.0, shells);

  for (int j = 0; j <= shells; ++j)
    est.radii.push_back(r0 * std::pow(2.0, j));
  std::vector<double> bins(est.radii.size(), 0.0);

  double total = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double t = h.time(m);
    const double v = weight_inverse(w, t) * std::abs(h.values[m]) * h.dt;
    total += v;
    const double at = std::abs(t);
    for (std::size_t j = 0; j < est.radii.size(); ++j) {
      if (at < est.radii[j]) {
        bins[j] += v;
        break;
      }
    }
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < bins.size(); ++j) {
    acc += bins[j];
    est.partial_sums.push_back(acc);
    if (j > 0)
      est.increments.push_back(bins[j]);
  }

  // Fit a geometric ratio to the last (up to three) shell increments.
  const auto &inc = est.increments;
  double log_ratio = 0.0;
  int used = 0;
  for (std::size_t j = inc.size(); j >= 2 && used < 3; --j) {
    const double a = inc[j - 2], b = inc[j - 1];
    if (a > 0.0 && b > 0.0) {
      log_ratio += std::log(b / a);
      ++used;
    }
  }
  est.shell_ratio = used > 0 ? std::exp(log_ratio / used) : 0.0;

  const double last = inc.empty() ? 0.0 : inc.back();
  const bool not_small = total > 0.0 && last > kCauchyThreshold * total;
  est.diverging = not_small && est.shell_ratio > 0.9;
  if (!est.diverging && est.shell_ratio > 0.0 && est.shell_ratio < 1.0)
    est.tail = last * est.shell_ratio / (1.0 - est.shell_ratio);
  est.norm = est.diverging ? total : total + est.tail;
  return est;
}

ConvolvedSignal::ConvolvedSignal(const Kernel &h, SymbolicSignal x, const ConvolveOptions &opts)
    : x_(std::move(x)), delta_(h.delta) {
  // A cached rho_l1 on the kernel is only ever stored when finite.
  if (opts.weight && !h.rho_l1) {
    const auto norm = rho_l1_norm(h, *opts.weight);
    if (norm.diverging)
      throw DivergenceError("kernel weighted-L1 norm diverges for alpha = " +
                            std::to_string(opts.weight->alpha) +
                            "; the convolution integral may diverge for growing signals");
  }
  const std::size_t first = opts.causal_only ? h.zero_index() : 0;
  moments_.resize(x_.terms().size());
  parallel_for(x_.terms().size(), [&](std::size_t i) {
    const auto &term = x_.terms()[i];
    std::vector<cplx> mom(static_cast<std::size_t>(term.power) + 1, 0.0);
    if (term.coeff != cplx{}) {
      for (std::size_t m = first; m < h.size(); ++m) {
        const double u = h.time(m);
        cplx v = h.values[m] * std::polar(h.dt, -term.freq * u);
        for (auto &mj : mom) {
          mj += v;
          v *= u;
        }
      }
    }
    moments_[i] = std::move(mom);
  });
}

auto ConvolvedSignal::operator()(double t) const -> cplx {
  cplx y = delta_ == cplx{} ? cplx{} : delta_ * x_(t);
  const auto &terms = x_.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto &term = terms[i];
    if (term.coeff == cplx{})
      continue;
    const int k = term.power;
    cplx acc = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      acc += binomial(k, j) * std::pow(t, k - j) * sign * moments_[i][static_cast<std::size_t>(j)];
    }
    y += term.coeff * std::polar(1.0, term.freq * t) * acc;
  }
  return y;
}

auto ConvolvedSignal::as_view() const -> SignalView {
  SignalView v = view(x_);
  v.eval = [self = *this](double t) { return self(t); };
  return v;
}

auto convolve(const Kernel &h, const SymbolicSignal &x, double lo, double hi, std::size_t n,
              const ConvolveOptions &opts) -> SampledSignal {
  const ConvolvedSignal y(h, x, opts);
  return sample([&](double t) { return y(t); }, window_grid(lo, hi, n));
}

auto convolve_direct(const Kernel &h, const SignalView &x, double lo, double hi, std::size_t n,
                     const ConvolveOptions &opts) -> SampledSignal {
  if (opts.weight && rho_l1_norm(h, *opts.weight).diverging)
    throw DivergenceError("kernel weighted-L1 norm diverges; refusing to convolve");
  const std::size_t first = opts.causal_only ? h.zero_index() : 0;
  return sample(
      [&](double t) {
        cplx acc = h.delta == cplx{} ? cplx{} : h.delta * x.eval(t);
        for (std::size_t m = first; m < h.size(); ++m)
          acc += h.values[m] * x.eval(t - h.time(m)) * h.dt;
        return acc;
      },
      window_grid(lo, hi, n));
}

auto convolve(const Kernel &h, const SampledSignal &x, double lo, double hi, std::size_t n,
              const ConvolveOptions &opts) -> SampledSignal {
  return convolve_direct(h, view(x), lo, hi, n, opts);
}

} // namespace udsp
