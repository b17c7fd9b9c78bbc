#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "udsp/weights.hpp"

namespace udsp {

using cplx = std::complex<double>;

inline constexpr int kDefaultMaxPower = 8;

// c * t^power * e^{i freq t}
struct SignalTerm {
  cplx coeff{1.0, 0.0};
  int power = 0;
  double freq = 0.0;
};

// Finite sum of polynomial-modulated exponentials. Integrals against these
// are computed in closed form wherever possible.
class SymbolicSignal {
public:
  SymbolicSignal() = default;
  explicit SymbolicSignal(std::vector<SignalTerm> terms, int max_power = kDefaultMaxPower);

  [[nodiscard]] static auto exponential(double freq, cplx coeff = 1.0) -> SymbolicSignal;
  [[nodiscard]] static auto monomial(int power, cplx coeff = 1.0) -> SymbolicSignal;

  [[nodiscard]] auto terms() const -> const std::vector<SignalTerm> & { return terms_; }
  [[nodiscard]] auto operator()(double t) const -> cplx;
  [[nodiscard]] auto max_power() const -> int;
  [[nodiscard]] auto max_abs_freq() const -> double;
  [[nodiscard]] auto is_zero() const -> bool;

  [[nodiscard]] auto scaled(cplx s) const -> SymbolicSignal;
  [[nodiscard]] auto conj() const -> SymbolicSignal;
  [[nodiscard]] auto operator+(const SymbolicSignal &other) const -> SymbolicSignal;

private:
  std::vector<SignalTerm> terms_;
};

[[nodiscard]] auto eval_signal(const SymbolicSignal &x, double t) -> cplx;

// Uniform time grid t_j = t0 + j*dt, j < n.
struct UniformGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n = 0;

  [[nodiscard]] auto at(std::size_t j) const -> double { return t0 + static_cast<double>(j) * dt; }
};

// Half-open window [lo, hi): dt = (hi - lo)/n, last sample at hi - dt.
[[nodiscard]] auto window_grid(double lo, double hi, std::size_t n) -> UniformGrid;

struct SampledSignal {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<cplx> values;

  SampledSignal() = default;
  SampledSignal(double t0, double dt, std::vector<cplx> values);

  [[nodiscard]] auto grid() const -> UniformGrid { return {t0, dt, values.size()}; }
  [[nodiscard]] auto time(std::size_t j) const -> double { return t0 + static_cast<double>(j) * dt; }
  // Linear interpolation between samples, zero outside [t0, t0+(n-1)dt].
  [[nodiscard]] auto interpolate(double t) const -> cplx;
};

[[nodiscard]] auto sample(const std::function<cplx(double)> &f, const UniformGrid &g) -> SampledSignal;

// Type-erased view used by the pairing and norm routines: anything that can
// be evaluated pointwise, plus the growth order and frequency content needed
// to pick quadrature grids. An empty freqs list means "unknown".
struct SignalView {
  std::function<cplx(double)> eval;
  int max_power = 0;
  std::vector<double> freqs;

  [[nodiscard]] auto max_abs_freq() const -> double;
};

[[nodiscard]] auto view(const SymbolicSignal &x) -> SignalView;
[[nodiscard]] auto view(const SampledSignal &x) -> SignalView;

struct SupNormEstimate {
  double estimate = 0.0;
  bool diverging = false;
};

// max over the grid of rho(t)|x(t)|. diverging flags an envelope that still
// grows polynomially across the outer 10% of the window.
[[nodiscard]] auto weighted_sup_norm(const SignalView &x, const Weight &w, double lo, double hi,
                                     std::size_t n) -> SupNormEstimate;
[[nodiscard]] auto weighted_sup_norm(const SymbolicSignal &x, const Weight &w, double lo,
                                     double hi, std::size_t n) -> SupNormEstimate;
[[nodiscard]] auto weighted_sup_norm(const SampledSignal &x, const Weight &w, double lo,
                                     double hi, std::size_t n) -> SupNormEstimate;

struct DegeneracyCertificate {
  bool member = true;
  double margin = std::numeric_limits<double>::infinity();
};

// Sufficient criterion for membership in X_{omega_hat}: no frequency of the
// signal (with nonzero coefficient) sits at omega_hat.
[[nodiscard]] auto degeneracy_certificate(const SymbolicSignal &x, double omega_hat)
    -> DegeneracyCertificate;

// True when x is in rho^-1 L_inf for the polynomial weight of exponent alpha.
[[nodiscard]] auto in_weighted_space(const SymbolicSignal &x, double alpha) -> bool;

void to_json(nlohmann::json &j, const SymbolicSignal &x);
void from_json(const nlohmann::json &j, SymbolicSignal &x);

} // namespace udsp
