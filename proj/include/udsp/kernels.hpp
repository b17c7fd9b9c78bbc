#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "udsp/signals.hpp"
#include "udsp/weights.hpp"

namespace udsp {

enum class TransferKind {
  lowpass,
  highpass,
  predictor,
  compensator,
  anticausal_base,
  tabulated,
  bump,
  product
};

[[nodiscard]] auto to_string(TransferKind k) -> std::string;

// An exponential piece with a known transform, used to peel a slowly
// decaying 1/omega tail off a transfer function before synthesis.
//   causal:      coeff * e^{-rate t} 1_{t>=0}  <->  coeff / (rate + i omega)
//   anticausal:  coeff * e^{ rate t} 1_{t<=0}  <->  coeff / (rate - i omega)
struct ExpTail {
  cplx coeff{0.0, 0.0};
  double rate = 1.0;
  bool causal = true;

  [[nodiscard]] auto transfer(double omega) const -> cplx;
  // Midpoint value at t = 0, where the kernel jumps.
  [[nodiscard]] auto kernel(double t) const -> cplx;
};

// Frequency-domain multiplier in C + B(rho): value(omega) = constant + B-part.
// The constant part acts as an exact pass-through and is never discretized.
class TransferFunction {
public:
  using Eval = std::function<cplx(double)>;

  TransferFunction(TransferKind kind, Eval eval, nlohmann::json params = nlohmann::json::object(),
                   cplx constant = 0.0, std::optional<ExpTail> tail = std::nullopt);

  [[nodiscard]] auto kind() const -> TransferKind { return kind_; }
  [[nodiscard]] auto params() const -> const nlohmann::json & { return params_; }
  [[nodiscard]] auto constant_part() const -> cplx { return constant_; }
  [[nodiscard]] auto tail() const -> const std::optional<ExpTail> & { return tail_; }

  [[nodiscard]] auto operator()(double omega) const -> cplx { return eval_(omega); }
  // value minus the constant part
  [[nodiscard]] auto b_part(double omega) const -> cplx { return eval_(omega) - constant_; }

  // Pointwise linear interpolation on a sorted grid, zero outside.
  [[nodiscard]] static auto tabulated(std::vector<double> omega, std::vector<cplx> values)
      -> TransferFunction;
  [[nodiscard]] static auto anticausal_base(double a) -> TransferFunction;
  [[nodiscard]] static auto zero() -> TransferFunction;
  [[nodiscard]] static auto product(const TransferFunction &f, const TransferFunction &g)
      -> TransferFunction;

private:
  TransferKind kind_;
  Eval eval_;
  nlohmann::json params_;
  cplx constant_;
  std::optional<ExpTail> tail_;
};

// Time-domain impulse response h on a centered dyadic grid
// t_j = t0 + j*dt, t0 = -(n/2) dt. `delta` is the constant part of the
// transfer function (a weighted Dirac at 0), applied exactly by convolve().
struct Kernel {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<cplx> values;
  cplx delta{0.0, 0.0};
  std::optional<std::string> closed_form;
  std::optional<double> rho_l1;
  double omega_max = 0.0;
  bool leakage = false;
  std::vector<std::string> warnings;

  [[nodiscard]] auto size() const -> std::size_t { return values.size(); }
  [[nodiscard]] auto time(std::size_t j) const -> double { return t0 + static_cast<double>(j) * dt; }
  [[nodiscard]] auto zero_index() const -> std::size_t { return values.size() / 2; }
};

inline constexpr double kLeakageThreshold = 1e-8;

// h(t_j) = (1/2pi) int_{-W}^{W} H(omega) e^{i omega t_j} d omega by an n-point
// inverse FFT with trapezoid endpoint correction; dt = pi/W.
[[nodiscard]] auto synthesize_kernel(const TransferFunction &h, double omega_max, std::size_t n)
    -> Kernel;

// (cos pt - cos qt) / (pi (q-p) t^2), with limit (p+q)/(2pi) at t = 0.
[[nodiscard]] auto trapezoid_kernel_closed_form(double p, double q, double t) -> cplx;

// Kernel of the ideal rectangle 1_{[-p,p]}: sin(pt)/(pi t).
[[nodiscard]] auto rectangle_kernel(double p, double dt, std::size_t n) -> Kernel;

// Samples a closed-form kernel on the centered grid of n points.
[[nodiscard]] auto closed_form_kernel(const std::function<cplx(double)> &h, double dt,
                                      std::size_t n, std::string tag) -> Kernel;

struct NormEstimate {
  double norm = 0.0;
  bool diverging = false;
  // Extrapolated contribution beyond the grid (0 when diverging).
  double tail = 0.0;
  // Fitted ratio of successive dyadic shell contributions.
  double shell_ratio = 0.0;
  // Partial integrals over |t| < R_j for R_j = R_0 2^j, and shell increments.
  std::vector<double> radii;
  std::vector<double> partial_sums;
  std::vector<double> increments;
};

inline constexpr double kCauchyThreshold = 1e-4;

// int rho(t)^-1 |h(t)| dt by the trapezoid rule plus a geometric tail fitted
// to dyadic shells [R 2^j, R 2^{j+1}]. diverging when the shells neither
// shrink geometrically nor fall below the relative Cauchy threshold.
[[nodiscard]] auto rho_l1_norm(const Kernel &h, const Weight &w) -> NormEstimate;

struct ConvolveOptions {
  // Restrict the integral to s <= t (kernel support u >= 0).
  bool causal_only = false;
  // When set, the kernel's weighted-L1 norm is checked and diverging kernels
  // are refused.
  std::optional<Weight> weight;
};

// y(t) = delta x(t) + sum_m h(u_m) x(t - u_m) dt for symbolic x, evaluated
// through per-term moments sum_m h(u_m) u_m^j e^{-i nu u_m} dt so that each
// output point costs O(power) instead of O(n). The quadrature sum is the
// same composite trapezoid rule as direct summation.
class ConvolvedSignal {
public:
  ConvolvedSignal(const Kernel &h, SymbolicSignal x, const ConvolveOptions &opts = {});

  [[nodiscard]] auto operator()(double t) const -> cplx;
  [[nodiscard]] auto input() const -> const SymbolicSignal & { return x_; }
  [[nodiscard]] auto as_view() const -> SignalView;

private:
  SymbolicSignal x_;
  cplx delta_;
  // moments_[term][j]
  std::vector<std::vector<cplx>> moments_;
};

[[nodiscard]] auto convolve(const Kernel &h, const SymbolicSignal &x, double lo, double hi,
                            std::size_t n, const ConvolveOptions &opts = {}) -> SampledSignal;

// Direct O(n_kernel) summation per output point; x evaluated pointwise.
[[nodiscard]] auto convolve_direct(const Kernel &h, const SignalView &x, double lo, double hi,
                                   std::size_t n, const ConvolveOptions &opts = {})
    -> SampledSignal;

[[nodiscard]] auto convolve(const Kernel &h, const SampledSignal &x, double lo, double hi,
                            std::size_t n, const ConvolveOptions &opts = {}) -> SampledSignal;

[[nodiscard]] auto is_power_of_two(std::size_t n) -> bool;

} // namespace udsp
