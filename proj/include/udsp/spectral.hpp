#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "udsp/kernels.hpp"
#include "udsp/signals.hpp"
#include "udsp/weights.hpp"

namespace udsp {

// int_{-m}^{m} t^k e^{i beta t} dt in closed form; a power series is used
// when |beta| m is small so that beta -> 0 reaches the limit 2m^{k+1}/(k+1)
// (k even) without division.
[[nodiscard]] auto monomial_exp_integral(int k, double beta, double m) -> cplx;

struct TruncatedSpectrum {
  double m = 0.0;
  std::vector<double> omega;
  std::vector<cplx> values;
};

// X_m(omega) = int_{-m}^{m} e^{-i omega t} x(t) dt.
[[nodiscard]] auto truncated_transform(const SymbolicSignal &x, double m,
                                       const std::vector<double> &omega) -> TruncatedSpectrum;
// Trapezoid quadrature over the samples inside [-m, m].
[[nodiscard]] auto truncated_transform(const SampledSignal &x, double m,
                                       const std::vector<double> &omega) -> TruncatedSpectrum;

// Frequency-domain probe F: amplitude on [center - p', center + p'], a mu
// taper of smoothness d down to 0 at center +- half_width, p' = plateau *
// half_width.
struct TestFunction {
  double center = 0.0;
  double half_width = 1.0;
  int d = 2;
  double plateau = 0.5;
  cplx amplitude{1.0, 0.0};

  [[nodiscard]] auto profile(double omega) const -> cplx;
  [[nodiscard]] auto support_lo() const -> double { return center - half_width; }
  [[nodiscard]] auto support_hi() const -> double { return center + half_width; }
  [[nodiscard]] auto conj() const -> TestFunction;
  [[nodiscard]] auto transfer() const -> TransferFunction;
  // Leading constant C in |f^(t)| <= C |t|^{-(d+1)} for large |t|.
  [[nodiscard]] auto decay_constant() const -> double;
};

[[nodiscard]] auto make_bump(double center, double half_width, int d, double plateau)
    -> TestFunction;

// f^(t) = int F(omega) e^{-i omega t} d omega sampled on a centered grid.
// Cached per (probe, grid); safe for concurrent use.
struct ProbeSamples {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<cplx> fhat;
  bool leakage = false;
};

[[nodiscard]] auto probe_samples(const TestFunction &f, double omega_max, std::size_t n)
    -> std::shared_ptr<const ProbeSamples>;

struct PairingOptions {
  // Time truncation; 0 picks T from the weighted tail bound.
  double T = 0.0;
  // Tail-estimate tolerance for the converged flag.
  double tol = 1e-6;
  // Upper limit on the automatic truncation.
  double T_cap = 8192.0;
};

struct PairingResult {
  cplx value{0.0, 0.0};
  double tail_estimate = 0.0;
  double T = 0.0;
  bool converged = true;
};

// <X, F> computed in the time domain as int_{-T}^{T} x(t) f^(t) dt.
[[nodiscard]] auto pairing(const SignalView &x, const TestFunction &f,
                           const PairingOptions &opts = {}) -> PairingResult;
[[nodiscard]] auto pairing(const SymbolicSignal &x, const TestFunction &f,
                           const PairingOptions &opts = {}) -> PairingResult;

struct ParsevalReport {
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
  double abs_err = 0.0;
  double tail_estimate = 0.0;
  bool converged = true;
};

// lhs = int x(t) conj(y(t)) dt with y the time-domain pair of F;
// rhs = (1/2pi) <X, conj F> through pairing().
[[nodiscard]] auto parseval_check(const SignalView &x, const TestFunction &f,
                                  const PairingOptions &opts = {}) -> ParsevalReport;
[[nodiscard]] auto parseval_check(const SymbolicSignal &x, const TestFunction &f,
                                  const PairingOptions &opts = {}) -> ParsevalReport;

// A claimed spectrum gap: either R \ [-edge, edge] (exterior) or
// (-edge, edge) (interior).
struct SpectralGap {
  enum class Kind { exterior, interior };
  Kind kind = Kind::exterior;
  double edge = 1.0;

  [[nodiscard]] auto contains(const TestFunction &f) const -> bool;
  [[nodiscard]] auto describe() const -> std::string;
};

inline constexpr double kGapTolerance = 1e-3;

// Exterior gap: d=2 bumps at 1.5x, 2x, 3x the edge, half-width 0.4x edge.
// Interior gap: d=2 bumps at -0.5, 0, 0.5 times the edge, half-width 0.4x edge.
[[nodiscard]] auto default_probe_bank(const SpectralGap &gap) -> std::vector<TestFunction>;

struct ProbeResult {
  TestFunction probe;
  PairingResult pairing;
};

struct GapReport {
  SpectralGap gap;
  std::vector<ProbeResult> probes;
  double max_pairing = 0.0;
  double signal_norm = 0.0;
  double tolerance = kGapTolerance;
  bool pass = true;
};

struct GapTestOptions {
  PairingOptions pairing;
  double tol = kGapTolerance;
  // Weight exponent used for the signal norm in the pass threshold; defaults
  // to the signal's polynomial growth order.
  std::optional<double> alpha;
};

[[nodiscard]] auto gap_test(const SignalView &x, const SpectralGap &gap,
                            const std::vector<TestFunction> &bank,
                            const GapTestOptions &opts = {}) -> GapReport;
[[nodiscard]] auto gap_test(const SymbolicSignal &x, const SpectralGap &gap,
                            const std::vector<TestFunction> &bank,
                            const GapTestOptions &opts = {}) -> GapReport;

void to_json(nlohmann::json &j, const TestFunction &f);
void to_json(nlohmann::json &j, const GapReport &r);

} // namespace udsp
