#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "udsp/kernels.hpp"
#include "udsp/signals.hpp"

namespace udsp {

// Sign of the exponent numerator: as_printed uses (z - a), proof_variant
// uses (a - z). The two give opposite signs of Re E.
enum class Convention { as_printed, proof_variant };

[[nodiscard]] auto to_string(Convention c) -> std::string;
// Accepts "as_printed"/"printed" and "proof_variant"/"proof".
[[nodiscard]] auto convention_from_string(const std::string &s) -> Convention;

struct PredictorSpec {
  double a = 1.0;
  double omega_hat = 0.0;
  double gamma = 8.0;
  double r_exp = 0.5;
  double c = 1.0;
  Convention convention = Convention::as_printed;

  void validate() const;
  // gamma^{-r_exp}
  [[nodiscard]] auto epsilon() const -> double;
};

inline constexpr double kSaturationExponent = 700.0;

// 1/(a - i omega)
[[nodiscard]] auto anticausal_base_transfer(double a, double omega) -> cplx;

// E(z) for complex z.
[[nodiscard]] auto predictor_exponent(const PredictorSpec &spec, cplx z) -> cplx;

// Re E(i omega) from the closed-form real part
//   s gamma (a eps - omega (omega - omega_hat)) / ((omega - omega_hat)^2 + eps^2),
// s = +1 for as_printed and -1 for proof_variant.
[[nodiscard]] auto predictor_re_exponent(const PredictorSpec &spec, double omega) -> double;

struct TransferValue {
  cplx value{0.0, 0.0};
  bool saturated = false;
};

// (1 - e^E)/(a - z) anywhere in the plane. Within 1e-8 (1 + |a|) of z = a
// the removable singularity is bridged with the series of e^E - 1.
[[nodiscard]] auto predictor_transfer_z(const PredictorSpec &spec, cplx z) -> TransferValue;
[[nodiscard]] auto predictor_transfer(const PredictorSpec &spec, double omega) -> TransferValue;
[[nodiscard]] auto predictor_transfer_function(const PredictorSpec &spec) -> TransferFunction;

// exp(c / ((omega - omega_hat)^2 + nu))
[[nodiscard]] auto compensator(const PredictorSpec &spec, double omega, double nu) -> double;

struct VGammaProfile {
  std::vector<double> omega;
  std::vector<cplx> V;
  std::vector<double> damped;
  std::vector<double> re_exponent;        // closed form
  std::vector<double> re_exponent_direct; // Re of the complex evaluation
  std::vector<bool> saturated;
  double sup_damped = 0.0;
  std::size_t saturated_points = 0;
};

// V = H_gamma - 1/(a - i omega), damped = |V| / G(omega, omega_hat, eps).
// Saturated points are excluded from sup_damped.
[[nodiscard]] auto v_gamma_profile(const PredictorSpec &spec, const std::vector<double> &omega)
    -> VGammaProfile;

struct PredictorKernel {
  Kernel kernel;
  double anticausal_mass_fraction = 0.0;
  bool leakage = false;
};

// The 1/omega tail is peeled off with the causal exponential partner
// -C/(a + i omega), C = 1 - e^{E(infinity)}, and added back exactly.
[[nodiscard]] auto synthesize_predictor_kernel(const PredictorSpec &spec, double omega_max,
                                               std::size_t n) -> PredictorKernel;

enum class PredictRoute { automatic, time_domain, spectral };

[[nodiscard]] auto to_string(PredictRoute r) -> std::string;
[[nodiscard]] auto predict_route_from_string(const std::string &s) -> PredictRoute;

struct PredictOptions {
  PredictRoute route = PredictRoute::automatic;
  double omega_max = 2048.0;
  // Starting kernel size; grown until the kernel has decayed at the grid edge.
  std::size_t kernel_n = std::size_t{1} << 18;
  std::size_t kernel_n_max = std::size_t{1} << 22;
  double edge_tolerance = 1e-9;
  // Peak |H| above which the time-domain route is abandoned under automatic.
  double peak_limit = 1e10;
};

struct PredictResult {
  SampledSignal y_true;
  SampledSignal y_hat;
  double sup_err = 0.0;
  PredictRoute route = PredictRoute::time_domain;
  std::size_t kernel_n = 0;
  double peak_transfer = 0.0;
  double anticausal_mass_fraction = 0.0;
};

// Largest |H_gamma| found on a dense scan around omega_hat.
[[nodiscard]] auto peak_transfer_magnitude(const PredictorSpec &spec) -> double;

// rho(t) int_t^inf e^{a(t-s)} x(s) ds in closed form.
[[nodiscard]] auto anticausal_target(const SymbolicSignal &x, double a, double alpha, double t)
    -> cplx;

[[nodiscard]] auto predict(const PredictorSpec &spec, const SymbolicSignal &x, double lo,
                           double hi, std::size_t n, double alpha, const PredictOptions &opts = {})
    -> PredictResult;

struct VGammaEntry {
  Convention convention = Convention::as_printed;
  double gamma = 0.0;
  double sup_damped = 0.0;
  std::size_t saturated_points = 0;
  std::size_t grid_points = 0;
  double rho_l1_of_damped = 0.0;
  bool rho_l1_diverging = false;
  bool leakage = false;
};

// For both conventions and every gamma: damped profile on the frequency grid
// [lo, hi) of n points, and the weighted-L1 norm of the kernel of V/G
// synthesized with omega_max = max(|lo|, |hi|).
[[nodiscard]] auto vgamma_study(const PredictorSpec &base, const std::vector<double> &gammas,
                                double lo, double hi, std::size_t n, double alpha)
    -> std::vector<VGammaEntry>;

void to_json(nlohmann::json &j, const PredictorSpec &s);
void from_json(const nlohmann::json &j, PredictorSpec &s);
void to_json(nlohmann::json &j, const VGammaEntry &e);

} // namespace udsp
