#pragma once

#include <span>
#include <string>
#include <utility>

#include <json.hpp>

namespace udsp {

enum class WeightFamily { polynomial, exponential, gaussian };

// Damping weight rho(t). polynomial: (1+|t|)^-alpha, exponential: e^{-alpha|t|},
// gaussian: e^{-alpha t^2}. The gaussian family violates
// rho(t)rho(s) <= rho(t+s) and exists only as a counterexample.
struct Weight {
  WeightFamily family = WeightFamily::polynomial;
  double alpha = 0.0;

  [[nodiscard]] static auto polynomial(double alpha) -> Weight;
  [[nodiscard]] static auto exponential(double alpha) -> Weight;
  [[nodiscard]] static auto gaussian(double alpha) -> Weight;
};

[[nodiscard]] auto weight_eval(const Weight &w, double t) -> double;

// 1/rho(t), computed directly rather than as a reciprocal so that large
// exponents do not round to inf prematurely.
[[nodiscard]] auto weight_inverse(const Weight &w, double t) -> double;

// Throws ConfigError for negative alpha or for the gaussian family.
void require_admissible(const Weight &w);

struct SubmultiplicativityReport {
  bool holds = true;
  std::pair<double, double> worst_pair{0.0, 0.0};
  double worst_ratio = 0.0;
};

inline constexpr double kSubmultiplicativityTol = 1e-12;

[[nodiscard]] auto submultiplicativity_check(const Weight &w,
                                             std::span<const std::pair<double, double>> pairs)
    -> SubmultiplicativityReport;

[[nodiscard]] auto to_string(WeightFamily f) -> std::string;
[[nodiscard]] auto weight_family_from_string(const std::string &s) -> WeightFamily;

void to_json(nlohmann::json &j, const Weight &w);
void from_json(const nlohmann::json &j, Weight &w);

} // namespace udsp
