#include "udsp/weights.hpp"

#include <cmath>

#include "udsp/errors.hpp"

namespace udsp {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ConfigError("weight exponent alpha must be a finite nonnegative number, got " +
                      std::to_string(alpha));
}

auto log_weight(const Weight &w, double t) -> double {
  const double a = std::abs(t);
  switch (w.family) {
  case WeightFamily::polynomial:
    return -w.alpha * std::log1p(a);
  case WeightFamily::exponential:
    return -w.alpha * a;
  case WeightFamily::gaussian:
    return -w.alpha * a * a;
  }
  return 0.0;
}

} // namespace

auto Weight::polynomial(double alpha) -> Weight {
  check_alpha(alpha);
  return {WeightFamily::polynomial, alpha};
}

auto Weight::exponential(double alpha) -> Weight {
  check_alpha(alpha);
  return {WeightFamily::exponential, alpha};
}

auto Weight::gaussian(double alpha) -> Weight {
  check_alpha(alpha);
  return {WeightFamily::gaussian, alpha};
}

auto weight_eval(const Weight &w, double t) -> double {
  check_alpha(w.alpha);
  const double a = std::abs(t);
  switch (w.family) {
  case WeightFamily::polynomial:
    return w.alpha == 0.0 ? 1.0 : std::pow(1.0 + a, -w.alpha);
  case WeightFamily::exponential:
    return std::exp(-w.alpha * a);
  case WeightFamily::gaussian:
    return std::exp(-w.alpha * a * a);
  }
  return 1.0;
}

auto weight_inverse(const Weight &w, double t) -> double {
  const double a = std::abs(t);
  switch (w.family) {
  case WeightFamily::polynomial:
    return w.alpha == 0.0 ? 1.0 : std::pow(1.0 + a, w.alpha);
  case WeightFamily::exponential:
    return std::exp(w.alpha * a);
  case WeightFamily::gaussian:
    return std::exp(w.alpha * a * a);
  }
  return 1.0;
}

void require_admissible(const Weight &w) {
  check_alpha(w.alpha);
  if (w.family == WeightFamily::gaussian)
    throw ConfigError("gaussian weights violate rho(t)rho(s) <= rho(t+s) and are not admissible");
}

auto submultiplicativity_check(const Weight &w,
                               std::span<const std::pair<double, double>> pairs)
    -> SubmultiplicativityReport {
  if (pairs.empty())
    throw ConfigError("submultiplicativity check needs at least one (t, s) pair");
  SubmultiplicativityReport rep;
  bool first = true;
  for (const auto &[t, s] : pairs) {
    // Compare in log space: the gaussian ratio overflows quickly.
    const double log_ratio = log_weight(w, t) + log_weight(w, s) - log_weight(w, t + s);
    const double ratio = std::exp(log_ratio);
    if (first || ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_pair = {t, s};
      first = false;
    }
    if (log_ratio > std::log1p(kSubmultiplicativityTol))
      rep.holds = false;
  }
  return rep;
}

auto to_string(WeightFamily f) -> std::string {
  switch (f) {
  case WeightFamily::polynomial:
    return "polynomial";
  case WeightFamily::exponential:
    return "exponential";
  case WeightFamily::gaussian:
    return "gaussian";
  }
  return "polynomial";
}

auto weight_family_from_string(const std::string &s) -> WeightFamily {
  if (s == "polynomial")
    return WeightFamily::polynomial;
  if (s == "exponential")
    return WeightFamily::exponential;
  if (s == "gaussian")
    return WeightFamily::gaussian;
  throw ConfigError("unknown weight family '" + s + "'");
}

void to_json(nlohmann::json &j, const Weight &w) {
  j = nlohmann::json{{"family", to_string(w.family)}, {"alpha", w.alpha}};
}

void from_json(const nlohmann::json &j, Weight &w) {
  w.family = weight_family_from_string(j.value("family", std::string("polynomial")));
  w.alpha = j.at("alpha").get<double>();
  check_alpha(w.alpha);
}

} // namespace udsp
