#pragma once

#include <string>

#include <json.hpp>

#include "udsp/kernels.hpp"
#include "udsp/signals.hpp"
#include "udsp/spectral.hpp"

namespace udsp {

enum class FilterKind { lowpass, highpass };

[[nodiscard]] auto to_string(FilterKind k) -> std::string;
[[nodiscard]] auto filter_kind_from_string(const std::string &s) -> FilterKind;

// Passband edge p, stopband edge q, transition smoothness d and the weight
// exponent alpha the filter must be admissible for.
struct FilterSpec {
  double p = 1.0;
  double q = 2.0;
  int d = 2;
  FilterKind kind = FilterKind::lowpass;
  double alpha = 0.0;

  // Throws ConfigError unless 0 < p < q, d in {1,2} and d > alpha + 1/2.
  void validate() const;
};

struct Smoothness {
  int d = 1;
  double r = 1.5;
};

// Smallest d in {1,2} with d > alpha + 1/2 and the midpoint of the Sobolev
// index interval (max{1, 1/(d-alpha)}, 2].
[[nodiscard]] auto select_smoothness(double alpha) -> Smoothness;

// Transition profile on [p, q] with mu(p) = 1, mu(q) = 0; no validation.
//   d=1: (q - w)/(q - p)
//   d=2: 1 - (1/M)[(w^3-p^3)/3 - (p+q)/2 (w^2-p^2) + qp(w-p)],
//        M = (q^3-p^3)/3 - (p+q)/2 (q^2-p^2) + qp(q-p) = -(q-p)^3/6,
//        evaluated as 1 - 3s^2 + 2s^3 with s = (w-p)/(q-p).
[[nodiscard]] auto mu_profile(double p, double q, int d, double omega) -> double;

// Lowpass profile 1 on [-p,p], mu(|w|) on p<|w|<=q, 0 beyond.
[[nodiscard]] auto lowpass_profile(double p, double q, int d, double omega) -> double;

[[nodiscard]] auto mu_eval(const FilterSpec &spec, double omega) -> double;
[[nodiscard]] auto filter_transfer(const FilterSpec &spec, double omega) -> double;
[[nodiscard]] auto make_transfer(const FilterSpec &spec) -> TransferFunction;

struct FilterOptions {
  // 0 selects 8q.
  double omega_max = 0.0;
  std::size_t kernel_n = 65536;
  bool run_gap_test = true;
  GapTestOptions gap;
};

[[nodiscard]] auto default_omega_max(const FilterSpec &spec) -> double;

// Kernel of the filter: lowpass h, or highpass delta - h.
[[nodiscard]] auto design_filter(const FilterSpec &spec, const FilterOptions &opts = {})
    -> Kernel;

struct FilterResult {
  SampledSignal y;
  ConvolvedSignal output;
  NormEstimate kernel_norm;
  std::optional<GapReport> gap_report;
};

[[nodiscard]] auto apply_filter(const FilterSpec &spec, const SymbolicSignal &x, double lo,
                                double hi, std::size_t n, const FilterOptions &opts = {})
    -> FilterResult;

// The gap the filter output is claimed to have: R \ [-q,q] for lowpass,
// (-p,p) for highpass.
[[nodiscard]] auto claimed_gap(const FilterSpec &spec) -> SpectralGap;

void to_json(nlohmann::json &j, const FilterSpec &s);
void from_json(const nlohmann::json &j, FilterSpec &s);

} // namespace udsp
