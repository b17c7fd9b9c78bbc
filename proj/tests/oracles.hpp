#pragma once
// Reference computations that share no code with the library: Gauss-Legendre
// quadrature, finite differences and closed-form kernels.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

using cplx = std::complex<double>;
using std::numbers::pi;

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 5> kGLx{0.1488743389816312, 0.4333953941292472,
                                            0.6794095682990244, 0.8650633666889845,
                                            0.9739065285171717};
inline constexpr std::array<double, 5> kGLw{0.2955242247147529, 0.2692667193099963,
                                            0.2190863625159820, 0.1494513491505806,
                                            0.0666713443086881};

// Composite 10-point Gauss-Legendre over `panels` equal panels of [a, b].
inline auto integrate(const std::function<cplx(double)> &f, double a, double b, int panels)
    -> cplx {
  cplx sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < kGLx.size(); ++i)
      sum += kGLw[i] * half * (f(mid - half * kGLx[i]) + f(mid + half * kGLx[i]));
  }
  return sum;
}

// Central difference with step h.
inline auto derivative(const std::function<double(double)> &f, double x, double h) -> double {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline auto derivative_c(const std::function<cplx(double)> &f, double x, double h) -> cplx {
  // Fourth-order stencil.
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Literal transition profile for d = 2 as a cubic integral ratio.
inline auto mu_d2_literal(double p, double q, double w) -> double {
  const double M = (q * q * q - p * p * p) / 3.0 - 0.5 * (p + q) * (q * q - p * p) + q * p * (q - p);
  const double num =
      (w * w * w - p * p * p) / 3.0 - 0.5 * (p + q) * (w * w - p * p) + q * p * (w - p);
  return 1.0 - num / M;
}

// Impulse response of the d = 2 lowpass profile, by integrating
// (1/pi) int_0^q H(w) cos(wt) dw by parts three times.
inline auto lowpass_d2_kernel(double p, double q, double t) -> double {
  if (std::abs(t) < 1.0) {
    // The closed form cancels catastrophically near 0; integrate directly.
    const auto f = [&](double w) -> cplx {
      double h = 1.0;
      if (w > p) {
        const double s = (w - p) / (q - p);
        h = 1.0 - 3.0 * s * s + 2.0 * s * s * s;
      }
      return h * std::cos(w * t);
    };
    return integrate(f, 0.0, q, 64).real() / pi;
  }
  const double L = q - p;
  return (1.0 / pi) * (-6.0 * (std::sin(p * t) + std::sin(q * t)) / (L * L * t * t * t) +
                       12.0 * (std::cos(p * t) - std::cos(q * t)) / (L * L * L * t * t * t * t));
}

} // namespace oracle
