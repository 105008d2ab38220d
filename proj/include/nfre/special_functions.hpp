#pragma once

// Fresnel integral F(x) = int_0^x exp(j*pi/2 * t^2) dt and the cardinal sine
// sinc(x) = sin(pi x)/(pi x). These are the only special functions the
// closed-form ambiguity expressions need.

#include <cmath>
#include <complex>
#include <limits>

#include "nfre/common.hpp"

namespace nfre {

// sin(pi x)/(pi x) with sinc(0) = 1. Zeros at nonzero integers are exact.
inline double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    // 3-term series; avoids the 0/0 at the origin.
    const double u = pi * x;
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0);
  }
  if (x == std::round(x)) return 0.0;
  return std::sin(pi * x) / (pi * x);
}

namespace detail {

// Power series F(x) = x * sum_k (j*pi*x^2/2)^k / (k! (2k+1)).
// Accumulated in extended precision; usable up to |x| ~ 3.75 where the
// alternating terms grow to ~1e7 before decaying.
inline cplx fresnel_series(double x) {
  using lcplx = std::complex<long double>;
  const long double z = static_cast<long double>(pi) / 2.0L * static_cast<long double>(x) * x;
  const lcplx jz(0.0L, z);
  lcplx term(static_cast<long double>(x), 0.0L);  // x * (jz)^k / k!
  lcplx sum = term;                               // k = 0 contribution (2k+1 = 1)
  for (int k = 1; k <= 200; ++k) {
    term *= jz / static_cast<long double>(k);
    const lcplx contrib = term / static_cast<long double>(2 * k + 1);
    sum += contrib;
    if (std::abs(contrib) < 1e-22L * std::abs(sum) && static_cast<long double>(k) > z) break;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

// Asymptotic tail: F(x) = (1+j)/2 - I(x) with
//   I(x) = (j e^{j pi x^2/2} / (pi x)) * sum_m t_m,
//   t_0 = 1, t_{m+1} = t_m * (2m+1) * (-j/(pi x^2)).
// The series is truncated at its smallest term.
inline cplx fresnel_asymptotic(double x) {
  using lcplx = std::complex<long double>;
  const long double px2 = static_cast<long double>(pi) * x * x;
  const lcplx ratio_base(0.0L, -1.0L / px2);
  lcplx term(1.0L, 0.0L);
  lcplx sum = term;
  long double last_mag = 1.0L;
  for (int m = 0; m < 60; ++m) {
    const lcplx next = term * ratio_base * static_cast<long double>(2 * m + 1);
    const long double mag = std::abs(next);
    if (mag >= last_mag) break;  // asymptotic series started diverging
    term = next;
    sum += term;
    last_mag = mag;
    if (mag < 1e-19L) break;
  }
  const long double phase = static_cast<long double>(pi) / 2.0L * x * x;
  const lcplx w(std::cos(phase), std::sin(phase));
  const lcplx prefactor = lcplx(0.0L, 1.0L) * w / (static_cast<long double>(pi) * x);
  const lcplx tail = prefactor * sum;
  const lcplx result = lcplx(0.5L, 0.5L) - tail;
  return {static_cast<double>(result.real()), static_cast<double>(result.imag())};
}

}  // namespace detail

// Fresnel integral F(x); odd in x, F(x) -> (1+j)/2 as x -> +inf.
inline cplx fresnel(double x) {
  if (!std::isfinite(x)) throw invalid_parameter("fresnel: argument must be finite");
  const double ax = std::abs(x);
  cplx value = (ax <= 3.75) ? detail::fresnel_series(ax) : detail::fresnel_asymptotic(ax);
  return (x < 0.0) ? -value : value;
}

}  // namespace nfre
