#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>

#include "nfre/special_functions.hpp"

namespace {

using nfre::cplx;

// Independent oracle: adaptive Simpson quadrature of exp(j pi t^2 / 2).
cplx fresnel_integrand(double t) {
  return std::polar(1.0, nfre::pi / 2.0 * t * t);
}

cplx simpson(double a, double b, const cplx& fa, const cplx& fm, const cplx& fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

cplx adaptive_step(double a, double b, const cplx& fa, const cplx& fm, const cplx& fb,
                   const cplx& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const cplx fl = fresnel_integrand(0.5 * (a + m));
  const cplx fr = fresnel_integrand(0.5 * (m + b));
  const cplx left = simpson(a, m, fa, fl, fm);
  const cplx right = simpson(m, b, fm, fr, fb);
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_step(a, m, fa, fl, fm, left, tol / 2.0, depth + 1) +
         adaptive_step(m, b, fm, fr, fb, right, tol / 2.0, depth + 1);
}

cplx fresnel_oracle(double a, double b, double tol = 1e-13) {
  // Pre-split so each adaptive call sees at most ~2 rad of phase, otherwise
  // the error estimate can alias on the oscillatory integrand.
  const double max_t = std::max(std::abs(a), std::abs(b));
  const int segments = std::max(8, static_cast<int>(std::ceil((b - a) * (1.0 + max_t) * 2.0)));
  cplx total{0.0, 0.0};
  for (int s = 0; s < segments; ++s) {
    const double lo = a + (b - a) * s / segments;
    const double hi = a + (b - a) * (s + 1) / segments;
    const cplx fa = fresnel_integrand(lo);
    const cplx fb = fresnel_integrand(hi);
    const cplx fm = fresnel_integrand(0.5 * (lo + hi));
    total += adaptive_step(lo, hi, fa, fm, fb, simpson(lo, hi, fa, fm, fb),
                           tol / segments, 0);
  }
  return total;
}

}  // namespace

TEST_CASE("fresnel basics") {
  CHECK(nfre::fresnel(0.0) == cplx(0.0, 0.0));

  const cplx f13 = nfre::fresnel(1.3);
  const cplx f13n = nfre::fresnel(-1.3);
  CHECK(f13n.real() == -f13.real());
  CHECK(f13n.imag() == -f13.imag());

  const cplx f1 = nfre::fresnel(1.0);
  CHECK(f1.real() == Catch::Approx(0.7798934).margin(1e-7));
  CHECK(f1.imag() == Catch::Approx(0.4382591).margin(1e-7));
  const cplx oracle = fresnel_oracle(0.0, 1.0);
  CHECK(std::abs(f1 - oracle) < 1e-12);
}

TEST_CASE("fresnel matches quadrature oracle on [-10, 10]") {
  for (double x = 0.25; x <= 10.0; x += 0.25) {
    const cplx oracle = fresnel_oracle(0.0, x);
    const cplx value = nfre::fresnel(x);
    INFO("x = " << x);
    CHECK(std::abs(value - oracle) < 1e-9 * std::max(1.0, std::abs(oracle)));
    CHECK(std::abs(nfre::fresnel(-x) + oracle) < 1e-9);
  }
}

TEST_CASE("fresnel small-argument behavior") {
  // F(x)/x -> 1; the leading deviation is the series term pi x^2 / 6.
  for (double x : {1e-3, 5e-3, 0.01}) {
    CHECK(std::abs(nfre::fresnel(x) / x - 1.0) < 1e-4);
  }
  for (double x : {0.02, 0.035, 0.049}) {
    const double dev = std::abs(nfre::fresnel(x) / x - 1.0);
    CHECK(dev < nfre::pi * x * x / 6.0 * 1.01);
  }
}

TEST_CASE("fresnel limit toward (1+j)/2") {
  CHECK(std::abs(nfre::fresnel(50.0) - cplx(0.5, 0.5)) < 0.01);
}

TEST_CASE("fresnel branch seam is continuous") {
  const cplx lo = nfre::fresnel(3.75);        // power series side
  const cplx hi = nfre::fresnel(3.7500001);   // asymptotic side
  CHECK(std::abs(hi - lo) < 1e-6);
  // Increment across the seam against the oracle.
  CHECK(std::abs((nfre::fresnel(4.0) - nfre::fresnel(3.5)) - fresnel_oracle(3.5, 4.0)) < 1e-10);
}

TEST_CASE("fresnel far asymptotic increments match quadrature") {
  const cplx inc = nfre::fresnel(99.0) - nfre::fresnel(98.0);
  CHECK(std::abs(inc - fresnel_oracle(98.0, 99.0)) < 1e-10);
}

TEST_CASE("fresnel rejects non-finite input") {
  CHECK_THROWS_AS(nfre::fresnel(std::numeric_limits<double>::quiet_NaN()),
                  nfre::invalid_parameter);
  CHECK_THROWS_AS(nfre::fresnel(std::numeric_limits<double>::infinity()),
                  nfre::invalid_parameter);
}

TEST_CASE("sinc values") {
  CHECK(nfre::sinc(0.0) == 1.0);
  CHECK(nfre::sinc(1.0) == 0.0);
  CHECK(nfre::sinc(-3.0) == 0.0);
  CHECK(nfre::sinc(0.5) == Catch::Approx(2.0 / nfre::pi).epsilon(1e-14));
  for (double x : {0.3, 1.7, 2.2}) {
    CHECK(nfre::sinc(-x) == nfre::sinc(x));
  }
  // Series branch joins the direct expression smoothly.
  const double just_below = nfre::sinc(9.999e-5);
  const double just_above = nfre::sinc(1.001e-4);
  CHECK(std::abs(just_below - just_above) < 1e-9);
}
