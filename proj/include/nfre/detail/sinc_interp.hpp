#pragma once

// Band-limited (windowed-sinc) interpolation on uniformly sampled data.
// A polyphase kernel table is built once per (taps, beta) configuration so
// the per-sample cost is taps multiply-adds plus a table blend.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "nfre/common.hpp"

namespace nfre::detail {

inline double bessel_i0(double x) {
  // Series I0(x) = sum ((x/2)^k / k!)^2; converges quickly for the window
  // arguments used here (x <= ~12).
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

class SincKernel {
 public:
  SincKernel(int taps, double kaiser_beta, int phases = 512)
      : taps_(taps), phases_(phases), rows_(static_cast<size_t>(phases + 1) * taps) {
    const double i0b = bessel_i0(kaiser_beta);
    const double half = taps / 2.0;
    for (int p = 0; p <= phases; ++p) {
      const double frac = static_cast<double>(p) / phases;
      double* row = rows_.data() + static_cast<size_t>(p) * taps;
      double sum = 0.0;
      for (int t = 0; t < taps; ++t) {
        const double offset = (t - taps / 2 + 1) - frac;
        const double r = offset / half;
        double w = 0.0;
        if (std::abs(r) < 1.0) w = bessel_i0(kaiser_beta * std::sqrt(1.0 - r * r)) / i0b;
        row[t] = sinc_local(offset) * w;
        sum += row[t];
      }
      // Unit DC gain per phase row.
      for (int t = 0; t < taps; ++t) row[t] /= sum;
    }
  }

  int taps() const { return taps_; }

  // Interpolate data at fractional index x. Indices outside [0, n) read as 0.
  template <typename T>
  T operator()(const T* data, std::ptrdiff_t n, double x) const {
    const double fl = std::floor(x);
    const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(fl) - taps_ / 2 + 1;
    const double frac = x - fl;
    const double pf = frac * phases_;
    const int p = static_cast<int>(pf);
    const double blend = pf - p;
    const double* row_a = rows_.data() + static_cast<size_t>(p) * taps_;
    const double* row_b = rows_.data() + static_cast<size_t>(p + 1) * taps_;
    T acc{};
    for (int t = 0; t < taps_; ++t) {
      const std::ptrdiff_t idx = i0 + t;
      if (idx < 0 || idx >= n) continue;
      const double k = row_a[t] + blend * (row_b[t] - row_a[t]);
      acc += data[idx] * k;
    }
    return acc;
  }

  // True when the full tap support [x - taps/2, x + taps/2] lies inside [0, n).
  bool covered(std::ptrdiff_t n, double x) const {
    const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(x)) - taps_ / 2 + 1;
    return i0 >= 0 && i0 + taps_ <= n;
  }

 private:
  static double sinc_local(double u) {
    if (std::abs(u) < 1e-9) return 1.0;
    return std::sin(pi * u) / (pi * u);
  }

  int taps_;
  int phases_;
  std::vector<double> rows_;
};

inline const SincKernel& interp_kernel_64() {
  static const SincKernel k(64, 12.0);
  return k;
}

inline const SincKernel& interp_kernel_32() {
  static const SincKernel k(32, 10.0);
  return k;
}

}  // namespace nfre::detail
