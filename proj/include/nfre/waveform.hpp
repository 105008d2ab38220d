#pragma once

// Baseband waveform model. A waveform is described by its energy spectral
// density |S(f)|^2 on [-B/2, B/2] and the autocorrelation C(tau) derived
// from it, together with the spectral descriptors f_M (central frequency)
// and B_RMS (RMS bandwidth).
//
// Two kinds exist: the cardinal-sine pulse (flat spectrum, closed-form
// C(tau) = E_c sinc(B tau)) and custom waveforms given by a tabulated
// spectrum. Custom descriptors are exact moments of the piecewise-linear
// tabulated density; C(tau) and the time-domain samples s(t) are derived
// from one internal spectral grid so all views stay consistent.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nfre/common.hpp"
#include "nfre/detail/sinc_interp.hpp"
#include "nfre/special_functions.hpp"

namespace nfre {

enum class WaveformKind { cardinal_sine, custom };

struct WaveformOptions {
  // Internal spectral grid used for the inverse transforms (>= 4096).
  int quadrature_points = 16385;
  // Lag grid: step defaults to 1/(16B), span to 128/B.
  double lag_step = 0.0;
  double lag_span = 0.0;
  // Time-sample table (custom waveforms): rate defaults to 8B, span to 128/B.
  double time_rate = 0.0;
  double time_span = 0.0;
};

class Waveform {
 public:
  static Waveform cardinal_sine(double bandwidth, double energy = 1.0) {
    detail::require(bandwidth > 0.0, "cardinal_sine: bandwidth must be positive");
    detail::require(energy > 0.0, "cardinal_sine: energy must be positive");
    Waveform w;
    w.kind_ = WaveformKind::cardinal_sine;
    w.bandwidth_ = bandwidth;
    w.energy_ = energy;
    w.f_m_ = 0.0;
    w.b_rms_ = bandwidth / std::sqrt(12.0);
    return w;
  }

  static Waveform from_spectrum(const std::vector<double>& freq,
                                const std::vector<double>& density,
                                const WaveformOptions& options = {}) {
    Waveform w;
    w.kind_ = WaveformKind::custom;
    w.build_custom(freq, density, options);
    return w;
  }

  // Two numeric columns (frequency in Hz, |S(f)|^2), '#' starts a comment.
  static Waveform from_spectrum_file(const std::string& path,
                                     const WaveformOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open spectrum file: " + path);
    std::vector<double> freq, density;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      double f, d;
      if (!(row >> f)) continue;  // blank / comment-only line
      if (!(row >> d)) {
        throw io_error("spectrum file " + path + ": line " + std::to_string(line_no) +
                       " does not hold two numeric columns");
      }
      freq.push_back(f);
      density.push_back(d);
    }
    try {
      return from_spectrum(freq, density, options);
    } catch (const invalid_parameter& e) {
      throw io_error("spectrum file " + path + ": " + e.what());
    }
  }

  WaveformKind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }
  double energy() const { return energy_; }

  // First spectral moment f_M of |S(f)|^2 / E_c.
  double central_frequency() const { return f_m_; }

  // sqrt of the centered second spectral moment.
  double rms_bandwidth() const { return b_rms_; }

  // |S(f)|^2; zero outside the support.
  double spectrum_density(double f) const {
    if (kind_ == WaveformKind::cardinal_sine) {
      return (std::abs(f) <= bandwidth_ / 2.0) ? energy_ / bandwidth_ : 0.0;
    }
    if (f < spec_f0_ || f > spec_f1_) return 0.0;
    const double x = (f - spec_f0_) / spec_df_;
    const size_t i = std::min(static_cast<size_t>(x), spec_values_.size() - 2);
    const double s = x - static_cast<double>(i);
    return spec_values_[i] + s * (spec_values_[i + 1] - spec_values_[i]);
  }

  // C(tau). Hermitian: C(-tau) = conj(C(tau)); zero beyond the tabulated span.
  cplx autocorrelation(double lag) const {
    if (kind_ == WaveformKind::cardinal_sine) {
      return {energy_ * sinc(bandwidth_ * lag), 0.0};
    }
    const double alag = std::abs(lag);
    if (alag > lag_span_) return {0.0, 0.0};
    cplx value = lag_interp(alag);
    if (lag < 0.0) value = std::conj(value);
    return value;
  }

  // s(t). Cardinal sine: closed form, defined for all t. Custom: zero-phase
  // inverse transform tabulated at time_rate, band-limited interpolation
  // in between, zero beyond the table.
  cplx time_sample(double t) const {
    if (kind_ == WaveformKind::cardinal_sine) {
      return {std::sqrt(energy_ * bandwidth_) * sinc(bandwidth_ * t), 0.0};
    }
    if (std::abs(t) > time_span_) return {0.0, 0.0};
    const double x = (t + time_span_) * time_rate_;
    return detail::interp_kernel_64()(time_table_.data(),
                                      static_cast<std::ptrdiff_t>(time_table_.size()), x);
  }

  // Largest |t| for which time_sample is meaningful.
  double time_halfwidth() const {
    return kind_ == WaveformKind::cardinal_sine ? std::numeric_limits<double>::infinity()
                                                : time_span_;
  }

  double lag_table_span() const {
    return kind_ == WaveformKind::cardinal_sine ? std::numeric_limits<double>::infinity()
                                                : lag_span_;
  }

 private:
  Waveform() = default;

  // Catmull-Rom on the lag table; the point left of tau=0 is supplied by
  // Hermitian symmetry.
  cplx lag_interp(double alag) const {
    const double x = alag / lag_step_;
    const auto m = static_cast<std::ptrdiff_t>(x);
    const double s = x - static_cast<double>(m);
    const auto n = static_cast<std::ptrdiff_t>(lag_table_.size());
    const auto at = [&](std::ptrdiff_t i) -> cplx {
      if (i < 0) return std::conj(lag_table_[-i]);
      if (i >= n) return {0.0, 0.0};
      return lag_table_[i];
    };
    const cplx p0 = at(m - 1), p1 = at(m), p2 = at(m + 1), p3 = at(m + 2);
    const cplx a = 2.0 * p1;
    const cplx b = p2 - p0;
    const cplx c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
    const cplx d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
    return 0.5 * (a + b * s + c * (s * s) + d * (s * s * s));
  }

  void build_custom(const std::vector<double>& freq, const std::vector<double>& density,
                    const WaveformOptions& options) {
    detail::require(freq.size() == density.size(), "spectrum: column lengths differ");
    detail::require(freq.size() >= 2, "spectrum: need at least two grid points");
    detail::require(options.quadrature_points >= 4096,
                    "spectrum: quadrature_points must be >= 4096");
    const size_t n = freq.size();
    const double df = (freq.back() - freq.front()) / static_cast<double>(n - 1);
    detail::require(df > 0.0, "spectrum: frequency grid must be increasing");
    for (size_t i = 0; i + 1 < n; ++i) {
      const double step = freq[i + 1] - freq[i];
      detail::require(std::abs(step - df) <= 1e-6 * df + 1e-12,
                      "spectrum: frequency grid must be uniform");
    }
    double peak = 0.0;
    for (double d : density) peak = std::max(peak, d);
    detail::require(peak > 0.0, "spectrum: density must have positive mass");
    std::vector<double> values(density);
    for (double& d : values) {
      detail::require(d >= -1e-9 * peak, "spectrum: density must be nonnegative");
      d = std::max(d, 0.0);
    }

    spec_f0_ = freq.front();
    spec_f1_ = freq.back();
    spec_df_ = df;
    spec_values_ = values;
    bandwidth_ = 2.0 * std::max(std::abs(spec_f0_), std::abs(spec_f1_));
    detail::require(bandwidth_ > 0.0, "spectrum: zero support");

    // Descriptors: exact moments of the piecewise-linear density.
    double m0 = 0.0, m1 = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
      const double h = df;
      const double g0 = values[i], dg = values[i + 1] - values[i];
      const double f0 = freq[i];
      m0 += h * (g0 + 0.5 * dg);
      m1 += h * (f0 * g0 + 0.5 * (f0 * dg + h * g0) + h * dg / 3.0);
    }
    detail::require(m0 > 0.0, "spectrum: zero energy");
    energy_ = m0;
    f_m_ = m1 / m0;
    double m2 = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
      const double h = df;
      const double g0 = values[i], dg = values[i + 1] - values[i];
      const double a = freq[i] - f_m_;
      m2 += h * (a * a * (g0 + 0.5 * dg) + 2.0 * a * h * (0.5 * g0 + dg / 3.0) +
                 h * h * (g0 / 3.0 + 0.25 * dg));
    }
    b_rms_ = std::sqrt(std::max(m2, 0.0) / m0);

    // Internal quadrature grid: every tabulated segment subdivided equally so
    // trapezoid weights integrate the piecewise-linear density exactly.
    const size_t target = static_cast<size_t>(options.quadrature_points);
    const size_t sub = (target - 1 + (n - 2)) / (n - 1);
    const size_t nq = sub * (n - 1) + 1;
    std::vector<double> qf(nq), qw(nq);
    for (size_t i = 0; i + 1 < n; ++i) {
      for (size_t s = 0; s < sub; ++s) {
        const size_t idx = i * sub + s;
        const double frac = static_cast<double>(s) / static_cast<double>(sub);
        qf[idx] = freq[i] + frac * df;
        qw[idx] = values[i] + frac * (values[i + 1] - values[i]);
      }
    }
    qf[nq - 1] = freq.back();
    qw[nq - 1] = values.back();
    const double qh = df / static_cast<double>(sub);
    std::vector<double> weights(nq);
    for (size_t i = 0; i < nq; ++i) {
      const double trap = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
      weights[i] = qw[i] * trap * qh;
    }

    // Lag table C(tau_m) = sum_i w_i exp(j 2 pi f_i tau_m), via one complex
    // rotation per grid point.
    lag_step_ = options.lag_step > 0.0 ? options.lag_step : 1.0 / (16.0 * bandwidth_);
    lag_span_ = options.lag_span > 0.0 ? options.lag_span : 128.0 / bandwidth_;
    const size_t lags = static_cast<size_t>(std::llround(lag_span_ / lag_step_)) + 1;
    lag_span_ = static_cast<double>(lags - 1) * lag_step_;
    lag_table_.assign(lags, cplx{0.0, 0.0});
    for (size_t i = 0; i < nq; ++i) {
      if (weights[i] == 0.0) continue;
      const cplx rot = std::polar(1.0, 2.0 * pi * qf[i] * lag_step_);
      cplx acc(weights[i], 0.0);
      for (size_t m = 0; m < lags; ++m) {
        lag_table_[m] += acc;
        acc *= rot;
      }
    }
    // Pin C(0) = E_c exactly.
    const double c0 = lag_table_[0].real();
    detail::require(c0 > 0.0, "spectrum: inverse transform produced no energy");
    const double scale = energy_ / c0;
    for (cplx& c : lag_table_) c *= scale;
    lag_table_[0] = cplx(energy_, 0.0);

    // Time table s(t) from the zero-phase amplitude spectrum sqrt(|S|^2).
    time_rate_ = options.time_rate > 0.0 ? options.time_rate : 8.0 * bandwidth_;
    time_span_ = options.time_span > 0.0 ? options.time_span : 128.0 / bandwidth_;
    const size_t half = static_cast<size_t>(std::llround(time_span_ * time_rate_));
    time_span_ = static_cast<double>(half) / time_rate_;
    const size_t nt = 2 * half + 1;
    time_table_.assign(nt, cplx{0.0, 0.0});
    const double dt = 1.0 / time_rate_;
    for (size_t i = 0; i < nq; ++i) {
      const double trap = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
      const double amp = std::sqrt(qw[i]) * trap * qh;
      if (amp == 0.0) continue;
      const cplx rot = std::polar(1.0, 2.0 * pi * qf[i] * dt);
      cplx acc = std::polar(amp, 2.0 * pi * qf[i] * (-time_span_));
      for (size_t m = 0; m < nt; ++m) {
        time_table_[m] += acc;
        acc *= rot;
      }
    }
  }

  WaveformKind kind_ = WaveformKind::cardinal_sine;
  double bandwidth_ = 0.0;
  double energy_ = 0.0;
  double f_m_ = 0.0;
  double b_rms_ = 0.0;

  // Custom-waveform state.
  double spec_f0_ = 0.0, spec_f1_ = 0.0, spec_df_ = 0.0;
  std::vector<double> spec_values_;
  double lag_step_ = 0.0, lag_span_ = 0.0;
  std::vector<cplx> lag_table_;
  double time_rate_ = 0.0, time_span_ = 0.0;
  std::vector<cplx> time_table_;
};

}  // namespace nfre
