#pragma once

// Cramer-Rao bounds on range estimation. Four routes produce a bound:
//   exact_sum      - per-pair derivative sums (eta, beta) over the array
//   analytic       - continuum closed forms in u = R/D for tagged layouts
//   taylor         - leading (D/R)^4 expansion with the alpha constants
//   numerical_fim  - independent Fisher-information oracle built from the
//                    signal model by finite differences and quadrature
// The oracle shares only the signal model with the closed-form routes; its
// derivatives and integrals are numerical on purpose so it can catch
// transcription errors in the formulas.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "nfre/ambiguity.hpp"
#include "nfre/array_geometry.hpp"
#include "nfre/common.hpp"
#include "nfre/scenario.hpp"

namespace nfre {

enum class CrbMethod { exact_sum, analytic, taylor, numerical_fim };

inline const char* to_string(CrbMethod m) {
  switch (m) {
    case CrbMethod::exact_sum: return "exact-sum";
    case CrbMethod::analytic: return "analytic";
    case CrbMethod::taylor: return "taylor";
    case CrbMethod::numerical_fim: return "numerical-fim";
  }
  return "?";
}

struct CrbBreakdown {
  // eta and beta are NaN for the numerical-FIM route, which cannot separate
  // the geometry factors from its aggregate information integrals.
  double eta = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double nf_geometry_term = std::numeric_limits<double>::quiet_NaN();  // eta - beta^2
  double phase_term = std::numeric_limits<double>::quiet_NaN();       // (eta-beta^2)(fc+fM)^2
  double waveform_term = std::numeric_limits<double>::quiet_NaN();    // eta * B_RMS^2
  double crb = 0.0;                                                   // m^2
  CrbMethod method = CrbMethod::exact_sum;
};

struct EtaBeta {
  double eta = 0.0;
  double beta = 0.0;
};

namespace detail {

struct DerivativeStats {
  double eta = 0.0;
  double beta = 0.0;
  double variance = 0.0;  // mean of (h_p - beta)^2 == eta - beta^2, cancellation-free
};

inline DerivativeStats derivative_stats(const ArrayConfig& array, const TargetModel& target,
                                        double range) {
  require(range > 0.0, "derivative_stats: range must be positive");
  array.validate();
  const double count = static_cast<double>(array.pair_count());
  double sum = 0.0, sum_sq = 0.0;
  for (double y : array.rx_positions) {
    for (double z : array.tx_positions) {
      const double half = 0.5 * propagation_distance_derivative(target, range, z, y);
      sum += half;
      sum_sq += half * half;
    }
  }
  DerivativeStats stats;
  stats.beta = sum / count;
  stats.eta = sum_sq / count;
  double dev = 0.0;
  for (double y : array.rx_positions) {
    for (double z : array.tx_positions) {
      const double half = 0.5 * propagation_distance_derivative(target, range, z, y);
      dev += (half - stats.beta) * (half - stats.beta);
    }
  }
  stats.variance = dev / count;
  return stats;
}

}  // namespace detail

// eta = mean of (dr/dR / 2)^2 and beta = mean of dr/dR / 2 over all antenna
// pairs, with exact distances.
inline EtaBeta eta_beta_exact(const ArrayConfig& array, const TargetModel& target, double range) {
  const auto stats = detail::derivative_stats(array, target, range);
  return {stats.eta, stats.beta};
}

// Continuum closed forms; both factors depend on u = R/D only.
inline EtaBeta eta_beta_analytic(NfCase config, double u) {
  detail::require(u > 0.0, "eta_beta_analytic: u = R/D must be positive");
  const double x2 = 1.0 / (2.0 * u);
  const double x4 = 1.0 / (4.0 * u);
  switch (config) {
    case NfCase::pt_simo:
      return {0.25 + 0.5 * u * std::atan(x2) + u * std::asinh(x2),
              0.5 + u * std::asinh(x2)};
    case NfCase::pt_mimo: {
      const double as = std::asinh(x2);
      return {u * std::atan(x2) + 2.0 * u * u * as * as, 2.0 * u * as};
    }
    case NfCase::et_simo:
      return {4.0 * u * std::atan(x4), 4.0 * u * std::asinh(x4)};
    case NfCase::et_mimo:
      return {4.0 * u * std::atan(x2) - 4.0 * u * u * std::log1p(1.0 / (4.0 * u * u)),
              4.0 * u * std::asinh(x2) -
                  8.0 * u * u * detail::sqrt1pm1(1.0 / (4.0 * u * u))};
  }
  throw invalid_parameter("eta_beta_analytic: bad configuration");
}

// Leading-order constant of the (D/R)^4 geometry term.
inline double alpha_factor(NfCase config) {
  switch (config) {
    case NfCase::pt_simo: return 4.0;
    case NfCase::pt_mimo: return 8.0;
    case NfCase::et_simo: return 1.0;
    case NfCase::et_mimo: return 7.0;
  }
  throw unsupported_configuration("alpha_factor: tagged SIMO/MIMO configuration required");
}

namespace detail {

inline CrbBreakdown assemble_crb(const Scenario& s, double eta, double beta, double nf_term,
                                 CrbMethod method) {
  require(s.noise_psd > 0.0 && std::norm(s.gain) > 0.0,
          "crb: SNR must be positive (nonzero gain and noise PSD)");
  const double f_total = s.carrier_hz + s.waveform.central_frequency();
  const double b_rms = s.waveform.rms_bandwidth();
  CrbBreakdown out;
  out.eta = eta;
  out.beta = beta;
  out.nf_geometry_term = nf_term;
  out.phase_term = nf_term * f_total * f_total;
  out.waveform_term = eta * b_rms * b_rms;
  const double information = out.phase_term + out.waveform_term;
  if (!(information > 0.0)) {
    throw degenerate_scenario(
        "crb: no range information (flat geometry and zero RMS bandwidth)");
  }
  const double pair_snr = static_cast<double>(s.array.pair_count()) * s.snr();
  const double factor = 32.0 * pi * pi / (speed_of_light * speed_of_light);
  out.crb = 1.0 / (pair_snr * factor * information);
  out.method = method;
  return out;
}

}  // namespace detail

// Taylor bound: eta -> 1 and eta - beta^2 -> alpha (D/R)^4 / 11520.
inline CrbBreakdown crb_taylor(const Scenario& s) {
  s.validate();
  const NfCase config = classify(s.target.kind, s.array.tag);
  if (!s.range_assumption_holds()) {
    warn("crb_taylor: range below 1.2 D, series expansion unreliable");
  }
  const double ratio = s.array.aperture / s.range;
  const double nf_term = alpha_factor(config) * ratio * ratio * ratio * ratio / 11520.0;
  return detail::assemble_crb(s, 1.0, 1.0, nf_term, CrbMethod::taylor);
}

struct FimOptions {
  double sample_rate_factor = 8.0;   // time sampling at factor * B
  double window_lobes = 2048.0;      // pulse margin, in units of 1/B
  double range_step = 0.0;           // finite-difference step; 0 -> 0.004 lambda
  bool consistency_check = true;     // re-evaluate on a refined grid and compare
};

namespace detail {

struct FimIntegrals {
  cplx n_term;      // (1/(2 N E_c)) sum int mu d(mu*)/dR
  cplx m_term;      // (1/(4 N E_c)) sum int mu d2(mu*)/dR2
  double energy;    // grid-consistent E_c estimate
  double info;      // -Re{M} - |N|^2
};

inline FimIntegrals fim_integrals(const Scenario& s, double sample_rate, double margin,
                                  double step) {
  using lcplx = std::complex<long double>;
  const TargetModel exact{s.target.kind, DistanceMode::exact};
  const double k = s.wavenumber();
  const double dt = 1.0 / sample_rate;

  double d_min = std::numeric_limits<double>::infinity();
  double d_max = -std::numeric_limits<double>::infinity();
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      const double d = propagation_distance(exact, s.range, z, y) / speed_of_light;
      d_min = std::min(d_min, d);
      d_max = std::max(d_max, d);
    }
  }
  const double t_start = d_min - margin;
  const auto n_samples =
      static_cast<size_t>(std::ceil((d_max - d_min + 2.0 * margin) * sample_rate)) + 1;

  const std::array<double, 5> ranges = {s.range, s.range + step, s.range - step,
                                        s.range + 0.5 * step, s.range - 0.5 * step};
  lcplx n_acc{}, m_acc{};
  long double e_acc = 0.0L;
  std::array<std::vector<cplx>, 5> mu;
  for (auto& v : mu) v.resize(n_samples);
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      for (size_t v = 0; v < 5; ++v) {
        const double r = propagation_distance(exact, ranges[v], z, y);
        const cplx phase = std::polar(1.0, -k * r);
        const double delay = r / speed_of_light;
        for (size_t n = 0; n < n_samples; ++n) {
          const double t = t_start + static_cast<double>(n) * dt;
          mu[v][n] = phase * s.waveform.time_sample(t - delay);
        }
      }
      lcplx pair_n{}, pair_m{};
      long double pair_e = 0.0L;
      const double inv_h = 1.0 / step;
      for (size_t n = 0; n < n_samples; ++n) {
        const cplx m0 = mu[0][n];
        // Richardson-extrapolated central differences in R.
        const cplx d1_full = (mu[1][n] - mu[2][n]) * (0.5 * inv_h);
        const cplx d1_half = (mu[3][n] - mu[4][n]) * inv_h;
        const cplx d1 = (4.0 * d1_half - d1_full) / 3.0;
        const cplx d2_full = (mu[1][n] - 2.0 * m0 + mu[2][n]) * (inv_h * inv_h);
        const cplx d2_half = (mu[3][n] - 2.0 * m0 + mu[4][n]) * (4.0 * inv_h * inv_h);
        const cplx d2 = (4.0 * d2_half - d2_full) / 3.0;
        const lcplx m0l(m0.real(), m0.imag());
        pair_n += m0l * lcplx(d1.real(), -d1.imag());
        pair_m += m0l * lcplx(d2.real(), -d2.imag());
        pair_e += std::norm(m0);
      }
      n_acc += pair_n * static_cast<long double>(dt);
      m_acc += pair_m * static_cast<long double>(dt);
      e_acc += pair_e * static_cast<long double>(dt);
    }
  }
  const auto pairs = static_cast<long double>(s.array.pair_count());
  const long double energy = e_acc / pairs;
  const lcplx n_term = n_acc / (2.0L * pairs * energy);
  const lcplx m_term = m_acc / (4.0L * pairs * energy);
  const long double info = -m_term.real() - std::norm(n_term);
  FimIntegrals out;
  out.n_term = cplx(static_cast<double>(n_term.real()), static_cast<double>(n_term.imag()));
  out.m_term = cplx(static_cast<double>(m_term.real()), static_cast<double>(m_term.imag()));
  out.energy = static_cast<double>(energy);
  out.info = static_cast<double>(info);
  return out;
}

inline FimIntegrals fim_integrals_checked(const Scenario& s, const FimOptions& options) {
  s.validate();
  detail::require(s.noise_psd > 0.0 && std::norm(s.gain) > 0.0,
                  "fim_oracle: SNR must be positive");
  const double bandwidth = s.waveform.bandwidth();
  const double sample_rate = options.sample_rate_factor * bandwidth;
  detail::require(options.sample_rate_factor >= 8.0,
                  "fim_oracle: sample_rate_factor must be >= 8");
  const double margin =
      std::min(options.window_lobes / bandwidth, s.waveform.time_halfwidth());
  const double step =
      options.range_step > 0.0 ? options.range_step : 0.004 * s.wavelength();
  const FimIntegrals base = fim_integrals(s, sample_rate, margin, step);
  if (!std::isfinite(base.info)) {
    throw numerical_accuracy_error("fim_oracle: information integral did not converge");
  }
  if (base.info <= 0.0) {
    throw degenerate_scenario("fim_oracle: Fisher information about range vanished");
  }
  if (options.consistency_check) {
    const double margin_fine =
        std::min(1.5 * options.window_lobes / bandwidth, s.waveform.time_halfwidth());
    const FimIntegrals fine = fim_integrals(s, 2.0 * sample_rate, margin_fine, step);
    if (!(fine.info > 0.0) ||
        std::abs(fine.info - base.info) > 3e-4 * std::abs(fine.info)) {
      throw numerical_accuracy_error(
          "fim_oracle: quadrature did not converge (refined grid disagrees)");
    }
    return fine;
  }
  return base;
}

}  // namespace detail

// Numerical Fisher-information bound from the proof construction:
// CRB = gamma_n / (8 |xi|^2 E_c N_r N_t (-Re{M} - |N|^2)).
inline CrbBreakdown fim_oracle(const Scenario& s, const FimOptions& options = {}) {
  const auto integrals = detail::fim_integrals_checked(s, options);
  CrbBreakdown out;
  out.crb = s.noise_psd / (8.0 * std::norm(s.gain) * integrals.energy *
                           static_cast<double>(s.array.pair_count()) * integrals.info);
  out.method = CrbMethod::numerical_fim;
  return out;
}

// The assembled 3x3 Fisher information matrix in (Re xi, Im xi, R); exposed
// for diagnostics.
inline std::array<std::array<double, 3>, 3> fim_oracle_matrix(const Scenario& s,
                                                              const FimOptions& options = {}) {
  const auto integrals = detail::fim_integrals_checked(s, options);
  const double scale = 8.0 * static_cast<double>(s.array.pair_count()) * integrals.energy /
                       s.noise_psd;
  const cplx gain_n = s.gain * integrals.n_term;
  std::array<std::array<double, 3>, 3> fim{};
  fim[0][0] = scale * 0.25;
  fim[0][1] = 0.0;
  fim[0][2] = scale * (-0.5 * gain_n.real());
  fim[1][0] = 0.0;
  fim[1][1] = scale * 0.25;
  fim[1][2] = scale * (-0.5 * gain_n.imag());
  fim[2][0] = fim[0][2];
  fim[2][1] = fim[1][2];
  fim[2][2] = scale * (-std::norm(s.gain) * integrals.m_term.real());
  return fim;
}

// Bound with the requested method; the breakdown carries all intermediate
// terms of the denominator.
inline CrbBreakdown crb_range(const Scenario& s, CrbMethod method) {
  s.validate();
  switch (method) {
    case CrbMethod::exact_sum: {
      const auto stats = detail::derivative_stats(s.array, s.target, s.range);
      return detail::assemble_crb(s, stats.eta, stats.beta, stats.variance,
                                  CrbMethod::exact_sum);
    }
    case CrbMethod::analytic: {
      const NfCase config = classify(s.target.kind, s.array.tag);
      const auto eb = eta_beta_analytic(config, s.range / s.array.aperture);
      return detail::assemble_crb(s, eb.eta, eb.beta, eb.eta - eb.beta * eb.beta,
                                  CrbMethod::analytic);
    }
    case CrbMethod::taylor:
      return crb_taylor(s);
    case CrbMethod::numerical_fim:
      return fim_oracle(s);
  }
  throw invalid_parameter("crb_range: bad method");
}

// Range at which the geometry and waveform terms of the Taylor bound are
// equal: R = D sqrt((f_c + f_M)/B_RMS) (alpha/11520)^{1/4}.
inline double effective_nf_range(NfCase config, double aperture, double carrier_hz,
                                 double central_frequency, double rms_bandwidth) {
  detail::require(aperture > 0.0, "effective_nf_range: aperture must be positive");
  detail::require(carrier_hz + central_frequency > 0.0,
                  "effective_nf_range: total frequency must be positive");
  detail::require(rms_bandwidth > 0.0,
                  "effective_nf_range: zero RMS bandwidth makes the NF region unbounded");
  return aperture * std::sqrt((carrier_hz + central_frequency) / rms_bandwidth) *
         std::pow(alpha_factor(config) / 11520.0, 0.25);
}

}  // namespace nfre
