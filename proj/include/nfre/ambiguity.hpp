#pragma once

// Normalized ambiguity functions of the maximum-likelihood range estimator:
// the exact per-pair sum, the Fresnel phase-shift sum, the waveform x phase
// product approximation, the closed forms in the single parameter beta, and
// the extended-target-estimated-as-point-target mismatch form.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nfre/array_geometry.hpp"
#include "nfre/common.hpp"
#include "nfre/scenario.hpp"
#include "nfre/special_functions.hpp"

namespace nfre {

enum class AmbiguityMethod { exact_sum, product, analytic, mismatch };

inline const char* to_string(AmbiguityMethod m) {
  switch (m) {
    case AmbiguityMethod::exact_sum: return "exact";
    case AmbiguityMethod::product: return "product";
    case AmbiguityMethod::analytic: return "analytic";
    case AmbiguityMethod::mismatch: return "mismatch";
  }
  return "?";
}

struct AmbiguitySample {
  double rho = 0.0;
  double chi_total = 0.0;
  // Factor breakdown; NaN when the method does not define it.
  double chi_waveform = std::numeric_limits<double>::quiet_NaN();
  double chi_phase = std::numeric_limits<double>::quiet_NaN();
  AmbiguityMethod method = AmbiguityMethod::exact_sum;
};

// The four tagged geometry/target combinations with closed-form results.
enum class NfCase { pt_simo, pt_mimo, et_simo, et_mimo };

inline const char* to_string(NfCase c) {
  switch (c) {
    case NfCase::pt_simo: return "pt_simo";
    case NfCase::pt_mimo: return "pt_mimo";
    case NfCase::et_simo: return "et_simo";
    case NfCase::et_mimo: return "et_mimo";
  }
  return "?";
}

inline NfCase classify(TargetKind kind, ArrayTag tag) {
  if (tag == ArrayTag::custom) {
    throw unsupported_configuration("closed forms exist for tagged SIMO/MIMO layouts only");
  }
  if (kind == TargetKind::point) {
    return tag == ArrayTag::simo ? NfCase::pt_simo : NfCase::pt_mimo;
  }
  return tag == ArrayTag::simo ? NfCase::et_simo : NfCase::et_mimo;
}

namespace detail {

inline void check_assumptions(const Scenario& s, const char* who) {
  if (!s.range_assumption_holds()) {
    warn(std::string(who) + ": range below 1.2 D, Fresnel distance assumption violated");
  }
  if (!s.bandwidth_assumption_holds()) {
    warn(std::string(who) + ": range below R_D B/f_c, waveform-term factorization degraded");
  }
}

}  // namespace detail

// Exact normalized ambiguity: |mean over pairs of e^{jk(rho_p - r_p)} C((rho_p - r_p)/c)| / E_c,
// with exact propagation distances. Equals 1 at rho = R.
inline AmbiguitySample chi_exact(const Scenario& s, double rho) {
  detail::require(rho > 0.0, "chi_exact: hypothesized range must be positive");
  const TargetModel exact{s.target.kind, DistanceMode::exact};
  const double k = s.wavenumber();
  const double energy = s.waveform.energy();
  cplx acc{0.0, 0.0};
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      const double delta = propagation_distance(exact, rho, z, y) -
                           propagation_distance(exact, s.range, z, y);
      // Normalized per term so the matched hypothesis sums to exactly 1.
      acc += std::polar(1.0, k * delta) *
             (s.waveform.autocorrelation(delta / speed_of_light) / energy);
    }
  }
  AmbiguitySample out;
  out.rho = rho;
  out.chi_total = std::abs(acc) / static_cast<double>(s.array.pair_count());
  out.method = AmbiguityMethod::exact_sum;
  return out;
}

// Phase-shift ambiguity: |mean over pairs of e^{jk(rho~_p - r~_p)}| with
// Fresnel distances.
inline double chi_phase(const Scenario& s, double rho) {
  detail::require(rho > 0.0, "chi_phase: hypothesized range must be positive");
  const TargetModel fresnel{s.target.kind, DistanceMode::fresnel};
  const double k = s.wavenumber();
  cplx acc{0.0, 0.0};
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      const double delta = propagation_distance(fresnel, rho, z, y) -
                           propagation_distance(fresnel, s.range, z, y);
      acc += std::polar(1.0, k * delta);
    }
  }
  return std::abs(acc) / static_cast<double>(s.array.pair_count());
}

// |C(2(rho - R)/c)| / E_c, the classical waveform ambiguity factor.
inline double chi_waveform_factor(const Scenario& s, double rho) {
  return std::abs(s.waveform.autocorrelation(2.0 * (rho - s.range) / speed_of_light)) /
         s.waveform.energy();
}

// Product approximation chi ~ chi_C(rho - R) * chi_phase(rho, R). Warns when
// the backing assumptions fail; callers doing grid sweeps can silence the
// repeated check.
inline AmbiguitySample chi_product(const Scenario& s, double rho, bool warn_on_assumptions = true) {
  detail::require(rho > 0.0, "chi_product: hypothesized range must be positive");
  if (warn_on_assumptions) detail::check_assumptions(s, "chi_product");
  AmbiguitySample out;
  out.rho = rho;
  out.chi_waveform = chi_waveform_factor(s, rho);
  out.chi_phase = chi_phase(s, rho);
  out.chi_total = out.chi_waveform * out.chi_phase;
  out.method = AmbiguityMethod::product;
  return out;
}

// beta = sqrt(R_D |1/rho - 1/R|); the single argument of the closed forms.
inline double beta_param(double rho, double range, double rayleigh) {
  detail::require(rho > 0.0 && range > 0.0, "beta_param: ranges must be positive");
  detail::require(rayleigh > 0.0, "beta_param: Rayleigh distance must be positive");
  return std::sqrt(rayleigh * std::abs(1.0 / rho - 1.0 / range));
}

namespace detail {

// |2 F(x/2) / x|, continued with its limit value 1 at x = 0.
inline double chi_aperture_closed(double x) {
  if (x < 1e-6) return 1.0;
  return std::abs(2.0 * fresnel(x / 2.0) / x);
}

// |2 F(x)/x - e^{j pi x^2/4} sinc(x^2/4)|, limit value 1 at x = 0.
inline double chi_aperture_pair_closed(double x) {
  if (x < 1e-6) return 1.0;
  const cplx first = 2.0 * fresnel(x) / x;
  const cplx second = std::polar(sinc(x * x / 4.0), pi * x * x / 4.0);
  return std::abs(first - second);
}

}  // namespace detail

// Closed-form phase-shift ambiguity for the tagged configurations, as a
// function of beta.
inline double chi_phase_analytic(NfCase config, double beta) {
  detail::require(beta >= 0.0, "chi_phase_analytic: beta must be nonnegative");
  switch (config) {
    case NfCase::pt_simo: return detail::chi_aperture_closed(beta);
    case NfCase::pt_mimo: {
      const double v = detail::chi_aperture_closed(beta);
      return v * v;
    }
    case NfCase::et_simo: return detail::chi_aperture_closed(beta / std::sqrt(2.0));
    case NfCase::et_mimo: return detail::chi_aperture_pair_closed(beta / std::sqrt(2.0));
  }
  throw invalid_parameter("chi_phase_analytic: bad configuration");
}

// Ambiguity of estimating an extended target with a point-target model
// (SIMO only). The phase factor peaks at rho = 2R; the waveform factor
// still peaks at rho = R.
inline AmbiguitySample chi_mismatch(const Scenario& s, double rho) {
  detail::require(rho > 0.0, "chi_mismatch: hypothesized range must be positive");
  if (s.array.tag != ArrayTag::simo) {
    throw unsupported_configuration("chi_mismatch: derived for SIMO arrays only");
  }
  const double gamma = std::sqrt(s.rayleigh() * std::abs(2.0 / rho - 1.0 / s.range));
  AmbiguitySample out;
  out.rho = rho;
  out.chi_waveform = chi_waveform_factor(s, rho);
  out.chi_phase = detail::chi_aperture_closed(gamma / std::sqrt(2.0));
  out.chi_total = out.chi_waveform * out.chi_phase;
  out.method = AmbiguityMethod::mismatch;
  return out;
}

// Batch evaluation over a strictly increasing grid of hypothesized ranges.
inline std::vector<AmbiguitySample> ambiguity_surface(const Scenario& s,
                                                      const std::vector<double>& rho_grid,
                                                      AmbiguityMethod method) {
  detail::require(!rho_grid.empty(), "ambiguity_surface: empty grid");
  for (size_t i = 0; i + 1 < rho_grid.size(); ++i) {
    detail::require(rho_grid[i] < rho_grid[i + 1], "ambiguity_surface: grid must be increasing");
  }
  if (method == AmbiguityMethod::product) detail::check_assumptions(s, "ambiguity_surface");
  std::vector<AmbiguitySample> out;
  out.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    switch (method) {
      case AmbiguityMethod::exact_sum:
        out.push_back(chi_exact(s, rho));
        break;
      case AmbiguityMethod::product:
        out.push_back(chi_product(s, rho, false));
        break;
      case AmbiguityMethod::analytic: {
        AmbiguitySample sample;
        sample.rho = rho;
        sample.chi_waveform = chi_waveform_factor(s, rho);
        sample.chi_phase = chi_phase_analytic(classify(s.target.kind, s.array.tag),
                                              beta_param(rho, s.range, s.rayleigh()));
        sample.chi_total = sample.chi_waveform * sample.chi_phase;
        sample.method = AmbiguityMethod::analytic;
        out.push_back(sample);
        break;
      }
      case AmbiguityMethod::mismatch:
        out.push_back(chi_mismatch(s, rho));
        break;
    }
  }
  return out;
}

}  // namespace nfre
