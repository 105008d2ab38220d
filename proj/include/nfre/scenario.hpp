#pragma once

// Full experiment description: carrier, true range, complex gain, noise
// level, waveform, array layout and target model, plus the derived
// quantities (wavenumber, SNR, Rayleigh distance) and the validity flags of
// the two approximation assumptions used by the product-form ambiguity.

#include <cmath>
#include <complex>

#include "nfre/array_geometry.hpp"
#include "nfre/common.hpp"
#include "nfre/waveform.hpp"

namespace nfre {

struct Scenario {
  double carrier_hz = 0.0;   // f_c
  double range = 0.0;        // R, true target range in m
  cplx gain{1.0, 0.0};       // xi
  double noise_psd = 0.0;    // gamma_n
  Waveform waveform = Waveform::cardinal_sine(1.0, 1.0);
  ArrayConfig array;
  TargetModel target;

  double wavelength() const { return speed_of_light / carrier_hz; }
  double wavenumber() const { return 2.0 * pi * carrier_hz / speed_of_light; }
  double rayleigh() const { return rayleigh_distance(array.aperture, carrier_hz); }

  // SNR = |xi|^2 E_c / gamma_n.
  double snr() const {
    detail::require(noise_psd > 0.0, "scenario: SNR undefined for zero noise PSD");
    return std::norm(gain) * waveform.energy() / noise_psd;
  }

  // Assumption 1: R >= 1.2 D.
  bool range_assumption_holds() const { return range >= 1.2 * array.aperture; }

  // Assumption 2: R >= R_D B / f_c.
  bool bandwidth_assumption_holds() const {
    return range >= rayleigh() * waveform.bandwidth() / carrier_hz;
  }

  void validate() const {
    detail::require(carrier_hz > 0.0, "scenario: carrier must be positive");
    detail::require(range > 0.0, "scenario: range must be positive");
    detail::require(noise_psd >= 0.0, "scenario: noise PSD must be nonnegative");
    array.validate();
  }
};

// Builds gamma_n from a target SNR in dB for gain xi and waveform energy E_c.
inline double noise_psd_for_snr_db(double snr_db, const cplx& gain, const Waveform& waveform) {
  const double snr = std::pow(10.0, snr_db / 10.0);
  detail::require(snr > 0.0, "noise_psd_for_snr_db: SNR must be positive");
  return std::norm(gain) * waveform.energy() / snr;
}

}  // namespace nfre
