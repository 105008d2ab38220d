#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nfre/crb.hpp"

using nfre::ArrayConfig;
using nfre::CrbMethod;
using nfre::NfCase;
using nfre::Scenario;
using nfre::TargetKind;

namespace {

Scenario et_mimo_scenario(double range = 10.0) {
  Scenario s;
  s.carrier_hz = 24e9;
  s.range = range;
  s.noise_psd = 1e-1;  // 10 dB for unit energy, unit gain
  s.waveform = nfre::Waveform::cardinal_sine(100e6, 1.0);
  s.array = ArrayConfig::mimo(25, 25, 1.5);
  s.target = {TargetKind::extended, nfre::DistanceMode::exact};
  return s;
}

constexpr NfCase kCases[] = {NfCase::pt_simo, NfCase::pt_mimo, NfCase::et_simo,
                             NfCase::et_mimo};

Scenario case_scenario(NfCase config, double range, int n, double aperture) {
  Scenario s = et_mimo_scenario(range);
  const bool mimo = config == NfCase::pt_mimo || config == NfCase::et_mimo;
  s.array = mimo ? ArrayConfig::mimo(n, n, aperture) : ArrayConfig::simo(n, aperture);
  const bool point = config == NfCase::pt_simo || config == NfCase::pt_mimo;
  s.target.kind = point ? TargetKind::point : TargetKind::extended;
  return s;
}

}  // namespace

TEST_CASE("eta/beta exact sums: boresight and plane-wave limits") {
  const nfre::TargetModel pt{TargetKind::point, nfre::DistanceMode::exact};
  const auto single = ArrayConfig::custom({0.0}, {0.0});
  const auto eb = nfre::eta_beta_exact(single, pt, 10.0);
  CHECK(eb.eta == 1.0);
  CHECK(eb.beta == 1.0);

  const auto arr = ArrayConfig::mimo(9, 9, 1.5);
  for (TargetKind kind : {TargetKind::point, TargetKind::extended}) {
    const nfre::TargetModel model{kind, nfre::DistanceMode::exact};
    const auto far = nfre::eta_beta_exact(arr, model, 1.5e6);
    CHECK(far.eta == Catch::Approx(1.0).epsilon(1e-6));
    CHECK(far.beta == Catch::Approx(1.0).epsilon(1e-6));
    // Jensen: beta^2 <= eta <= 1.
    for (double r : {2.0, 5.0, 20.0}) {
      const auto eb2 = nfre::eta_beta_exact(arr, model, r);
      CHECK(eb2.beta * eb2.beta <= eb2.eta);
      CHECK(eb2.eta <= 1.0);
      CHECK(eb2.beta > 0.0);
    }
  }
  CHECK_THROWS_AS(nfre::eta_beta_exact(arr, pt, -2.0), nfre::invalid_parameter);
}

TEST_CASE("analytic eta/beta closed forms") {
  // ET-SIMO at u = 1: 4 atan(1/4) and 4 asinh(1/4).
  const auto eb = nfre::eta_beta_analytic(NfCase::et_simo, 1.0);
  CHECK(eb.eta == Catch::Approx(4.0 * std::atan(0.25)).epsilon(1e-15));
  CHECK(eb.beta == Catch::Approx(4.0 * std::asinh(0.25)).epsilon(1e-15));
  CHECK(eb.eta == Catch::Approx(0.97991465250745657).epsilon(1e-12));
  CHECK(eb.beta == Catch::Approx(0.98986584618905385).epsilon(1e-12));

  // PT-SIMO far-field limit: 1/4 + 1/4 + 1/2 = 1 and 1/2 + 1/2 = 1.
  const auto far = nfre::eta_beta_analytic(NfCase::pt_simo, 1e7);
  CHECK(far.eta == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(far.beta == Catch::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(nfre::eta_beta_analytic(NfCase::pt_simo, 0.0), nfre::invalid_parameter);
}

TEST_CASE("analytic forms agree with dense exact sums") {
  const double aperture = 1.5;
  // Endpoint-inclusive arrays converge to the continuum forms at O(1/N);
  // at N = 1024 the residual bias is measured at ~1.3e-4 in the worst case.
  for (NfCase config : kCases) {
    for (double u : {1.0, 2.0, 5.0, 10.0}) {
      const Scenario s = case_scenario(config, u * aperture, 1024, aperture);
      const auto exact = nfre::eta_beta_exact(s.array, s.target, s.range);
      const auto analytic = nfre::eta_beta_analytic(config, u);
      INFO(nfre::to_string(config) << " u=" << u);
      CHECK(std::abs(exact.eta - analytic.eta) < 2e-4);
      CHECK(std::abs(exact.beta - analytic.beta) < 2e-4);
    }
  }
}

TEST_CASE("alpha constants") {
  CHECK(nfre::alpha_factor(NfCase::pt_simo) == 4.0);
  CHECK(nfre::alpha_factor(NfCase::pt_mimo) == 8.0);
  CHECK(nfre::alpha_factor(NfCase::et_simo) == 1.0);
  CHECK(nfre::alpha_factor(NfCase::et_mimo) == 7.0);
  CHECK_THROWS_AS(nfre::classify(TargetKind::point, nfre::ArrayTag::custom),
                  nfre::unsupported_configuration);
}

TEST_CASE("geometry term obeys the alpha power law at large u") {
  const double u = 50.0;
  for (NfCase config : kCases) {
    const auto eb = nfre::eta_beta_analytic(config, u);
    const double scaled = 11520.0 * (eb.eta - eb.beta * eb.beta) * u * u * u * u;
    INFO(nfre::to_string(config));
    CHECK(scaled == Catch::Approx(nfre::alpha_factor(config)).epsilon(0.02));
  }
}

TEST_CASE("variance identity for the geometry term") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double aperture = 0.5 + uni(rng);
    const int n_tx = 1 + static_cast<int>(uni(rng) * 6.0);
    const int n_rx = 1 + static_cast<int>(uni(rng) * 6.0);
    std::uniform_real_distribution<double> pos(-aperture / 2.0, aperture / 2.0);
    Scenario s = et_mimo_scenario(1.5 * aperture + 10.0 * uni(rng));
    s.array.tx_positions.assign(static_cast<size_t>(n_tx), 0.0);
    s.array.rx_positions.assign(static_cast<size_t>(n_rx), 0.0);
    for (double& z : s.array.tx_positions) z = pos(rng);
    for (double& y : s.array.rx_positions) y = pos(rng);
    s.array.aperture = aperture;
    s.array.tag = nfre::ArrayTag::custom;
    s.target.kind = uni(rng) < 0.5 ? TargetKind::point : TargetKind::extended;

    const auto breakdown = nfre::crb_range(s, CrbMethod::exact_sum);
    // Independent mean-of-squared-deviations evaluation.
    const auto eb = nfre::eta_beta_exact(s.array, s.target, s.range);
    double dev = 0.0;
    for (double y : s.array.rx_positions) {
      for (double z : s.array.tx_positions) {
        const double half =
            0.5 * nfre::propagation_distance_derivative(s.target, s.range, z, y);
        dev += (half - eb.beta) * (half - eb.beta);
      }
    }
    dev /= static_cast<double>(s.array.pair_count());
    CHECK(breakdown.nf_geometry_term == Catch::Approx(dev).margin(1e-12));
    CHECK(breakdown.nf_geometry_term >= 0.0);
    CHECK(breakdown.eta == Catch::Approx(eb.eta).epsilon(1e-15));
  }
  // Geometry term vanishes in the far field.
  Scenario far = et_mimo_scenario(1.5e7);
  CHECK(nfre::crb_range(far, CrbMethod::exact_sum).nf_geometry_term < 1e-12);
}

TEST_CASE("crb scaling and shape") {
  const Scenario s = et_mimo_scenario(10.0);
  const auto base = nfre::crb_range(s, CrbMethod::exact_sum);
  CHECK(base.crb > 0.0);

  Scenario louder = s;
  louder.noise_psd = s.noise_psd / 10.0;  // x10 SNR
  CHECK(nfre::crb_range(louder, CrbMethod::exact_sum).crb ==
        Catch::Approx(base.crb / 10.0).epsilon(1e-12));

  // CRB grows with range in the NF region and saturates at the waveform
  // limit for large ranges.
  const double b_rms = s.waveform.rms_bandwidth();
  const double saturation =
      1.0 / (static_cast<double>(s.array.pair_count()) * s.snr() * 32.0 * nfre::pi *
             nfre::pi / (nfre::speed_of_light * nfre::speed_of_light) * b_rms * b_rms);
  double previous = 0.0;
  for (double r : {2.0, 4.0, 8.0, 16.0}) {
    Scenario sr = s;
    sr.range = r;
    const double crb = nfre::crb_range(sr, CrbMethod::exact_sum).crb;
    CHECK(crb > previous);
    CHECK(crb < saturation);
    previous = crb;
  }
  Scenario far = s;
  far.range = 2e5;
  CHECK(nfre::crb_range(far, CrbMethod::exact_sum).crb ==
        Catch::Approx(saturation).epsilon(1e-3));
}

TEST_CASE("crb error contracts") {
  Scenario s = et_mimo_scenario(10.0);
  s.gain = {0.0, 0.0};
  CHECK_THROWS_AS(nfre::crb_range(s, CrbMethod::exact_sum), nfre::invalid_parameter);
  s.gain = {1.0, 0.0};
  s.noise_psd = 0.0;
  CHECK_THROWS_AS(nfre::crb_range(s, CrbMethod::exact_sum), nfre::invalid_parameter);

  Scenario custom = et_mimo_scenario(10.0);
  custom.array = ArrayConfig::custom({-0.3, 0.3}, {-0.3, 0.3});
  CHECK_THROWS_AS(nfre::crb_range(custom, CrbMethod::analytic),
                  nfre::unsupported_configuration);
  CHECK_THROWS_AS(nfre::crb_range(custom, CrbMethod::taylor),
                  nfre::unsupported_configuration);
}

TEST_CASE("zero-bandwidth limit is a degenerate scenario") {
  // Pure tone realized as an infinitesimally narrow spectrum: B_RMS
  // underflows to exactly zero, and a single boresight pair has no
  // geometry diversity, so no observable carries range information.
  Scenario s;
  s.carrier_hz = 24e9;
  s.range = 10.0;
  s.waveform = nfre::Waveform::from_spectrum({-5e-161, 5e-161}, {1.0, 1.0});
  REQUIRE(s.waveform.rms_bandwidth() == 0.0);
  s.noise_psd = s.waveform.energy() / 1000.0;
  s.array = ArrayConfig::custom({0.0}, {0.0});
  s.target = {TargetKind::point, nfre::DistanceMode::exact};
  CHECK_THROWS_AS(nfre::crb_range(s, CrbMethod::exact_sum), nfre::degenerate_scenario);
}

TEST_CASE("taylor bound structure") {
  const Scenario s = et_mimo_scenario(10.0);
  const auto t1 = nfre::crb_taylor(s);
  CHECK(t1.eta == 1.0);

  // (D/R)^4 power law, exact ratio.
  Scenario s2 = s;
  s2.range = 23.0;
  const auto t2 = nfre::crb_taylor(s2);
  const double ratio = (s2.range / s.range);
  CHECK(t1.nf_geometry_term / t2.nf_geometry_term ==
        Catch::Approx(ratio * ratio * ratio * ratio).epsilon(1e-12));

  // Equivalent apertures: ET-MIMO at D (8/7)^{1/4} matches PT-MIMO at D.
  const double factor = std::pow(8.0 / 7.0, 0.25);
  CHECK(factor == Catch::Approx(1.03).margin(0.005));
  Scenario et = s;
  et.array = ArrayConfig::mimo(25, 25, 1.5 * factor);
  Scenario pt = s;
  pt.target.kind = TargetKind::point;
  CHECK(nfre::crb_taylor(et).nf_geometry_term ==
        Catch::Approx(nfre::crb_taylor(pt).nf_geometry_term).epsilon(1e-12));
}

TEST_CASE("taylor tracks the analytic bound for moderate u") {
  // A 600 MHz waveform at 24 GHz keeps the geometry term dominant at u = 2
  // while its O(u^-2) Taylor truncation stays inside the 5% budget.
  for (NfCase config : kCases) {
    for (double u : {2.0, 5.0, 12.0, 20.0}) {
      Scenario s = case_scenario(config, 1.5 * u, 25, 1.5);
      s.waveform = nfre::Waveform::cardinal_sine(600e6, 1.0);
      const double taylor = nfre::crb_taylor(s).crb;
      const double analytic = nfre::crb_range(s, CrbMethod::analytic).crb;
      INFO(nfre::to_string(config) << " u=" << u);
      CHECK(std::abs(taylor - analytic) / analytic < 0.05);
      if (u >= 5.0) {
        // At moderate u the 25-element discretization bias is small enough
        // for the exact sums to sit inside the same envelope.
        const double exact = nfre::crb_range(s, CrbMethod::exact_sum).crb;
        CHECK(std::abs(taylor - exact) / exact < 0.05);
      }
    }
  }
}

TEST_CASE("taylor warns below the range assumption") {
  std::vector<std::string> warnings;
  nfre::set_warning_handler([&](const std::string& msg) { warnings.push_back(msg); });
  Scenario s = et_mimo_scenario(1.0);  // R < 1.2 D
  (void)nfre::crb_taylor(s);
  nfre::set_warning_handler(nullptr);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("1.2") != std::string::npos);
}

TEST_CASE("effective near-field range") {
  const double aperture = 1.5, fc = 24e9, fm = 0.0;
  const double b_rms = 100e6 / std::sqrt(12.0);
  for (NfCase config : kCases) {
    const double r = nfre::effective_nf_range(config, aperture, fc, fm, b_rms);
    // Defining equality: geometry term equals waveform term at R = R_NF,eff.
    const double lhs = nfre::alpha_factor(config) * (fc + fm) * (fc + fm) *
                       std::pow(aperture / r, 4.0) / 11520.0;
    CHECK(lhs == Catch::Approx(b_rms * b_rms).epsilon(1e-12));
  }
  // Hand value for ET-MIMO (the stated Eq. parameters).
  CHECK(nfre::effective_nf_range(NfCase::et_mimo, aperture, fc, fm, b_rms) ==
        Catch::Approx(6.7905).margin(2e-3));
  // sqrt dependence on B_RMS.
  const double r1 = nfre::effective_nf_range(NfCase::et_simo, aperture, fc, fm, b_rms);
  const double r4 = nfre::effective_nf_range(NfCase::et_simo, aperture, fc, fm, 4.0 * b_rms);
  CHECK(r1 == Catch::Approx(2.0 * r4).epsilon(1e-14));
  CHECK_THROWS_AS(nfre::effective_nf_range(NfCase::et_simo, aperture, fc, fm, 0.0),
                  nfre::invalid_parameter);
}

namespace {

Scenario fim_friendly_scenario(TargetKind kind, int n_tx, int n_rx) {
  // Moderate f_c / B keeps the information subtraction well conditioned for
  // the numerical oracle.
  Scenario s;
  s.carrier_hz = 2e9;
  s.range = 2.0;
  s.noise_psd = 2e-3;
  s.waveform = nfre::Waveform::cardinal_sine(400e6, 1.0);
  s.array = n_tx == 1 && n_rx == 1 ? ArrayConfig::custom({0.0}, {0.0})
                                   : ArrayConfig::mimo(n_tx, n_rx, 1.0);
  s.target = {kind, nfre::DistanceMode::exact};
  return s;
}

}  // namespace

TEST_CASE("fim oracle agrees with the closed-form bound") {
  // Single boresight pair: eta = beta = 1, no geometry term.
  const Scenario single = fim_friendly_scenario(TargetKind::point, 1, 1);
  const double closed = nfre::crb_range(single, CrbMethod::exact_sum).crb;
  const double oracle = nfre::fim_oracle(single).crb;
  CHECK(oracle == Catch::Approx(closed).epsilon(1e-3));

  // Small extended-target MIMO case.
  const Scenario mimo = fim_friendly_scenario(TargetKind::extended, 4, 4);
  const double closed_m = nfre::crb_range(mimo, CrbMethod::exact_sum).crb;
  const double oracle_m = nfre::fim_oracle(mimo).crb;
  CHECK(oracle_m == Catch::Approx(closed_m).epsilon(1e-3));
  CHECK(nfre::crb_range(mimo, CrbMethod::numerical_fim).crb ==
        Catch::Approx(oracle_m).epsilon(1e-12));
}

TEST_CASE("assembled fisher matrix is symmetric with positive diagonal") {
  Scenario s = fim_friendly_scenario(TargetKind::extended, 2, 3);
  s.gain = std::polar(1.3, 0.7);
  const auto fim = nfre::fim_oracle_matrix(s);
  const double scale = std::abs(fim[0][0]);
  for (int i = 0; i < 3; ++i) {
    CHECK(fim[i][i] > 0.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(fim[i][j] - fim[j][i]) <= 1e-10 * scale);
    }
  }
}
