#pragma once

// Antenna layouts and target geometry: uniform linear arrays on the z axis,
// point / extended target propagation distances in exact and Fresnel form,
// their range derivatives, and the Rayleigh distance.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nfre/common.hpp"

namespace nfre {

enum class ArrayTag { simo, mimo, custom };
enum class TargetKind { point, extended };
enum class DistanceMode { exact, fresnel };

struct TargetModel {
  TargetKind kind = TargetKind::point;
  DistanceMode mode = DistanceMode::exact;
};

// N uniformly spaced positions centered at 0 spanning [-span/2, span/2].
inline std::vector<double> make_ula(int count, double span) {
  detail::require(count >= 1, "make_ula: need at least one element");
  detail::require(span >= 0.0, "make_ula: span must be nonnegative");
  if (count == 1) return {0.0};
  std::vector<double> positions(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    positions[static_cast<size_t>(i)] =
        span * (static_cast<double>(i) / (count - 1) - 0.5);
  }
  return positions;
}

struct ArrayConfig {
  std::vector<double> tx_positions;
  std::vector<double> rx_positions;
  double aperture = 0.0;  // D
  ArrayTag tag = ArrayTag::custom;

  static ArrayConfig simo(int n_rx, double aperture) {
    detail::require(aperture > 0.0, "simo: aperture must be positive");
    ArrayConfig a;
    a.tx_positions = {0.0};
    a.rx_positions = make_ula(n_rx, aperture);
    a.aperture = aperture;
    a.tag = ArrayTag::simo;
    return a;
  }

  static ArrayConfig mimo(int n_tx, int n_rx, double aperture) {
    detail::require(aperture > 0.0, "mimo: aperture must be positive");
    ArrayConfig a;
    a.tx_positions = make_ula(n_tx, aperture);
    a.rx_positions = make_ula(n_rx, aperture);
    a.aperture = aperture;
    a.tag = ArrayTag::mimo;
    return a;
  }

  // Aperture of a custom layout is the larger of the two array spans; both
  // arrays must be centered so that no element exceeds D/2.
  static ArrayConfig custom(std::vector<double> tx, std::vector<double> rx) {
    detail::require(!tx.empty() && !rx.empty(), "custom array: both arrays need elements");
    const auto span = [](const std::vector<double>& p) {
      const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
      return *hi - *lo;
    };
    ArrayConfig a;
    a.aperture = std::max(span(tx), span(rx));
    a.tx_positions = std::move(tx);
    a.rx_positions = std::move(rx);
    a.tag = ArrayTag::custom;
    a.validate();
    return a;
  }

  // Text file: one position per line, '#' comments, sections [tx] and [rx].
  static ArrayConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open array layout file: " + path);
    std::vector<double> tx, rx;
    std::vector<double>* section = nullptr;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      std::string token;
      if (!(row >> token)) continue;
      if (token == "[tx]") {
        section = &tx;
        continue;
      }
      if (token == "[rx]") {
        section = &rx;
        continue;
      }
      if (!section) {
        throw io_error("array layout file " + path + ": line " + std::to_string(line_no) +
                       " appears before any [tx]/[rx] section");
      }
      try {
        section->push_back(std::stod(token));
      } catch (const std::exception&) {
        throw io_error("array layout file " + path + ": line " + std::to_string(line_no) +
                       " is not a number");
      }
    }
    try {
      return custom(std::move(tx), std::move(rx));
    } catch (const invalid_parameter& e) {
      throw io_error("array layout file " + path + ": " + e.what());
    }
  }

  int n_tx() const { return static_cast<int>(tx_positions.size()); }
  int n_rx() const { return static_cast<int>(rx_positions.size()); }
  size_t pair_count() const { return tx_positions.size() * rx_positions.size(); }

  void validate() const {
    detail::require(!tx_positions.empty() && !rx_positions.empty(),
                    "array: both arrays need at least one element");
    detail::require(aperture >= 0.0, "array: aperture must be nonnegative");
    const double limit = aperture / 2.0 + 1e-9 * std::max(aperture, 1.0);
    for (double z : tx_positions) {
      detail::require(std::abs(z) <= limit, "array: tx element outside aperture D/2");
    }
    for (double y : rx_positions) {
      detail::require(std::abs(y) <= limit, "array: rx element outside aperture D/2");
    }
    if (tag == ArrayTag::simo) {
      detail::require(tx_positions.size() == 1 && tx_positions[0] == 0.0,
                      "array: SIMO requires a single transmit element at z = 0");
    }
  }
};

// Round-trip propagation distance between a transmit element at z and a
// receive element at y for a target at range R. Always >= 2R.
inline double propagation_distance(const TargetModel& target, double range, double z, double y) {
  detail::require(range > 0.0, "propagation_distance: range must be positive");
  if (target.kind == TargetKind::point) {
    if (target.mode == DistanceMode::exact) {
      return std::sqrt(range * range + z * z) + std::sqrt(range * range + y * y);
    }
    return 2.0 * range + (z * z + y * y) / (2.0 * range);
  }
  const double d = z - y;
  if (target.mode == DistanceMode::exact) {
    return std::sqrt(4.0 * range * range + d * d);
  }
  return 2.0 * range + d * d / (4.0 * range);
}

// d r / d R for the exact distance models; lies in (0, 2].
inline double propagation_distance_derivative(const TargetModel& target, double range, double z,
                                              double y) {
  detail::require(range > 0.0, "propagation_distance_derivative: range must be positive");
  if (target.mode != DistanceMode::exact) {
    throw unsupported_mode(
        "propagation_distance_derivative: defined for exact distances only");
  }
  if (target.kind == TargetKind::point) {
    return range / std::sqrt(range * range + z * z) +
           range / std::sqrt(range * range + y * y);
  }
  const double u = (z - y) / (2.0 * range);
  return 2.0 / std::sqrt(1.0 + u * u);
}

// R_D = 2 D^2 / lambda.
inline double rayleigh_distance(double aperture, double carrier_hz) {
  detail::require(aperture >= 0.0, "rayleigh_distance: aperture must be nonnegative");
  detail::require(carrier_hz > 0.0, "rayleigh_distance: carrier must be positive");
  return 2.0 * aperture * aperture * carrier_hz / speed_of_light;
}

}  // namespace nfre
