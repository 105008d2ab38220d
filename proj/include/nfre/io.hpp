#pragma once

// Small I/O helpers shared by the CLI and tests: SI-suffixed numbers,
// sweep-grid specifications and reproducibility headers for CSV output.

#include <cctype>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nfre/common.hpp"

namespace nfre {

// Accepts plain doubles ("24e9") and single SI suffixes ("24G", "100M",
// "1.5k"); an optional trailing "Hz" is ignored.
inline double parse_si_number(std::string text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  size_t start = 0;
  while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
  text.erase(0, start);
  detail::require(!text.empty(), "parse_si_number: empty value");
  if (text.size() >= 2) {
    const std::string tail = text.substr(text.size() - 2);
    if (tail == "Hz" || tail == "hz") text.erase(text.size() - 2);
  }
  double scale = 1.0;
  if (!text.empty()) {
    switch (text.back()) {
      case 'k':
      case 'K': scale = 1e3; text.pop_back(); break;
      case 'M': scale = 1e6; text.pop_back(); break;
      case 'G':
      case 'g': scale = 1e9; text.pop_back(); break;
      case 'T': scale = 1e12; text.pop_back(); break;
      default: break;
    }
  }
  try {
    size_t used = 0;
    const double value = std::stod(text, &used);
    detail::require(used == text.size(), "parse_si_number: trailing characters in '" + text + "'");
    return value * scale;
  } catch (const invalid_parameter&) {
    throw;
  } catch (const std::exception&) {
    throw invalid_parameter("parse_si_number: cannot parse '" + text + "'");
  }
}

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  size_t points = 0;
  bool log_scale = false;

  std::vector<double> values() const {
    detail::require(points >= 2, "grid: need at least 2 points");
    detail::require(max > min, "grid: max must exceed min");
    if (log_scale) detail::require(min > 0.0, "grid: log scale needs positive bounds");
    std::vector<double> out(points);
    for (size_t i = 0; i < points; ++i) {
      const double w = static_cast<double>(i) / static_cast<double>(points - 1);
      out[i] = log_scale ? min * std::pow(max / min, w) : min + w * (max - min);
    }
    return out;
  }
};

// "min:max:points[:log]" with SI-suffixed bounds.
inline GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t colon = text.find(':', pos);
    if (colon == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, colon - pos));
    pos = colon + 1;
  }
  detail::require(parts.size() == 3 || parts.size() == 4,
                  "grid: expected min:max:points[:log], got '" + text + "'");
  GridSpec spec;
  spec.min = parse_si_number(parts[0]);
  spec.max = parse_si_number(parts[1]);
  const double points = parse_si_number(parts[2]);
  detail::require(points >= 2.0 && points == std::floor(points),
                  "grid: point count must be an integer >= 2");
  spec.points = static_cast<size_t>(points);
  if (parts.size() == 4) {
    detail::require(parts[3] == "log" || parts[3] == "linear",
                    "grid: scale must be 'log' or 'linear'");
    spec.log_scale = parts[3] == "log";
  }
  detail::require(spec.max > spec.min, "grid: max must exceed min");
  if (spec.log_scale) detail::require(spec.min > 0.0, "grid: log scale needs positive bounds");
  return spec;
}

using MetaList = std::vector<std::pair<std::string, std::string>>;

// '#'-prefixed reproducibility header for CSV output.
inline void write_csv_meta(std::ostream& out, const MetaList& meta) {
  for (const auto& [key, value] : meta) {
    out << "# " << key << " = " << value << '\n';
  }
}

}  // namespace nfre
