#pragma once

// Shared constants, error types and the warning sink used across the library.

#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace nfre {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double pi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

// Base class for everything the library throws.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument is outside its admissible domain.
class invalid_parameter : public error {
 public:
  using error::error;
};

// The requested operation is not defined for this distance mode.
class unsupported_mode : public error {
 public:
  using error::error;
};

// The operation needs a tagged SIMO/MIMO layout (or a specific one).
class unsupported_configuration : public error {
 public:
  using error::error;
};

// The scenario carries no range information (zero-information Fisher matrix).
class degenerate_scenario : public error {
 public:
  using error::error;
};

// A hypothesized delay falls outside the sampled observation window.
class window_coverage_error : public error {
 public:
  using error::error;
};

// A numerical procedure failed its internal convergence check.
class numerical_accuracy_error : public error {
 public:
  using error::error;
};

// File / stream problems; message contains the offending path.
class io_error : public error {
 public:
  using error::error;
};

namespace detail {

inline std::mutex& warn_mutex() {
  static std::mutex m;
  return m;
}

inline std::function<void(const std::string&)>& warn_sink() {
  static std::function<void(const std::string&)> sink;
  return sink;
}

}  // namespace detail

// Non-fatal diagnostics (assumption violations, boundary hits) are routed
// here. Default sink writes to stderr; tools and tests may replace it.
inline void set_warning_handler(std::function<void(const std::string&)> handler) {
  std::lock_guard<std::mutex> lock(detail::warn_mutex());
  detail::warn_sink() = std::move(handler);
}

inline void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(detail::warn_mutex());
  if (detail::warn_sink()) {
    detail::warn_sink()(message);
  } else {
    std::cerr << "nfre: warning: " << message << '\n';
  }
}

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw invalid_parameter(message);
}

// sqrt(1+x) - 1 without cancellation for small x.
inline double sqrt1pm1(double x) {
  return x / (1.0 + std::sqrt(1.0 + x));
}

}  // namespace detail

}  // namespace nfre
