#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qhf {

using cplx = std::complex<double>;
inline constexpr cplx im_unit{0.0, 1.0};

// Thrown on invalid physical input (negative frequency, bad temperature, ...).
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a numerical procedure breaks down (NaN blow-up, lost
// positivity in a recurrence, non-convergent quadrature).
struct numerics_error : std::runtime_error {
  explicit numerics_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed run configurations; carries a line number when the
// problem is attributable to a config file line.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_number(line) {}
  int line_number;
};

}  // namespace qhf
