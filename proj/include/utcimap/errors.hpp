#pragma once

#include <stdexcept>
#include <string>

namespace utcimap {

// Physically impossible or out-of-range input to a thermophysical formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input outside the UTCI polynomial's validity domain after clamping.
class RangeError : public std::out_of_range {
 public:
  RangeError(std::string bound, const std::string& what)
      : std::out_of_range(what), bound_(std::move(bound)) {}

  // Name of the violated bound, e.g. "t_air", "wind_10m", "t_mrt - t_air".
  const std::string& bound() const noexcept { return bound_; }

 private:
  std::string bound_;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested data is not covered by the available series (no overlap, no
// control sample within tolerance, window outside range).
class DataMissingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegistrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace utcimap
