// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "bdp/errors.hpp"

namespace bdp {

/// A real number or +infinity. Infinity is carried as an explicit state,
/// never as a floating-point overflow.
class ExtendedValue {
 public:
  static ExtendedValue finite(double v) {
    if (!std::isfinite(v)) throw DomainError("ExtendedValue::finite: value is not finite");
    return ExtendedValue(v);
  }
  static ExtendedValue infinity() { return ExtendedValue(); }

  bool is_infinite() const noexcept { return !value_.has_value(); }
  bool is_finite() const noexcept { return value_.has_value(); }

  double value() const {
    if (!value_) throw DomainError("ExtendedValue::value: value is +infinity");
    return *value_;
  }

  /// Finite value, or +inf as a double for display and plotting.
  double as_double() const noexcept {
    return value_ ? *value_ : std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const ExtendedValue&, const ExtendedValue&) = default;

  friend std::ostream& operator<<(std::ostream& os, const ExtendedValue& v) {
    if (v.is_infinite()) return os << "inf";
    return os << *v.value_;
  }

 private:
  ExtendedValue() = default;
  explicit ExtendedValue(double v) : value_(v) {}

  std::optional<double> value_;
};

}  // namespace bdp
