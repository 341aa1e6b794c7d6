#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "treecvrp/errors.hpp"

namespace treecvrp {

// Exact rational over int64 with overflow-checked arithmetic.  Intermediate
// products run through __int128; anything that cannot be reduced back into
// int64 throws OverflowError instead of silently wrapping.  Costs and bounds
// in this project are exact by contract, so there is no floating-point path.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  static Rational from_int128(__int128 num, __int128 den);

  // Accepts "p", "p/q", and plain decimals like "1.25" or "-0.5".
  static Rational parse(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  // Canonical form: "p" when the denominator is 1, else "p/q" reduced.
  std::string str() const;

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  std::strong_ordering operator<=>(const Rational& o) const;

  bool is_integer() const { return den_ == 1; }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace treecvrp
