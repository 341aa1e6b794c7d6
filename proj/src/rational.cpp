#include "treecvrp/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace treecvrp {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(__int128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw OverflowError(std::string("rational ") + what + " exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = from_int128(num, den);
}

Rational Rational::from_int128(__int128 num, __int128 den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Rational r;
  r.num_ = narrow(num, "numerator");
  r.den_ = narrow(den, "denominator");
  return r;
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw ValidationError("empty rational literal");
  auto slash = text.find('/');
  auto dot = text.find('.');
  const char* raw = text.c_str();
  char* end = nullptr;
  errno = 0;
  if (slash != std::string::npos) {
    std::int64_t num = std::strtoll(raw, &end, 10);
    if (errno != 0 || end != raw + slash) throw ValidationError("bad rational literal: " + text);
    errno = 0;
    std::int64_t den = std::strtoll(raw + slash + 1, &end, 10);
    if (errno != 0 || *end != '\0') throw ValidationError("bad rational literal: " + text);
    return Rational(num, den);
  }
  if (dot != std::string::npos) {
    std::int64_t whole = std::strtoll(raw, &end, 10);
    if (errno != 0 || end != raw + dot) throw ValidationError("bad rational literal: " + text);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 18) throw ValidationError("bad rational literal: " + text);
    __int128 den = 1;
    for (char c : frac) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ValidationError("bad rational literal: " + text);
      }
      den *= 10;
    }
    errno = 0;
    std::int64_t frac_val = std::strtoll(frac.c_str(), &end, 10);
    if (errno != 0 || *end != '\0') throw ValidationError("bad rational literal: " + text);
    bool negative = text[0] == '-';
    __int128 num = (__int128)std::llabs(whole) * den + frac_val;
    if (negative) num = -num;
    return from_int128(num, den);
  }
  std::int64_t num = std::strtoll(raw, &end, 10);
  if (errno != 0 || *end != '\0') throw ValidationError("bad rational literal: " + text);
  return Rational(num);
}

std::string Rational::str() const {
  std::string s = std::to_string(num_);
  if (den_ != 1) {
    s += '/';
    s += std::to_string(den_);
  }
  return s;
}

Rational Rational::operator+(const Rational& o) const {
  return from_int128((__int128)num_ * o.den_ + (__int128)o.num_ * den_,
                     (__int128)den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return from_int128((__int128)num_ * o.den_ - (__int128)o.num_ * den_,
                     (__int128)den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return from_int128((__int128)num_ * o.num_, (__int128)den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw ValidationError("rational division by zero");
  return from_int128((__int128)num_ * o.den_, (__int128)den_ * o.num_);
}

Rational Rational::operator-() const { return from_int128(-(__int128)num_, den_); }

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  __int128 lhs = (__int128)num_ * o.den_;
  __int128 rhs = (__int128)o.num_ * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace treecvrp
