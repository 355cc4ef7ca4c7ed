#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "topomuse/errors.hpp"

namespace topomuse {

/// Exact rational number over int64, always stored in lowest terms with a
/// positive denominator. Note durations and network distances are rationals
/// so that note identity and filtration ordering never depend on floating
/// point rounding. Intermediate products run through __int128; results that
/// do not fit int64 after reduction throw InternalError.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT: implicit by design

  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InternalError("rational: zero denominator");
    *this = reduce(static_cast<__int128>(num), static_cast<__int128>(den));
  }

  /// Parses "5/3", "-1/2", or a plain integer like "2".
  static Rational parse(std::string_view text) {
    const auto slash = text.find('/');
    const std::string_view num_part = text.substr(0, slash);
    std::int64_t num = 0;
    if (!parseInt(num_part, num)) {
      throw ParseError("invalid rational '" + std::string(text) + "'");
    }
    if (slash == std::string_view::npos) return Rational(num);
    std::int64_t den = 0;
    if (!parseInt(text.substr(slash + 1), den) || den == 0) {
      throw ParseError("invalid rational '" + std::string(text) + "'");
    }
    return Rational(num, den);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_)
                     : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return reduce(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return reduce(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return reduce(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw InternalError("rational: division by zero");
    return reduce(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  /// Exact order via cross multiplication; no rounding.
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = i128(a.num_) * b.den_;
    const __int128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  static constexpr __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

  static bool parseInt(std::string_view text, std::int64_t& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc() && result.ptr == last;
  }

  static Rational reduce(__int128 num, __int128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const __int128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr __int128 kMax = INT64_MAX;
    constexpr __int128 kMin = INT64_MIN;
    if (num > kMax || num < kMin || den > kMax) {
      throw InternalError("rational: value exceeds 64-bit range");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace topomuse
