#pragma once

// Exact rationals, 100-digit decimals and 128-bit integer text conversion.

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tfree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Decimal = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<100>>;

inline Decimal to_decimal(const Rational& r) {
  return Decimal(boost::multiprecision::numerator(r)) / Decimal(boost::multiprecision::denominator(r));
}

inline Rational rational_pow(const Rational& base, long long e) {
  if (e < 0) return rational_pow(Rational(1) / base, -e);
  Rational result = 1, b = base;
  while (e) {
    if (e & 1) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

/// Fixed-point rendering with `digits` digits after the point.
inline std::string format_fixed(const Decimal& x, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

/// Rendering with `digits` significant digits.
inline std::string format_sig(const Decimal& x, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

inline std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r) << "/" << boost::multiprecision::denominator(r);
  return os.str();
}

inline std::string int128_to_string(__int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

inline __int128 parse_int128(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("parse_int128: empty");
  bool neg = false;
  if (s.front() == '-' || s.front() == '+') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty() || s.size() > 38) throw std::invalid_argument("parse_int128: bad length");
  unsigned __int128 u = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("parse_int128: bad digit");
    u = u * 10 + static_cast<unsigned>(c - '0');
  }
  return neg ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

}  // namespace tfree
