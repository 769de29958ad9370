#pragma once

// Closed-form bounds on the density of smooth transverse-free plane curves and
// the auxiliary inequalities behind them. Rational expressions are exact;
// expressions involving e are 100-digit decimals.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfree/gf.hpp"
#include "tfree/numeric.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

struct BoundValue {
  Decimal value;
  std::optional<Rational> exact;
};

struct BoundsReport {
  std::uint32_t q = 0;
  BoundValue smooth_density;  ///< (1 - q^-1)(1 - q^-2)(1 - q^-3)
  BoundValue lower;           ///< e^{-n} c^n
  BoundValue upper75;         ///< 7.5 c^n
  BoundValue upper_precise;   ///< (1 - q^-2)^{-n} c^n
  BoundValue bertini_lower;   ///< 1 - 7.5 c^n / smooth_density
};

/// n = q^2 + q + 1, the number of points (and lines) of P^2(F_q).
inline std::uint64_t plane_size(std::uint64_t q) { return q * q + q + 1; }

/// c = q^-1 + q^-2 - q^-3, the density of curves tangent to a fixed line.
inline Rational tangent_line_density(std::uint32_t q) {
  const Rational Q(q);
  return 1 / Q + 1 / (Q * Q) - 1 / (Q * Q * Q);
}

inline Rational smooth_density(std::uint32_t q) {
  const Rational Q(q);
  return (1 - 1 / Q) * (1 - 1 / (Q * Q)) * (1 - 1 / (Q * Q * Q));
}

inline BoundValue exact_value(const Rational& r) { return {to_decimal(r), r}; }

inline BoundsReport bounds_report(std::uint32_t q) {
  if (q < 2) throw std::invalid_argument("bounds_report: q must be >= 2");
  const auto n = static_cast<long long>(plane_size(q));
  const Rational Q(q);
  const Rational cn = rational_pow(tangent_line_density(q), n);
  const Rational smooth = smooth_density(q);
  BoundsReport r;
  r.q = q;
  r.smooth_density = exact_value(smooth);
  r.lower = {boost::multiprecision::exp(Decimal(-n)) * to_decimal(cn), std::nullopt};
  r.upper75 = exact_value(Rational(15, 2) * cn);
  r.upper_precise = exact_value(rational_pow(1 - 1 / (Q * Q), -n) * cn);
  r.bertini_lower = exact_value(1 - Rational(15, 2) * cn / smooth);
  return r;
}

// ---------------------------------------------------------------------------

/// (1 + 1/(q^2+q-1))^n (1 - q^-1)(1 - q^-2)(1 - q^-3); at least 1 for q >= 2.
inline Rational h_ratio(std::uint32_t q) {
  const Rational Q(q);
  const auto n = static_cast<long long>(plane_size(q));
  return rational_pow(1 + 1 / (Q * Q + Q - 1), n) * smooth_density(q);
}

/// (1 - q^-2)^q / (1 - q^-1).
inline Rational psi_ratio(std::uint32_t q) {
  const Rational Q(q);
  return rational_pow(1 - 1 / (Q * Q), q) / (1 - 1 / Q);
}

/// (1 - q^-2)^{-n}.
inline Rational xi_ratio(std::uint32_t q) {
  const Rational Q(q);
  return rational_pow(1 - 1 / (Q * Q), -static_cast<long long>(plane_size(q)));
}

struct InequalityRow {
  std::uint32_t q = 0;
  Rational h, psi, xi;
};

struct InequalityReport {
  std::vector<InequalityRow> rows;
  bool h_at_least_one = true;
  bool psi_at_least_one = true;
  bool psi_decreasing = true;
  bool xi_decreasing = true;
  bool xi_below_7_5 = true;

  bool all_hold() const { return h_at_least_one && psi_at_least_one && psi_decreasing && xi_decreasing && xi_below_7_5; }
};

/// Evaluates h, psi and xi at every prime power q <= q_max and checks the
/// inequalities they satisfy.
inline InequalityReport inequality_suite(std::uint32_t q_max) {
  if (q_max < 2) throw std::invalid_argument("inequality_suite: q_max must be >= 2");
  InequalityReport rep;
  for (std::uint32_t q : prime_powers(2, q_max)) {
    InequalityRow row{q, h_ratio(q), psi_ratio(q), xi_ratio(q)};
    rep.h_at_least_one = rep.h_at_least_one && row.h >= 1;
    rep.psi_at_least_one = rep.psi_at_least_one && row.psi >= 1;
    rep.xi_below_7_5 = rep.xi_below_7_5 && row.xi < Rational(15, 2);
    if (!rep.rows.empty()) {
      rep.psi_decreasing = rep.psi_decreasing && row.psi < rep.rows.back().psi;
      rep.xi_decreasing = rep.xi_decreasing && row.xi < rep.rows.back().xi;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------

/// x^e for a nonnegative integer e by repeated squaring.
inline Decimal decimal_pow(Decimal x, std::uint64_t e) {
  Decimal result = 1;
  while (e) {
    if (e & 1) result *= x;
    x *= x;
    e >>= 1;
  }
  return result;
}

/// 1 - prod_{e=1}^{r} (1 - q^{-2e})^{a_e}, a_e the number of closed points of
/// degree e on P^1. This is the density of being tangent to a fixed line at
/// some point of degree <= r; it increases to q^-1 + q^-2 - q^-3.
inline Decimal truncated_tangency_product(std::uint32_t q, int r) {
  if (r < 1) throw std::invalid_argument("truncated_tangency_product: r must be >= 1");
  const auto a = closed_point_counts(q, r);
  Decimal prod = 1;
  Decimal qe = 1;
  for (int e = 1; e <= r; ++e) {
    qe *= Decimal(q) * q;
    prod *= decimal_pow(1 - 1 / qe, a[e - 1]);
  }
  return 1 - prod;
}

}  // namespace tfree
