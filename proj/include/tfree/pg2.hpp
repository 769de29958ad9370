#pragma once

// The projective plane over F_q and its extensions.
//
// Points and lines are normalized triples (first nonzero coordinate = 1).
// Global order on both is lexicographic on the coordinate encodings, which
// makes incidence matrices, matchings and censuses reproducible.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfree/gf.hpp"

namespace tfree {

struct ProjPoint {
  std::array<FieldElem, 3> c{};

  friend auto operator<=>(const ProjPoint&, const ProjPoint&) = default;

  std::string str() const {
    return "[" + std::to_string(c[0].idx) + ":" + std::to_string(c[1].idx) + ":" + std::to_string(c[2].idx) + "]";
  }
};

/// A line ax+by+cz=0 over F_q. basis holds the first two F_q-points of the
/// line in global order; restrictions of forms use s*basis[0] + t*basis[1].
struct ProjLine {
  ProjPoint coeffs;
  std::array<ProjPoint, 2> basis;

  friend bool operator==(const ProjLine& a, const ProjLine& b) { return a.coeffs == b.coeffs; }
  friend auto operator<=>(const ProjLine& a, const ProjLine& b) { return a.coeffs <=> b.coeffs; }
};

/// Scales v so its first nonzero entry is 1. Throws on the zero vector.
inline ProjPoint normalize(const FieldCtx& F, std::array<FieldElem, 3> v) {
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_zero()) {
      const FieldElem s = F.inv(v[i]);
      for (auto& x : v) x = F.mul(x, s);
      return ProjPoint{v};
    }
  }
  throw std::invalid_argument("normalize: zero vector is not a projective point");
}

/// All points of P^2 over F, in global order.
inline std::vector<ProjPoint> enumerate_points(const FieldCtx& F) {
  const std::uint32_t n = F.size();
  std::vector<ProjPoint> pts;
  pts.reserve(static_cast<std::size_t>(n) * n + n + 1);
  pts.push_back(ProjPoint{{kZero, kZero, kOne}});
  for (std::uint32_t z = 0; z < n; ++z) pts.push_back(ProjPoint{{kZero, kOne, FieldElem{z}}});
  for (std::uint32_t y = 0; y < n; ++y)
    for (std::uint32_t z = 0; z < n; ++z) pts.push_back(ProjPoint{{kOne, FieldElem{y}, FieldElem{z}}});
  return pts;
}

/// Whether P (coordinates in F) lies on L (coefficients in the base field of F).
inline bool incident(const FieldCtx& F, const ProjPoint& P, const ProjLine& L) {
  FieldElem acc = kZero;
  for (int i = 0; i < 3; ++i) acc = F.add(acc, F.mul(F.embed(L.coeffs.c[i]), P.c[i]));
  return acc.is_zero();
}

/// All F_q-lines in global order, each with its basis pair. F must be a base
/// context (k = 1).
inline std::vector<ProjLine> enumerate_lines(const FieldCtx& F) {
  if (F.k() != 1) throw std::invalid_argument("enumerate_lines: expects a base field context");
  const auto pts = enumerate_points(F);
  std::vector<ProjLine> lines;
  lines.reserve(pts.size());
  for (const auto& coeffs : pts) {
    ProjLine L{coeffs, {}};
    int found = 0;
    for (const auto& P : pts) {
      if (incident(F, P, L)) {
        L.basis[found++] = P;
        if (found == 2) break;
      }
    }
    lines.push_back(L);
  }
  return lines;
}

/// Size of the Frobenius orbit of P over the base field.
inline int point_degree(const FieldCtx& F, const ProjPoint& P) {
  ProjPoint cur = P;
  for (std::uint32_t e = 1; e <= F.k(); ++e) {
    cur = normalize(F, {F.frobenius(cur.c[0]), F.frobenius(cur.c[1]), F.frobenius(cur.c[2])});
    if (cur == P) return static_cast<int>(e);
  }
  throw std::logic_error("point_degree: orbit longer than extension degree");
}

/// Coordinates of an F_q-rational point of F, re-encoded in the base field.
inline ProjPoint to_base_point(const FieldCtx& F, const ProjPoint& P) {
  const ProjPoint n = normalize(F, P.c);
  return ProjPoint{{F.to_base(n.c[0]), F.to_base(n.c[1]), F.to_base(n.c[2])}};
}

inline ProjPoint embed_point(const FieldCtx& F, const ProjPoint& P) {
  return ProjPoint{{F.embed(P.c[0]), F.embed(P.c[1]), F.embed(P.c[2])}};
}

/// Number a_e of closed points of degree e on P^1 over F_q, e = 1..r, from
/// sum_{m | e} m a_m = q^e + 1 by Moebius inversion.
inline std::vector<std::uint64_t> closed_point_counts(std::uint64_t q, int r) {
  if (r < 1) throw std::invalid_argument("closed_point_counts: r must be >= 1");
  auto mobius = [](int n) {
    int result = 1;
    for (int d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        n /= d;
        if (n % d == 0) return 0;
        result = -result;
      }
    }
    if (n > 1) result = -result;
    return result;
  };
  std::vector<unsigned __int128> qpow(r + 1, 1);
  for (int e = 1; e <= r; ++e) {
    qpow[e] = qpow[e - 1] * q;
    if (qpow[e] > (static_cast<unsigned __int128>(1) << 63))
      throw std::overflow_error("closed_point_counts: q^r exceeds 2^63");
  }
  std::vector<std::uint64_t> out(r);
  for (int e = 1; e <= r; ++e) {
    __int128 acc = 0;
    for (int m = 1; m <= e; ++m)
      if (e % m == 0) acc += static_cast<__int128>(mobius(e / m)) * static_cast<__int128>(qpow[m] + 1);
    out[e - 1] = static_cast<std::uint64_t>(acc / e);
  }
  return out;
}

/// P^2(F_q) with its points and lines in global order.
class Plane {
 public:
  explicit Plane(std::uint32_t q) : Plane(FieldCtx::for_order(q)) {}
  explicit Plane(FieldCtx field) : field_(std::move(field)) {
    if (field_.k() != 1) throw std::invalid_argument("Plane: expects a base field context");
    points_ = enumerate_points(field_);
    lines_ = enumerate_lines(field_);
  }

  const FieldCtx& field() const { return field_; }
  std::uint32_t q() const { return field_.q(); }
  const std::vector<ProjPoint>& points() const { return points_; }
  const std::vector<ProjLine>& lines() const { return lines_; }
  std::size_t size() const { return points_.size(); }

  std::size_t point_index(const ProjPoint& P) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), P);
    if (it == points_.end() || *it != P) throw std::out_of_range("point not in plane: " + P.str());
    return static_cast<std::size_t>(it - points_.begin());
  }

  std::size_t line_index(const ProjLine& L) const {
    auto it = std::lower_bound(lines_.begin(), lines_.end(), L);
    if (it == lines_.end() || *it != L) throw std::out_of_range("line not in plane");
    return static_cast<std::size_t>(it - lines_.begin());
  }

  /// The q+1 lines through an F_q-point Q, in global order.
  std::vector<ProjLine> lines_through(const ProjPoint& Q) const {
    std::vector<ProjLine> out;
    for (const auto& L : lines_)
      if (incident(field_, Q, L)) out.push_back(L);
    return out;
  }

  std::vector<ProjPoint> points_on(const ProjLine& L) const {
    std::vector<ProjPoint> out;
    for (const auto& P : points_)
      if (incident(field_, P, L)) out.push_back(P);
    return out;
  }

 private:
  FieldCtx field_;
  std::vector<ProjPoint> points_;
  std::vector<ProjLine> lines_;
};

/// lines_through for a point given over an extension; throws if Q is not
/// F_q-rational.
inline std::vector<ProjLine> lines_through(const Plane& plane, const FieldCtx& F, const ProjPoint& Q) {
  if (point_degree(F, Q) != 1) throw std::domain_error("lines_through: point is not F_q-rational");
  return plane.lines_through(to_base_point(F, Q));
}

}  // namespace tfree
