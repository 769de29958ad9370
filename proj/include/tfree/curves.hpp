#pragma once

// Geometric predicates on plane curves f = 0 over F_q.
//
// Conventions for f = 0: every restriction is 0, so 0 is tangent to every
// line at every point and transverse to none; 0 is singular everywhere and
// is_smooth rejects it.

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tfree/forms.hpp"
#include "tfree/gf.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

/// Parameters (s0, t0) with P = s0*B0 + t0*B1 up to scaling, where B0, B1 is
/// the basis pair of L embedded in F. P must lie on L.
inline std::pair<FieldElem, FieldElem> line_parameter(const FieldCtx& F, const ProjLine& L, const ProjPoint& P) {
  if (!incident(F, P, L)) throw std::invalid_argument("line_parameter: point is not on the line");
  const ProjPoint B0 = embed_point(F, L.basis[0]), B1 = embed_point(F, L.basis[1]);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const FieldElem minor = F.sub(F.mul(B0.c[a], B1.c[b]), F.mul(B0.c[b], B1.c[a]));
      if (minor.is_zero()) continue;
      const FieldElem im = F.inv(minor);
      const FieldElem s0 = F.mul(F.sub(F.mul(P.c[a], B1.c[b]), F.mul(P.c[b], B1.c[a])), im);
      const FieldElem t0 = F.mul(F.sub(F.mul(B0.c[a], P.c[b]), F.mul(B0.c[b], P.c[a])), im);
      return {s0, t0};
    }
  }
  throw std::logic_error("line_parameter: degenerate basis");
}

inline bool is_transverse(const FieldCtx& F, const TernaryForm& f, const ProjLine& L) {
  return binary_squarefree(F, restrict_to_line(F, f, L));
}

/// No F_q-line of the plane meets f = 0 transversally. Lines are visited in
/// global order and the scan stops at the first transverse one.
inline bool is_transverse_free(const Plane& plane, const TernaryForm& f) {
  for (const auto& L : plane.lines())
    if (is_transverse(plane.field(), f, L)) return false;
  return true;
}

/// f(P) = 0 and all three partials vanish at P. All four are checked since
/// the Euler relation does not force f(P) = 0 when p divides d.
inline bool is_singular_at(const FieldCtx& F, const TernaryForm& f, const ProjPoint& P) {
  if (!evaluate(F, f, P).is_zero()) return false;
  if (f.degree == 0) return true;
  for (const auto& g : partials(F, f))
    if (!evaluate(F, g, P).is_zero()) return false;
  return true;
}

/// Multiplicity of the restriction f|_L at P is at least 2 (f|_L = 0 counts).
/// F is the field of P; f and L are over the base field.
inline bool is_tangent_at(const FieldCtx& F, const TernaryForm& f, const ProjLine& L, const ProjPoint& P) {
  const auto [s0, t0] = line_parameter(F, L, P);
  const auto base = F.k() == 1 ? nullptr : extension(F, 1);
  const BinaryForm g = embed_binary(F, restrict_to_line(base ? *base : F, f, L));
  if (g.is_zero()) return true;
  return linear_factor_multiplicity(F, g, s0, t0) >= 2;
}

// ---------------------------------------------------------------------------
// Smoothness

/// Degree bound for singular closed points that is searched. A reduced plane
/// curve of degree d has at most d(d-1)/2 singular geometric points, and a
/// non-reduced one has a whole component of degree <= d/2 in its singular
/// locus, which meets an F_q-line in points of degree <= d/2.
inline int singular_degree_bound(int d) { return std::max(1, d * (d - 1) / 2); }

/// Extension degrees whose fields together contain every element of degree
/// <= K: {1, 2} for an early exit, then (K/2, K].
inline std::vector<int> covering_extension_degrees(int K) {
  std::vector<int> out;
  for (int e = 1; e <= K; ++e)
    if (e <= 2 || 2 * e > K) out.push_back(e);
  return out;
}

namespace detail {

// Polynomial in z obtained from a ternary form by fixing (x, y) = (x0, y0)
// in F; low coefficient first.
inline poly::Poly specialize_xy(const FieldCtx& F, const TernaryForm& f, const std::vector<FieldElem>& xp,
                                const std::vector<FieldElem>& yp) {
  const int d = f.degree;
  poly::Poly out(d + 1);
  std::size_t idx = 0;
  for (int i = d; i >= 0; --i) {
    for (int j = d - i; j >= 0; --j, ++idx) {
      const FieldElem c = f.coeffs[idx];
      if (c.is_zero()) continue;
      const int k = d - i - j;
      out[k] = F.add(out[k], F.mul(F.embed(c), F.mul(xp[i], yp[j])));
    }
  }
  poly::trim(out);
  return out;
}

// Whether some z in the algebraic closure makes (x0 : y0 : z) a common zero of
// all forms. The zero polynomial means the whole fiber qualifies.
inline bool fiber_has_common_zero(const FieldCtx& F, const std::array<const TernaryForm*, 4>& forms, FieldElem x0,
                                  FieldElem y0, int d) {
  std::vector<FieldElem> xp(d + 1), yp(d + 1);
  xp[0] = yp[0] = kOne;
  for (int e = 1; e <= d; ++e) {
    xp[e] = F.mul(xp[e - 1], x0);
    yp[e] = F.mul(yp[e - 1], y0);
  }
  poly::Poly g;
  bool any = false;
  for (const TernaryForm* h : forms) {
    poly::Poly s = specialize_xy(F, *h, xp, yp);
    if (s.empty()) continue;
    if (poly::degree(s) == 0) return false;
    g = any ? poly::gcd(F, std::move(g), std::move(s)) : std::move(s);
    any = true;
    if (poly::degree(g) == 0) return false;
  }
  return true;
}

}  // namespace detail

/// Field size needed by is_smooth for degree d over F_q.
inline std::uint64_t smoothness_field_size(std::uint32_t q, int d) {
  std::uint64_t s = 1;
  for (int e = 0; e < singular_degree_bound(d); ++e) {
    s *= q;
    if (s > kMaxFieldSize) return kMaxFieldSize + 1;
  }
  return s;
}

/// No point of P^2 over the algebraic closure is singular on f = 0.
///
/// Singular points [0:0:1] and [0:1:z] are found over F_q directly (the fiber
/// polynomials in z have F_q coefficients). Points [1:y:z] are found by
/// running y over fields that contain every element of degree
/// <= singular_degree_bound(d) and testing whether f, f_x, f_y, f_z share a
/// root in z.
inline bool is_smooth(const Plane& plane, const TernaryForm& f) {
  const FieldCtx& F = plane.field();
  if (f.is_zero()) throw std::invalid_argument("is_smooth: zero form");
  const int d = f.degree;
  if (d == 0) throw std::invalid_argument("is_smooth: constant form");
  const int K = singular_degree_bound(d);
  if (smoothness_field_size(F.q(), d) > kMaxFieldSize)
    throw std::length_error("is_smooth: q^" + std::to_string(K) + " exceeds field cap");
  if (d == 1) return true;
  const auto parts = partials(F, f);
  if (parts[0].is_zero() && parts[1].is_zero() && parts[2].is_zero()) return false;  // p-th power
  const std::array<const TernaryForm*, 4> forms{&parts[0], &parts[1], &parts[2], &f};

  if (is_singular_at(F, f, ProjPoint{{kZero, kZero, kOne}})) return false;
  if (detail::fiber_has_common_zero(F, forms, kZero, kOne, d)) return false;
  for (int e : covering_extension_degrees(K)) {
    const auto E = extension(F, static_cast<std::uint32_t>(e));
    for (std::uint32_t y = 0; y < E->size(); ++y)
      if (detail::fiber_has_common_zero(*E, forms, kOne, FieldElem{y}, d)) return false;
  }
  return true;
}

/// Reference smoothness test: enumerate P^2(F_{q^k}) for k = 1..max_k and test
/// every point. Exponential; used to validate is_smooth.
inline bool is_smooth_by_enumeration(const Plane& plane, const TernaryForm& f, int max_k) {
  if (f.is_zero()) throw std::invalid_argument("is_smooth: zero form");
  for (int k = 1; k <= max_k; ++k) {
    const auto E = extension(plane.field(), static_cast<std::uint32_t>(k));
    for (const auto& P : enumerate_points(*E))
      if (is_singular_at(*E, f, P)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

struct TangencyPoint {
  int degree = 1;  ///< degree of the point; coordinates are in F_{q^degree}
  ProjPoint point;
  int multiplicity = 0;
};

/// Points of degree <= r on L where f|_L vanishes to order >= 2. Each
/// geometric point is listed once, over its own field of definition.
inline std::vector<TangencyPoint> tangency_points(const Plane& plane, const TernaryForm& f, const ProjLine& L, int r) {
  const FieldCtx& F = plane.field();
  const BinaryForm g = restrict_to_line(F, f, L);
  if (g.is_zero()) throw std::domain_error("tangency_points: restriction to the line is zero");
  std::vector<TangencyPoint> out;
  for (int e = 1; e <= r; ++e) {
    const auto E = extension(F, static_cast<std::uint32_t>(e));
    const BinaryForm ge = embed_binary(*E, g);
    auto exact_degree = [&](FieldElem t) {
      FieldElem x = t;
      for (int j = 1; j <= e; ++j) {
        x = E->frobenius(x);
        if (x == t) return j;
      }
      return e;
    };
    auto consider = [&](FieldElem s0, FieldElem t0) {
      const int mult = linear_factor_multiplicity(*E, ge, s0, t0);
      if (mult < 2) return;
      const ProjPoint B0 = embed_point(*E, L.basis[0]), B1 = embed_point(*E, L.basis[1]);
      std::array<FieldElem, 3> v;
      for (int c = 0; c < 3; ++c) v[c] = E->add(E->mul(s0, B0.c[c]), E->mul(t0, B1.c[c]));
      out.push_back(TangencyPoint{e, normalize(*E, v), mult});
    };
    if (e == 1) consider(kZero, kOne);
    for (std::uint32_t t = 0; t < E->size(); ++t)
      if (exact_degree(FieldElem{t}) == e) consider(kOne, FieldElem{t});
  }
  return out;
}

}  // namespace tfree
