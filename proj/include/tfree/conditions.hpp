#pragma once

// Local conditions at a point as linear functionals on the coefficient space
// of degree-d ternary forms.
//
// Tangency to L at P: with g the restriction of f to L and (s0, t0) the
// parameter of P, g(s0, t0) = 0 and D.grad g(s0, t0) = 0 for a direction D
// not proportional to (s0, t0). Writing g = (t0 s - s0 t) h, the derivative
// equals (D_s t0 - D_t s0) h(s0, t0), so the pair of conditions is exactly
// "multiplicity >= 2" in every characteristic.
//
// Singularity at Q: f(Q) = f_x(Q) = f_y(Q) = f_z(Q) = 0.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfree/curves.hpp"
#include "tfree/forms.hpp"
#include "tfree/gf.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

/// Rows of functionals with values in `field`, one entry per monomial.
struct LinearConditions {
  std::shared_ptr<const FieldCtx> field;
  std::size_t width = 0;
  std::vector<FieldElem> entries;

  std::size_t count() const { return width ? entries.size() / width : 0; }
  std::span<const FieldElem> row(std::size_t r) const { return {entries.data() + r * width, width}; }

  FieldElem apply(std::size_t r, const TernaryForm& f) const {
    const FieldCtx& E = *field;
    const FieldElem* w = entries.data() + r * width;
    FieldElem acc = kZero;
    for (std::size_t u = 0; u < width; ++u)
      if (!f.coeffs[u].is_zero() && !w[u].is_zero()) acc = E.add(acc, E.mul(E.embed(f.coeffs[u]), w[u]));
    return acc;
  }

  /// f (base-field coefficients) satisfies every row.
  bool satisfied(const TernaryForm& f) const {
    if (f.coeffs.size() != width) throw std::invalid_argument("LinearConditions: degree mismatch");
    for (std::size_t r = 0; r < count(); ++r)
      if (!apply(r, f).is_zero()) return false;
    return true;
  }
};

/// Tangency of degree-d forms to L at P, where P has coordinates in E.
/// `base` is F_q and must be the base field of E.
inline LinearConditions tangency_conditions(const FieldCtx& base, const ProjLine& L,
                                            const std::shared_ptr<const FieldCtx>& E, const ProjPoint& P, int d) {
  if (d < 1) throw std::invalid_argument("tangency_conditions: d must be >= 1");
  const auto [s0, t0] = line_parameter(*E, L, P);
  const bool along_t = t0.is_zero();  // D = (0, 1) when the root is (1, 0), else D = (1, 0)
  const LineRestriction R(base, L, d);
  const std::size_t N = monomial_count(d);
  std::vector<FieldElem> sp(d + 1), tp(d + 1);
  sp[0] = tp[0] = kOne;
  for (int e = 1; e <= d; ++e) {
    sp[e] = E->mul(sp[e - 1], s0);
    tp[e] = E->mul(tp[e - 1], t0);
  }
  LinearConditions out{E, N, std::vector<FieldElem>(2 * N)};
  for (std::size_t u = 0; u < N; ++u) {
    const auto img = R.monomial_image(u);
    FieldElem val = kZero, der = kZero;
    for (int i = 0; i <= d; ++i) {
      if (img[i].is_zero()) continue;
      const FieldElem a = E->embed(img[i]);
      val = E->add(val, E->mul(a, E->mul(sp[d - i], tp[i])));
      if (along_t) {
        if (i > 0) der = E->add(der, E->mul(E->mul(E->from_int(i), a), E->mul(sp[d - i], tp[i - 1])));
      } else if (d - i > 0) {
        der = E->add(der, E->mul(E->mul(E->from_int(d - i), a), E->mul(sp[d - i - 1], tp[i])));
      }
    }
    out.entries[u] = val;
    out.entries[N + u] = der;
  }
  return out;
}

/// Singularity of degree-d forms at Q, where Q has coordinates in E.
inline LinearConditions singularity_conditions(const std::shared_ptr<const FieldCtx>& E, const ProjPoint& Q, int d) {
  if (d < 1) throw std::invalid_argument("singularity_conditions: d must be >= 1");
  const std::size_t N = monomial_count(d);
  std::array<std::vector<FieldElem>, 3> pw;
  for (int v = 0; v < 3; ++v) {
    pw[v].resize(d + 1);
    pw[v][0] = kOne;
    for (int e = 1; e <= d; ++e) pw[v][e] = E->mul(pw[v][e - 1], Q.c[v]);
  }
  LinearConditions out{E, N, std::vector<FieldElem>(4 * N)};
  const auto& mons = monomials(d);
  for (std::size_t u = 0; u < N; ++u) {
    const auto& m = mons[u];
    out.entries[u] = E->mul(pw[0][m[0]], E->mul(pw[1][m[1]], pw[2][m[2]]));
    for (int v = 0; v < 3; ++v) {
      if (m[v] == 0) continue;
      auto e = m;
      --e[v];
      out.entries[(1 + v) * N + u] =
          E->mul(E->from_int(m[v]), E->mul(pw[0][e[0]], E->mul(pw[1][e[1]], pw[2][e[2]])));
    }
  }
  return out;
}

}  // namespace tfree
