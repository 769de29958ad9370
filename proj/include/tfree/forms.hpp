#pragma once

// Dense homogeneous forms over F_q.
//
// TernaryForm coefficients are always base-field (F_q) encodings; evaluating
// at a point over F_{q^k} embeds them. BinaryForm coefficients live in the
// context that is passed alongside them.

#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tfree/gf.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

// ---------------------------------------------------------------------------
// Monomials of degree d in x, y, z, graded-lex: x^d, x^{d-1}y, x^{d-1}z, ...

inline constexpr std::size_t monomial_count(int d) { return static_cast<std::size_t>(d + 1) * (d + 2) / 2; }

inline constexpr std::size_t monomial_index(int d, int i, int j) {
  return static_cast<std::size_t>(d - i) * (d - i + 1) / 2 + static_cast<std::size_t>(d - i - j);
}

/// Exponent triples of degree d, in coefficient order. Cached per degree.
inline const std::vector<std::array<int, 3>>& monomials(int d) {
  static std::mutex mu;
  static std::map<int, std::vector<std::array<int, 3>>> cache;
  std::lock_guard lock(mu);
  auto [it, fresh] = cache.try_emplace(d);
  if (fresh) {
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) it->second.push_back({i, j, d - i - j});
  }
  return it->second;
}

struct TernaryForm {
  int degree = 0;
  std::vector<FieldElem> coeffs;

  TernaryForm() = default;
  explicit TernaryForm(int d) : degree(d), coeffs(monomial_count(d)) {
    if (d < 0) throw std::invalid_argument("negative degree");
  }
  TernaryForm(int d, std::vector<FieldElem> c) : degree(d), coeffs(std::move(c)) {
    if (d < 0 || coeffs.size() != monomial_count(d)) throw std::invalid_argument("coefficient vector has wrong length");
  }

  FieldElem at(int i, int j, int k) const {
    if (i + j + k != degree || i < 0 || j < 0 || k < 0) throw std::out_of_range("exponents do not match degree");
    return coeffs[monomial_index(degree, i, j)];
  }
  void set(int i, int j, int k, FieldElem c) {
    if (i + j + k != degree || i < 0 || j < 0 || k < 0) throw std::out_of_range("exponents do not match degree");
    coeffs[monomial_index(degree, i, j)] = c;
  }
  bool is_zero() const {
    for (auto c : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }

  friend bool operator==(const TernaryForm&, const TernaryForm&) = default;
};

/// a_0 s^d + a_1 s^{d-1} t + ... + a_d t^d.
struct BinaryForm {
  int degree = 0;
  std::vector<FieldElem> coeffs;

  BinaryForm() = default;
  explicit BinaryForm(int d) : degree(d), coeffs(static_cast<std::size_t>(d) + 1) {}
  BinaryForm(int d, std::vector<FieldElem> c) : degree(d), coeffs(std::move(c)) {
    if (d < 0 || coeffs.size() != static_cast<std::size_t>(d) + 1)
      throw std::invalid_argument("coefficient vector has wrong length");
  }

  bool is_zero() const {
    for (auto c : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }

  friend bool operator==(const BinaryForm&, const BinaryForm&) = default;
};

// ---------------------------------------------------------------------------
// Univariate polynomials over a field context, low coefficient first.

namespace poly {

using Poly = std::vector<FieldElem>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

inline int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly derivative(const FieldCtx& F, const Poly& a) {
  Poly d(a.size() > 1 ? a.size() - 1 : 0);
  for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = F.mul(F.from_int(static_cast<std::int64_t>(i)), a[i]);
  trim(d);
  return d;
}

inline Poly mod(const FieldCtx& F, Poly a, const Poly& b) {
  trim(a);
  if (b.empty()) throw std::domain_error("poly::mod by zero");
  const FieldElem inv_lead = F.inv(b.back());
  const std::size_t db = b.size() - 1;
  while (a.size() > db && !a.empty()) {
    const FieldElem factor = F.mul(a.back(), inv_lead);
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] = F.sub(a[shift + i], F.mul(factor, b[i]));
    trim(a);
  }
  return a;
}

inline Poly gcd(const FieldCtx& F, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(F, std::move(a), b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace poly

// ---------------------------------------------------------------------------

inline FieldElem evaluate(const FieldCtx& F, const TernaryForm& f, const ProjPoint& P) {
  const int d = f.degree;
  std::array<std::vector<FieldElem>, 3> pw;
  for (int v = 0; v < 3; ++v) {
    pw[v].resize(d + 1);
    pw[v][0] = kOne;
    for (int e = 1; e <= d; ++e) pw[v][e] = F.mul(pw[v][e - 1], P.c[v]);
  }
  FieldElem acc = kZero;
  std::size_t idx = 0;
  for (int i = d; i >= 0; --i) {
    for (int j = d - i; j >= 0; --j, ++idx) {
      const FieldElem c = f.coeffs[idx];
      if (c.is_zero()) continue;
      acc = F.add(acc, F.mul(F.embed(c), F.mul(pw[0][i], F.mul(pw[1][j], pw[2][d - i - j]))));
    }
  }
  return acc;
}

/// Formal partial derivatives (d/dx, d/dy, d/dz); exponents are reduced mod p.
inline std::array<TernaryForm, 3> partials(const FieldCtx& F, const TernaryForm& f) {
  const int d = f.degree;
  if (d < 1) throw std::invalid_argument("partials: degree must be >= 1");
  std::array<TernaryForm, 3> out{TernaryForm(d - 1), TernaryForm(d - 1), TernaryForm(d - 1)};
  std::size_t idx = 0;
  for (int i = d; i >= 0; --i) {
    for (int j = d - i; j >= 0; --j, ++idx) {
      const int k = d - i - j;
      const FieldElem c = f.coeffs[idx];
      if (c.is_zero()) continue;
      if (i > 0) out[0].coeffs[monomial_index(d - 1, i - 1, j)] = F.mul(F.from_int(i), c);
      if (j > 0) out[1].coeffs[monomial_index(d - 1, i, j - 1)] = F.mul(F.from_int(j), c);
      if (k > 0) out[2].coeffs[monomial_index(d - 1, i, j)] = F.mul(F.from_int(k), c);
    }
  }
  return out;
}

inline TernaryForm add(const FieldCtx& F, const TernaryForm& a, const TernaryForm& b) {
  if (a.degree != b.degree) throw std::invalid_argument("add: degree mismatch");
  TernaryForm r(a.degree);
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = F.add(a.coeffs[i], b.coeffs[i]);
  return r;
}

inline TernaryForm scale(const FieldCtx& F, const TernaryForm& a, FieldElem s) {
  TernaryForm r(a.degree);
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = F.mul(a.coeffs[i], s);
  return r;
}

inline TernaryForm multiply(const FieldCtx& F, const TernaryForm& a, const TernaryForm& b) {
  TernaryForm r(a.degree + b.degree);
  const auto& ma = monomials(a.degree);
  const auto& mb = monomials(b.degree);
  for (std::size_t u = 0; u < ma.size(); ++u) {
    if (a.coeffs[u].is_zero()) continue;
    for (std::size_t v = 0; v < mb.size(); ++v) {
      if (b.coeffs[v].is_zero()) continue;
      auto& slot = r.coeffs[monomial_index(r.degree, ma[u][0] + mb[v][0], ma[u][1] + mb[v][1])];
      slot = F.add(slot, F.mul(a.coeffs[u], b.coeffs[v]));
    }
  }
  return r;
}

/// f(A * (x, y, z)^T) for a 3x3 matrix A over F_q (row-major).
inline TernaryForm substitute_linear(const FieldCtx& F, const TernaryForm& f, const std::array<FieldElem, 9>& A) {
  const int d = f.degree;
  std::array<TernaryForm, 3> lin{TernaryForm(1), TernaryForm(1), TernaryForm(1)};
  for (int v = 0; v < 3; ++v) lin[v].coeffs = {A[3 * v], A[3 * v + 1], A[3 * v + 2]};
  std::array<std::vector<TernaryForm>, 3> pw;
  for (int v = 0; v < 3; ++v) {
    TernaryForm one(0);
    one.coeffs[0] = kOne;
    pw[v].push_back(one);
    for (int e = 1; e <= d; ++e) pw[v].push_back(multiply(F, pw[v].back(), lin[v]));
  }
  TernaryForm r(d);
  const auto& mons = monomials(d);
  for (std::size_t u = 0; u < mons.size(); ++u) {
    if (f.coeffs[u].is_zero()) continue;
    const auto term = multiply(F, multiply(F, pw[0][mons[u][0]], pw[1][mons[u][1]]), pw[2][mons[u][2]]);
    r = add(F, r, scale(F, term, f.coeffs[u]));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Binary forms

inline BinaryForm binary_multiply(const FieldCtx& F, const BinaryForm& a, const BinaryForm& b) {
  BinaryForm r(a.degree + b.degree);
  for (int i = 0; i <= a.degree; ++i) {
    if (a.coeffs[i].is_zero()) continue;
    for (int j = 0; j <= b.degree; ++j) r.coeffs[i + j] = F.add(r.coeffs[i + j], F.mul(a.coeffs[i], b.coeffs[j]));
  }
  return r;
}

inline BinaryForm embed_binary(const FieldCtx& F, const BinaryForm& g) {
  BinaryForm r(g.degree);
  for (int i = 0; i <= g.degree; ++i) r.coeffs[i] = F.embed(g.coeffs[i]);
  return r;
}

inline FieldElem evaluate_binary(const FieldCtx& F, const BinaryForm& g, FieldElem s, FieldElem t) {
  FieldElem acc = kZero, tp = kOne;
  const int d = g.degree;
  std::vector<FieldElem> sp(d + 1);
  sp[0] = kOne;
  for (int e = 1; e <= d; ++e) sp[e] = F.mul(sp[e - 1], s);
  for (int i = 0; i <= d; ++i) {
    acc = F.add(acc, F.mul(g.coeffs[i], F.mul(sp[d - i], tp)));
    tp = F.mul(tp, t);
  }
  return acc;
}

/// Linear map f -> f(s*B0 + t*B1) for a fixed line and degree. Each monomial's
/// image is materialized once, so a restriction is one pass over the
/// coefficients.
class LineRestriction {
 public:
  LineRestriction(const FieldCtx& F, const ProjLine& L, int d) : F_(&F), degree_(d) {
    std::array<std::vector<BinaryForm>, 3> pw;
    for (int v = 0; v < 3; ++v) {
      BinaryForm lin(1, {L.basis[0].c[v], L.basis[1].c[v]});
      BinaryForm one(0, {kOne});
      pw[v].push_back(one);
      for (int e = 1; e <= d; ++e) pw[v].push_back(binary_multiply(F, pw[v].back(), lin));
    }
    const auto& mons = monomials(d);
    image_.reserve(mons.size() * (d + 1));
    for (const auto& m : mons) {
      const auto img = binary_multiply(F, binary_multiply(F, pw[0][m[0]], pw[1][m[1]]), pw[2][m[2]]);
      image_.insert(image_.end(), img.coeffs.begin(), img.coeffs.end());
    }
  }

  int degree() const { return degree_; }

  BinaryForm apply(const TernaryForm& f) const {
    if (f.degree != degree_) throw std::invalid_argument("LineRestriction: degree mismatch");
    const FieldCtx& F = *F_;
    BinaryForm g(degree_);
    const std::size_t w = static_cast<std::size_t>(degree_) + 1;
    for (std::size_t u = 0; u < f.coeffs.size(); ++u) {
      const FieldElem c = f.coeffs[u];
      if (c.is_zero()) continue;
      const FieldElem* row = &image_[u * w];
      for (std::size_t i = 0; i < w; ++i)
        if (!row[i].is_zero()) g.coeffs[i] = F.add(g.coeffs[i], F.mul(c, row[i]));
    }
    return g;
  }

  /// Image of the monomial with coefficient index u, as d+1 coefficients.
  std::span<const FieldElem> monomial_image(std::size_t u) const {
    const std::size_t w = static_cast<std::size_t>(degree_) + 1;
    return {image_.data() + u * w, w};
  }

 private:
  const FieldCtx* F_;
  int degree_;
  std::vector<FieldElem> image_;
};

inline BinaryForm restrict_to_line(const FieldCtx& F, const TernaryForm& f, const ProjLine& L) {
  return LineRestriction(F, L, f.degree).apply(f);
}

/// True iff g != 0 and g has deg g distinct roots in P^1 over the algebraic
/// closure.
inline bool binary_squarefree(const FieldCtx& F, const BinaryForm& g) {
  const int d = g.degree;
  int first = -1;
  for (int i = 0; i <= d; ++i) {
    if (!g.coeffs[i].is_zero()) {
      first = i;
      break;
    }
  }
  if (first < 0) return false;
  if (d == 0) return true;
  if (d >= 2) {
    // Both partials vanish identically: g is a p-th power.
    bool all_zero = true;
    for (int i = 0; i <= d && all_zero; ++i) {
      const FieldElem gs = F.mul(F.from_int(d - i), g.coeffs[i]);
      const FieldElem gt = F.mul(F.from_int(i), g.coeffs[i]);
      all_zero = gs.is_zero() && gt.is_zero();
    }
    if (all_zero) return false;
  }
  // t^first divides g: root [1:0] with that multiplicity.
  if (first >= 2) return false;
  // Dehomogenize at t = 1: h(s) = g(s, 1).
  poly::Poly h(d + 1);
  for (int i = 0; i <= d; ++i) h[d - i] = g.coeffs[i];
  poly::trim(h);
  if (poly::degree(h) <= 1) return true;
  const auto dh = poly::derivative(F, h);
  if (dh.empty()) return false;
  return poly::degree(poly::gcd(F, h, dh)) == 0;
}

/// Largest m such that (t0*s - s0*t)^m divides g, g with coefficients in F.
inline int linear_factor_multiplicity(const FieldCtx& F, const BinaryForm& g, FieldElem s0, FieldElem t0) {
  if (s0.is_zero() && t0.is_zero()) throw std::invalid_argument("root (0,0) is not a point of P^1");
  if (g.is_zero()) throw std::domain_error("multiplicity undefined for the zero form");
  // Divide by alpha*s + beta*t with alpha = t0, beta = -s0.
  const FieldElem alpha = t0, beta = F.neg(s0);
  std::vector<FieldElem> cur = g.coeffs;
  int mult = 0;
  while (cur.size() >= 2) {
    const std::size_t d = cur.size() - 1;
    std::vector<FieldElem> quo(d);
    bool divides = true;
    if (!alpha.is_zero()) {
      const FieldElem ia = F.inv(alpha);
      FieldElem prev = kZero;
      for (std::size_t i = 0; i < d; ++i) {
        quo[i] = F.mul(F.sub(cur[i], F.mul(beta, prev)), ia);
        prev = quo[i];
      }
      divides = cur[d] == F.mul(beta, prev);
    } else {
      const FieldElem ib = F.inv(beta);
      divides = cur[0].is_zero();
      for (std::size_t j = 1; j <= d; ++j) quo[j - 1] = F.mul(cur[j], ib);
    }
    if (!divides) break;
    ++mult;
    cur = std::move(quo);
  }
  return mult;
}

/// Number of binary forms of degree d over F_q with a repeated root, zero
/// included, by exhausting all q^{d+1} forms.
inline std::uint64_t count_nonsquarefree(const FieldCtx& F, int d) {
  if (d < 1) throw std::invalid_argument("count_nonsquarefree: d must be >= 1");
  const std::uint32_t q = F.size();
  std::uint64_t total = 1;
  for (int i = 0; i <= d; ++i) {
    total *= q;
    if (total > (std::uint64_t{1} << 24)) throw std::length_error("count_nonsquarefree: q^(d+1) exceeds 2^24");
  }
  BinaryForm g(d);
  std::uint64_t count = 0;
  for (std::uint64_t n = 0; n < total; ++n) {
    if (!binary_squarefree(F, g)) ++count;
    for (int i = 0; i <= d; ++i) {
      if (++g.coeffs[i].idx < q) break;
      g.coeffs[i].idx = 0;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Text format: terms "c*x^i*y^j*z^k" joined by '+', coefficients as integer
// encodings. Zero coefficients are omitted; the zero form is written as a
// single term with coefficient 0 so its degree survives a round trip.

inline std::string to_string(const TernaryForm& f) {
  std::string out;
  const auto& mons = monomials(f.degree);
  for (std::size_t u = 0; u < mons.size(); ++u) {
    if (f.coeffs[u].is_zero()) continue;
    if (!out.empty()) out += '+';
    out += std::to_string(f.coeffs[u].idx) + "*x^" + std::to_string(mons[u][0]) + "*y^" + std::to_string(mons[u][1]) +
           "*z^" + std::to_string(mons[u][2]);
  }
  if (out.empty()) out = "0*x^" + std::to_string(f.degree) + "*y^0*z^0";
  return out;
}

inline TernaryForm parse_form(std::string_view text, std::uint32_t field_size) {
  auto fail = [&](const std::string& why) -> TernaryForm {
    throw std::invalid_argument("parse_form: " + why + " in '" + std::string(text) + "'");
  };
  auto read_int = [&](std::string_view& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr == s.data()) fail("expected integer");
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return v;
  };
  auto expect = [&](std::string_view& s, std::string_view tok) {
    if (s.substr(0, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
    s.remove_prefix(tok.size());
  };

  struct Term {
    std::uint64_t c, i, j, k;
  };
  std::vector<Term> terms;
  std::string_view s = text;
  while (true) {
    Term t{};
    t.c = read_int(s);
    expect(s, "*x^");
    t.i = read_int(s);
    expect(s, "*y^");
    t.j = read_int(s);
    expect(s, "*z^");
    t.k = read_int(s);
    terms.push_back(t);
    if (s.empty()) break;
    expect(s, "+");
  }
  const std::uint64_t d = terms.front().i + terms.front().j + terms.front().k;
  if (d > 1000) return fail("degree too large");
  TernaryForm f(static_cast<int>(d));
  std::vector<bool> seen(f.coeffs.size(), false);
  for (const auto& t : terms) {
    if (t.i + t.j + t.k != d) return fail("terms of mixed degree");
    if (t.c >= field_size) return fail("coefficient outside field");
    const auto u = monomial_index(static_cast<int>(d), static_cast<int>(t.i), static_cast<int>(t.j));
    if (seen[u]) return fail("repeated monomial");
    seen[u] = true;
    f.coeffs[u] = FieldElem{static_cast<std::uint32_t>(t.c)};
  }
  return f;
}

}  // namespace tfree
