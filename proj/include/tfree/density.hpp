#pragma once

// Finite-degree densities mu_d(A) = #A_d / #R_d by exhaustive census or Monte
// Carlo sampling. R_d includes the zero form.
//
// A predicate is a conjunction of atoms, each optionally negated:
//   tL(l)        restriction to line l is not squarefree
//   tLP(l,p)     tangent to line l at point p (p may be "i@e", the i-th point
//                of P^2 over F_{q^e})
//   sQ(p)        singular at p
//   a0(p)        tangent at p to none of the q+1 lines through p
//   aL(l,p)      tangent to l at p and not singular at p
//   smooth, tf (transverse-free), F (smooth and transverse-free), always
// Lines and points are indices into the plane's global order.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "tfree/conditions.hpp"
#include "tfree/curves.hpp"
#include "tfree/forms.hpp"
#include "tfree/numeric.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

/// Thrown when an exhaustive computation would exceed its configured size.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct PointRef {
  std::uint32_t ext = 1;  ///< coordinates live in F_{q^ext}
  std::size_t index = 0;  ///< index into enumerate_points(F_{q^ext})

  std::string str() const { return ext == 1 ? std::to_string(index) : std::to_string(index) + "@" + std::to_string(ext); }
};

enum class AtomKind { TangentLine, TangentAt, Singular, NoTangent, OnlyTangent, Smooth, TransverseFree, Both, Always };

struct Atom {
  AtomKind kind = AtomKind::Always;
  bool negated = false;
  std::size_t line = 0;
  PointRef point;
};

struct PredicateSpec {
  std::vector<Atom> atoms;

  std::string str() const {
    std::string out;
    for (const auto& a : atoms) {
      if (!out.empty()) out += ',';
      if (a.negated) out += '!';
      switch (a.kind) {
        case AtomKind::TangentLine: out += "tL(" + std::to_string(a.line) + ")"; break;
        case AtomKind::TangentAt: out += "tLP(" + std::to_string(a.line) + "," + a.point.str() + ")"; break;
        case AtomKind::Singular: out += "sQ(" + a.point.str() + ")"; break;
        case AtomKind::NoTangent: out += "a0(" + a.point.str() + ")"; break;
        case AtomKind::OnlyTangent: out += "aL(" + std::to_string(a.line) + "," + a.point.str() + ")"; break;
        case AtomKind::Smooth: out += "smooth"; break;
        case AtomKind::TransverseFree: out += "tf"; break;
        case AtomKind::Both: out += "F"; break;
        case AtomKind::Always: out += "always"; break;
      }
    }
    return out.empty() ? "always" : out;
  }
};

/// Parses "tLP(0,1),!sQ(5)". Atoms are separated by ',' or '&' at top level.
inline PredicateSpec parse_predicate(std::string_view text) {
  auto fail = [&](const std::string& why) {
    return std::invalid_argument("predicate '" + std::string(text) + "': " + why);
  };
  PredicateSpec spec;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_uint = [&]() -> std::uint64_t {
    skip_ws();
    const std::size_t start = pos;
    std::uint64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) v = v * 10 + (text[pos++] - '0');
    if (pos == start) throw fail("expected a number at offset " + std::to_string(start));
    return v;
  };
  auto read_point = [&]() {
    PointRef p;
    p.index = read_uint();
    skip_ws();
    if (pos < text.size() && text[pos] == '@') {
      ++pos;
      p.ext = static_cast<std::uint32_t>(read_uint());
      if (p.ext == 0) throw fail("extension degree must be positive");
    }
    return p;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) throw fail(std::string("expected '") + c + "'");
    ++pos;
  };
  while (true) {
    skip_ws();
    Atom a;
    if (pos < text.size() && text[pos] == '!') {
      a.negated = true;
      ++pos;
      skip_ws();
    }
    const std::size_t start = pos;
    while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string name(text.substr(start, pos - start));
    if (name == "tL") {
      a.kind = AtomKind::TangentLine;
      expect('(');
      a.line = read_uint();
      expect(')');
    } else if (name == "tLP" || name == "aL") {
      a.kind = name == "tLP" ? AtomKind::TangentAt : AtomKind::OnlyTangent;
      expect('(');
      a.line = read_uint();
      expect(',');
      a.point = read_point();
      expect(')');
    } else if (name == "sQ" || name == "a0") {
      a.kind = name == "sQ" ? AtomKind::Singular : AtomKind::NoTangent;
      expect('(');
      a.point = read_point();
      expect(')');
    } else if (name == "smooth") {
      a.kind = AtomKind::Smooth;
    } else if (name == "tf") {
      a.kind = AtomKind::TransverseFree;
    } else if (name == "F") {
      a.kind = AtomKind::Both;
    } else if (name == "always") {
      a.kind = AtomKind::Always;
    } else {
      throw fail(name.empty() ? "expected an atom" : "unknown atom '" + name + "'");
    }
    spec.atoms.push_back(a);
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != ',' && text[pos] != '&') throw fail("expected ',' between atoms");
    ++pos;
  }
  return spec;
}

/// A point reference resolved to its field, coordinates and closed-point data.
struct ResolvedPoint {
  std::shared_ptr<const FieldCtx> field;
  ProjPoint point;
  int degree = 1;
  /// Smallest coordinate triple in the Frobenius orbit; identifies the closed point.
  ProjPoint orbit_key;
};

inline ResolvedPoint resolve_point(const Plane& plane, const PointRef& ref) {
  const auto E = extension(plane.field(), ref.ext);
  const std::size_t total = static_cast<std::size_t>(E->size()) * E->size() + E->size() + 1;
  if (ref.index >= total) throw std::out_of_range("point index " + ref.str() + " out of range");
  // The global order is [0:0:1], [0:1:z], [1:y:z]; index it directly.
  const std::uint32_t n = E->size();
  ProjPoint P;
  if (ref.index == 0)
    P = ProjPoint{{kZero, kZero, kOne}};
  else if (ref.index <= n)
    P = ProjPoint{{kZero, kOne, FieldElem{static_cast<std::uint32_t>(ref.index - 1)}}};
  else {
    const std::size_t r = ref.index - 1 - n;
    P = ProjPoint{{kOne, FieldElem{static_cast<std::uint32_t>(r / n)}, FieldElem{static_cast<std::uint32_t>(r % n)}}};
  }
  ResolvedPoint out{E, P, point_degree(*E, P), P};
  if (out.degree == 1 && ref.ext != 1) {
    out.field = extension(plane.field(), 1);
    out.point = to_base_point(*E, P);
  } else if (out.degree != static_cast<int>(ref.ext)) {
    throw std::invalid_argument("point " + ref.str() + " has degree " + std::to_string(out.degree) +
                                "; give it over F_{q^" + std::to_string(out.degree) + "} instead");
  }
  ProjPoint cur = out.point;
  for (int j = 0; j < out.degree; ++j) {
    out.orbit_key = std::min(out.orbit_key, cur);
    cur = normalize(*out.field, {out.field->frobenius(cur.c[0]), out.field->frobenius(cur.c[1]),
                                 out.field->frobenius(cur.c[2])});
  }
  if (out.degree == 1) out.orbit_key = out.point;
  return out;
}

/// A predicate bound to a plane and a degree, ready to evaluate.
class CompiledPredicate {
 public:
  CompiledPredicate(const Plane& plane, const PredicateSpec& spec, int d) : plane_(&plane), spec_(spec), degree_(d) {
    if (d < 1) throw std::invalid_argument("predicate: degree must be >= 1");
    const auto& lines = plane.lines();
    auto line_at = [&](std::size_t l) -> const ProjLine& {
      if (l >= lines.size()) throw std::out_of_range("line index " + std::to_string(l) + " out of range");
      return lines[l];
    };
    for (const auto& a : spec.atoms) {
      Compiled c{a.kind, a.negated, {}, {}};
      switch (a.kind) {
        case AtomKind::TangentLine:
          c.restriction = std::make_shared<LineRestriction>(plane.field(), line_at(a.line), d);
          break;
        case AtomKind::TangentAt:
        case AtomKind::OnlyTangent: {
          const ProjLine& L = line_at(a.line);
          const ResolvedPoint P = resolve_point(plane, a.point);
          if (!incident(*P.field, P.point, L))
            throw std::invalid_argument("point " + a.point.str() + " is not on line " + std::to_string(a.line));
          c.conditions.push_back(tangency_conditions(plane.field(), L, P.field, P.point, d));
          if (a.kind == AtomKind::OnlyTangent) c.conditions.push_back(singularity_conditions(P.field, P.point, d));
          break;
        }
        case AtomKind::Singular: {
          const ResolvedPoint P = resolve_point(plane, a.point);
          c.conditions.push_back(singularity_conditions(P.field, P.point, d));
          break;
        }
        case AtomKind::NoTangent: {
          const ResolvedPoint P = resolve_point(plane, a.point);
          if (P.degree != 1) throw std::invalid_argument("a0 needs an F_q-point");
          for (const auto& L : plane.lines_through(P.point))
            c.conditions.push_back(tangency_conditions(plane.field(), L, P.field, P.point, d));
          break;
        }
        default:
          break;
      }
      atoms_.push_back(std::move(c));
    }
  }

  int degree() const { return degree_; }
  const PredicateSpec& spec() const { return spec_; }

  bool operator()(const TernaryForm& f) const {
    for (const auto& a : atoms_)
      if (eval(a, f) == a.negated) return false;
    return true;
  }

 private:
  struct Compiled {
    AtomKind kind;
    bool negated;
    std::shared_ptr<LineRestriction> restriction;
    std::vector<LinearConditions> conditions;
  };

  bool eval(const Compiled& a, const TernaryForm& f) const {
    switch (a.kind) {
      case AtomKind::TangentLine:
        return !binary_squarefree(plane_->field(), a.restriction->apply(f));
      case AtomKind::TangentAt:
      case AtomKind::Singular:
        return a.conditions[0].satisfied(f);
      case AtomKind::OnlyTangent:
        return a.conditions[0].satisfied(f) && !a.conditions[1].satisfied(f);
      case AtomKind::NoTangent:
        for (const auto& c : a.conditions)
          if (c.satisfied(f)) return false;
        return true;
      case AtomKind::Smooth:
        return !f.is_zero() && is_smooth(*plane_, f);
      case AtomKind::TransverseFree:
        return is_transverse_free(*plane_, f);
      case AtomKind::Both:
        return !f.is_zero() && is_transverse_free(*plane_, f) && is_smooth(*plane_, f);
      case AtomKind::Always:
        return true;
    }
    return false;
  }

  const Plane* plane_;
  PredicateSpec spec_;
  int degree_;
  std::vector<Compiled> atoms_;
};

/// Density predicted by independence of local conditions at distinct closed
/// points: T_{L,P} has q^{-2 deg P}, S_Q has q^{-3}, A_0(Q) has 1 - q^{-1},
/// A_L(Q) has q^{-2} - q^{-3}, complements 1 minus these, and T_L alone has
/// q^{-1} + q^{-2} - q^{-3}. Returns nullopt for predicates outside this
/// family or with a repeated point.
inline std::optional<Rational> predicted_density(const Plane& plane, const PredicateSpec& spec) {
  const Rational q(plane.q());
  if (spec.atoms.size() == 1 && spec.atoms[0].kind == AtomKind::TangentLine) {
    const Rational v = 1 / q + 1 / (q * q) - 1 / (q * q * q);
    return spec.atoms[0].negated ? 1 - v : v;
  }
  Rational product = 1;
  std::vector<std::pair<int, ProjPoint>> seen;
  for (const auto& a : spec.atoms) {
    if (a.kind == AtomKind::Always) {
      if (a.negated) return Rational(0);
      continue;
    }
    if (a.kind != AtomKind::TangentAt && a.kind != AtomKind::Singular && a.kind != AtomKind::NoTangent &&
        a.kind != AtomKind::OnlyTangent)
      return std::nullopt;
    const ResolvedPoint P = resolve_point(plane, a.point);
    Rational v;
    switch (a.kind) {
      case AtomKind::TangentAt: v = rational_pow(q, -2 * P.degree); break;
      case AtomKind::Singular: v = 1 / (q * q * q); break;
      case AtomKind::NoTangent: v = 1 - 1 / q; break;
      default: v = 1 / (q * q) - 1 / (q * q * q); break;
    }
    const std::pair<int, ProjPoint> key{P.degree, P.orbit_key};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) return std::nullopt;
    seen.push_back(key);
    product *= a.negated ? 1 - v : v;
  }
  return product;
}

/// Total length of the zero-dimensional schemes behind the local atoms: 2 deg P
/// for a tangency, 3 for conditions on the first-order neighbourhood of a
/// point. Restriction to such a scheme is surjective once d >= length - 1.
inline int local_scheme_length(const Plane& plane, const PredicateSpec& spec) {
  int total = 0;
  for (const auto& a : spec.atoms) {
    switch (a.kind) {
      case AtomKind::TangentAt: total += 2 * resolve_point(plane, a.point).degree; break;
      case AtomKind::Singular:
      case AtomKind::NoTangent:
      case AtomKind::OnlyTangent: total += 3; break;
      default: break;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------

struct DensityEstimate {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  double estimate = 0;
  std::optional<double> ci_low, ci_high;
  std::string method;  ///< "census" or "monte_carlo"
  std::optional<std::uint64_t> seed;

  Rational exact() const { return Rational(hits) / total; }
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Wilson score interval for hits out of n.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kWilsonZ95) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be positive");
  const double nn = static_cast<double>(n), p = static_cast<double>(hits) / nn, z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  double lo = std::max(0.0, center - half), hi = std::min(1.0, center + half);
  if (hits == 0) lo = 0;
  if (hits == n) hi = 1;
  return {lo, hi};
}

/// Number of coefficient vectors q^{(d+1)(d+2)/2}, or nullopt above `cap`.
inline std::optional<std::uint64_t> coefficient_space_size(std::uint32_t q, int d, std::uint64_t cap) {
  std::uint64_t s = 1;
  for (std::size_t i = 0; i < monomial_count(d); ++i) {
    if (s > cap / q) return std::nullopt;
    s *= q;
  }
  return s;
}

inline constexpr std::uint64_t kDefaultCensusCap = std::uint64_t{1} << 34;

inline unsigned default_threads() {
  if (const char* env = std::getenv("TFREE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over [0, total) split into contiguous blocks.
template <typename Body>
void parallel_ranges(std::uint64_t total, unsigned threads, Body body) {
  threads = std::max(1u, threads);
  if (threads == 1 || total < 2 * threads) {
    body(std::uint64_t{0}, total);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t b = total / threads * t + std::min<std::uint64_t>(t, total % threads);
    const std::uint64_t e = b + total / threads + (t < total % threads ? 1 : 0);
    pool.emplace_back([=, &body] { body(b, e); });
  }
}

/// Exact count of f in R_d (zero included) satisfying the predicate.
inline DensityEstimate census(const Plane& plane, const CompiledPredicate& pred, unsigned threads = 1,
                              std::uint64_t cap = kDefaultCensusCap) {
  const int d = pred.degree();
  const std::uint32_t q = plane.q();
  const auto size = coefficient_space_size(q, d, cap);
  if (!size)
    throw CapExceeded("census: q^" + std::to_string(monomial_count(d)) + " coefficient vectors exceed the cap of " +
                      std::to_string(cap) + "; use monte carlo sampling");
  std::atomic<std::uint64_t> hits{0};
  parallel_ranges(*size, threads, [&](std::uint64_t begin, std::uint64_t end) {
    TernaryForm f(d);
    std::uint64_t x = begin;
    for (auto& c : f.coeffs) {
      c.idx = static_cast<std::uint32_t>(x % q);
      x /= q;
    }
    std::uint64_t local = 0;
    for (std::uint64_t n = begin; n < end; ++n) {
      if (pred(f)) ++local;
      for (auto& c : f.coeffs) {
        if (++c.idx < q) break;
        c.idx = 0;
      }
    }
    hits += local;
  });
  DensityEstimate est;
  est.hits = hits;
  est.total = *size;
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(est.total);
  est.method = "census";
  return est;
}

/// splitmix64 step; used to derive an independent stream per sample index.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// The i-th sample of a seeded run: coefficients uniform in F_q.
inline void sample_form(std::uint32_t q, std::uint64_t seed, std::uint64_t index, TernaryForm& f) {
  std::uint64_t state = seed;
  state = splitmix64(state) ^ index;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % q;
  for (auto& c : f.coeffs) {
    std::uint64_t r;
    do r = splitmix64(state);
    while (r >= limit);
    c.idx = static_cast<std::uint32_t>(r % q);
  }
}

/// Estimate from `samples` uniform forms. The result depends only on
/// (seed, samples), not on the thread count.
inline DensityEstimate monte_carlo(const Plane& plane, const CompiledPredicate& pred, std::uint64_t samples,
                                   std::uint64_t seed, unsigned threads = 1) {
  if (samples == 0) throw std::invalid_argument("monte_carlo: samples must be >= 1");
  const int d = pred.degree();
  std::atomic<std::uint64_t> hits{0};
  parallel_ranges(samples, threads, [&](std::uint64_t begin, std::uint64_t end) {
    TernaryForm f(d);
    std::uint64_t local = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      sample_form(plane.q(), seed, i, f);
      if (pred(f)) ++local;
    }
    hits += local;
  });
  DensityEstimate est;
  est.hits = hits;
  est.total = samples;
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(samples);
  std::tie(est.ci_low, est.ci_high) = wilson_interval(est.hits, samples);
  est.method = "monte_carlo";
  est.seed = seed;
  return est;
}

struct ThresholdReport {
  Rational predicted;
  int surjectivity_degree = 0;  ///< scheme length - 1
  std::vector<std::pair<int, DensityEstimate>> observed;
  std::optional<int> threshold;  ///< first d from which every census matched
};

/// Censuses at d = d_lo..d_hi (stopping at the size cap) and reports the first
/// degree from which the census equals the independence prediction.
inline ThresholdReport find_threshold(const Plane& plane, const PredicateSpec& spec, int d_lo, int d_hi,
                                      unsigned threads = 1, std::uint64_t cap = std::uint64_t{1} << 24) {
  const auto predicted = predicted_density(plane, spec);
  if (!predicted) throw std::invalid_argument("find_threshold: predicate has no independence prediction");
  ThresholdReport rep{*predicted, std::max(0, local_scheme_length(plane, spec) - 1), {}, std::nullopt};
  for (int d = d_lo; d <= d_hi; ++d) {
    if (!coefficient_space_size(plane.q(), d, cap)) break;
    const auto est = census(plane, CompiledPredicate(plane, spec, d), threads, cap);
    rep.observed.emplace_back(d, est);
    if (est.exact() == *predicted) {
      if (!rep.threshold) rep.threshold = d;
    } else {
      rep.threshold.reset();
    }
  }
  return rep;
}

}  // namespace tfree
