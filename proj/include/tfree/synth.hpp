#pragma once

// Smooth transverse-free curves from perfect point-line matchings: require
// tangency to line sigma(i) at point i for every point, solve the linear
// system, and sample smooth members of its solution space.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfree/conditions.hpp"
#include "tfree/curves.hpp"
#include "tfree/density.hpp"
#include "tfree/forms.hpp"
#include "tfree/levi.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

struct TangencySystem {
  std::uint32_t q = 0;
  int d = 0;
  Matching matching;
  std::size_t dimension = 0;                  ///< number of monomials
  std::vector<std::vector<FieldElem>> rows;   ///< two functionals per matched pair
  std::vector<TernaryForm> kernel_basis;

  std::size_t rank() const { return dimension - kernel_basis.size(); }
};

/// Reduced row echelon form over F in place; returns the pivot column of each
/// nonzero row. Pivots are taken in column order, rows in their given order.
inline std::vector<std::size_t> row_reduce(const FieldCtx& F, std::vector<std::vector<FieldElem>>& A) {
  std::vector<std::size_t> pivots;
  if (A.empty()) return pivots;
  const std::size_t cols = A[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < A.size(); ++c) {
    std::size_t p = r;
    while (p < A.size() && A[p][c].is_zero()) ++p;
    if (p == A.size()) continue;
    std::swap(A[r], A[p]);
    const FieldElem inv = F.inv(A[r][c]);
    for (auto& x : A[r]) x = F.mul(x, inv);
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (i == r || A[i][c].is_zero()) continue;
      const FieldElem factor = A[i][c];
      for (std::size_t j = c; j < cols; ++j) A[i][j] = F.sub(A[i][j], F.mul(factor, A[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Basis of {x : A x = 0}, one vector per free column in column order.
inline std::vector<std::vector<FieldElem>> kernel_basis(const FieldCtx& F, std::vector<std::vector<FieldElem>> A,
                                                        std::size_t cols) {
  const auto pivots = row_reduce(F, A);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<FieldElem>> basis;
  for (std::size_t j = 0; j < cols; ++j) {
    if (is_pivot[j]) continue;
    std::vector<FieldElem> v(cols, kZero);
    v[j] = kOne;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(A[r][j]);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Forms of degree d tangent to line sigma[i] at point i for every point i.
inline TangencySystem tangency_system(const Plane& plane, const Matching& m, int d) {
  if (d < 1) throw std::invalid_argument("tangency_system: d must be >= 1");
  const auto M = incidence_matrix(plane);
  if (!is_valid_matching(M.bits, m)) throw std::invalid_argument("tangency_system: not a perfect point-line matching");
  const FieldCtx& F = plane.field();
  const auto base = extension(F, 1);
  TangencySystem sys;
  sys.q = plane.q();
  sys.d = d;
  sys.matching = m;
  sys.dimension = monomial_count(d);
  for (std::size_t i = 0; i < plane.points().size(); ++i) {
    const auto cond = tangency_conditions(F, plane.lines()[m.sigma[i]], base, plane.points()[i], d);
    for (std::size_t r = 0; r < cond.count(); ++r) {
      const auto row = cond.row(r);
      sys.rows.emplace_back(row.begin(), row.end());
    }
  }
  for (auto& v : kernel_basis(F, sys.rows, sys.dimension)) sys.kernel_basis.emplace_back(d, std::move(v));
  return sys;
}

/// The kernel element with coordinates given by the base-q digits of index.
inline TernaryForm kernel_element(const FieldCtx& F, const TangencySystem& sys, std::uint64_t index) {
  TernaryForm f(sys.d);
  for (const auto& b : sys.kernel_basis) {
    const FieldElem c{static_cast<std::uint32_t>(index % sys.q)};
    index /= sys.q;
    if (!c.is_zero()) f = add(F, f, scale(F, b, c));
  }
  return f;
}

struct SynthResult {
  std::optional<TernaryForm> form;
  std::uint64_t attempts = 0;
  std::uint64_t nonsmooth = 0;
  bool exhaustive = false;  ///< the whole kernel was scanned
  std::uint64_t seed = 0;
  std::string failure;  ///< empty on success
};

inline constexpr std::uint64_t kDefaultSynthAttempts = 1000;

/// Draws nonzero kernel elements until one is smooth. When the kernel has at
/// most max_attempts nonzero elements they are all visited, starting at a
/// seed-dependent offset. The result is re-checked with is_transverse_free and
/// is_smooth before it is returned.
inline SynthResult sample_transverse_free(const Plane& plane, const TangencySystem& sys, std::uint64_t seed,
                                          std::uint64_t max_attempts = kDefaultSynthAttempts) {
  if (max_attempts < 1) throw std::invalid_argument("sample_transverse_free: max_attempts must be >= 1");
  const FieldCtx& F = plane.field();
  SynthResult res;
  res.seed = seed;
  const std::size_t k = sys.kernel_basis.size();
  if (k == 0) {
    res.failure = "kernel is trivial";
    return res;
  }
  std::optional<std::uint64_t> nonzero;
  {
    std::uint64_t s = 1;
    bool small = true;
    for (std::size_t i = 0; i < k && small; ++i) {
      if (s > (max_attempts + 1) / sys.q) small = false;
      s *= sys.q;
    }
    if (small && s - 1 <= max_attempts) nonzero = s - 1;
  }
  res.exhaustive = nonzero.has_value();

  auto accept = [&](const TernaryForm& f) {
    ++res.attempts;
    if (!is_smooth(plane, f)) {
      ++res.nonsmooth;
      return false;
    }
    if (!is_transverse_free(plane, f)) throw std::logic_error("tangency system produced a curve with a transverse line");
    res.form = f;
    return true;
  };

  if (nonzero) {
    std::uint64_t state = seed;
    const std::uint64_t offset = splitmix64(state) % *nonzero;
    for (std::uint64_t t = 0; t < *nonzero; ++t)
      if (accept(kernel_element(F, sys, 1 + (offset + t) % *nonzero))) return res;
    res.failure = "no smooth curve among all " + std::to_string(*nonzero) + " nonzero kernel elements";
    return res;
  }

  for (std::uint64_t draw = 0; res.attempts < max_attempts; ++draw) {
    std::uint64_t state = seed;
    state = splitmix64(state) ^ draw;
    TernaryForm f(sys.d);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % sys.q;
    for (const auto& b : sys.kernel_basis) {
      std::uint64_t r;
      do r = splitmix64(state);
      while (r >= limit);
      const FieldElem c{static_cast<std::uint32_t>(r % sys.q)};
      if (!c.is_zero()) f = add(F, f, scale(F, b, c));
    }
    if (f.is_zero()) continue;
    if (accept(f)) return res;
  }
  res.failure = "no smooth curve in " + std::to_string(res.attempts) + " attempts (" + std::to_string(res.nonsmooth) +
                " non-smooth draws)";
  return res;
}

struct KernelScan {
  std::uint64_t nonzero = 0;
  std::uint64_t smooth = 0;
  std::optional<TernaryForm> first_smooth;
};

/// Counts smooth curves among all nonzero kernel elements.
inline KernelScan scan_kernel(const Plane& plane, const TangencySystem& sys, std::uint64_t cap = 1u << 20) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < sys.kernel_basis.size(); ++i) {
    if (total > cap / sys.q) throw CapExceeded("scan_kernel: kernel larger than cap");
    total *= sys.q;
  }
  KernelScan scan;
  scan.nonzero = total - 1;
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    const TernaryForm f = kernel_element(plane.field(), sys, idx);
    if (is_smooth(plane, f)) {
      ++scan.smooth;
      if (!scan.first_smooth) scan.first_smooth = f;
    }
  }
  return scan;
}

}  // namespace tfree
