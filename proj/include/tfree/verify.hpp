#pragma once

// Self-check suite: recomputes known exact values and identities and reports
// one record per check.

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tfree/bounds.hpp"
#include "tfree/curves.hpp"
#include "tfree/density.hpp"
#include "tfree/forms.hpp"
#include "tfree/levi.hpp"
#include "tfree/report.hpp"
#include "tfree/synth.hpp"

namespace tfree {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string expected;
  std::string observed;
  double elapsed_ms = 0;
};

inline json to_json(const CheckResult& c) {
  return json{{"check", c.name},
              {"passed", c.passed},
              {"expected", c.expected},
              {"observed", c.observed},
              {"elapsed_ms", c.elapsed_ms}};
}

/// Number of (f, Q, {L1, L2}) with f of degree d, Q an F_q-point and L1 != L2
/// lines through Q where "tangent to both at Q" and "singular at Q" disagree.
inline std::uint64_t tangent_pair_singular_violations(const Plane& plane, int d) {
  const auto size = coefficient_space_size(plane.q(), d, std::uint64_t{1} << 24);
  if (!size) throw CapExceeded("tangent_pair_singular_violations: coefficient space too large");
  const FieldCtx& F = plane.field();
  std::vector<std::vector<ProjLine>> through;
  for (const auto& Q : plane.points()) through.push_back(plane.lines_through(Q));
  TernaryForm f(d);
  std::uint64_t violations = 0;
  for (std::uint64_t n = 0; n < *size; ++n) {
    for (std::size_t Qi = 0; Qi < plane.points().size(); ++Qi) {
      const ProjPoint& Q = plane.points()[Qi];
      const bool singular = is_singular_at(F, f, Q);
      std::vector<bool> tangent;
      for (const auto& L : through[Qi]) tangent.push_back(is_tangent_at(F, f, L, Q));
      for (std::size_t a = 0; a < tangent.size(); ++a)
        for (std::size_t b = a + 1; b < tangent.size(); ++b)
          if ((tangent[a] && tangent[b]) != singular) ++violations;
    }
    for (auto& c : f.coeffs) {
      if (++c.idx < plane.q()) break;
      c.idx = 0;
    }
  }
  return violations;
}

/// Runs every check, calling `sink` as each finishes.
inline bool run_verification(const std::function<void(const CheckResult&)>& sink, unsigned threads = 1) {
  bool all = true;
  auto check = [&](std::string name, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult c;
    c.name = std::move(name);
    try {
      body(c);
    } catch (const std::exception& e) {
      c.passed = false;
      c.observed = std::string("exception: ") + e.what();
    }
    c.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    all = all && c.passed;
    sink(c);
  };
  auto eq = [](CheckResult& c, const std::string& expected, const std::string& observed) {
    c.expected = expected;
    c.observed = observed;
    c.passed = expected == observed;
  };

  const std::vector<std::pair<std::uint32_t, std::string>> permanents{{2, "24"}, {3, "3852"}, {4, "18534400"}};
  for (const auto& [q, value] : permanents) {
    check("permanent q=" + std::to_string(q), [&, q = q, value = value](CheckResult& c) {
      PermanentOptions opt;
      opt.threads = threads;
      eq(c, value, int128_to_string(permanent_ryser(incidence_matrix(q).bits, opt)));
    });
  }

  for (std::uint32_t q : {2u, 3u}) {
    const auto F = FieldCtx::for_order(q);
    for (int d = 1; d <= 5; ++d) {
      check("nonsquarefree binary forms q=" + std::to_string(q) + " d=" + std::to_string(d), [&](CheckResult& c) {
        const std::int64_t Q = q;
        std::int64_t expected = d == 1 ? 1 : d == 2 ? Q * Q : 1;
        if (d >= 3) {
          std::int64_t qd = 1;
          for (int i = 0; i < d - 2; ++i) qd *= Q;
          expected = qd * Q * Q + qd * Q - qd;
        }
        eq(c, std::to_string(expected), std::to_string(count_nonsquarefree(F, d)));
      });
    }
  }

  for (auto [q, d] : std::vector<std::pair<std::uint32_t, int>>{{2, 3}, {2, 4}, {3, 3}}) {
    check("tangent line census q=" + std::to_string(q) + " d=" + std::to_string(d), [&, q = q, d = d](CheckResult& c) {
      const Plane plane(q);
      const auto est = census(plane, CompiledPredicate(plane, parse_predicate("tL(0)"), d), threads);
      eq(c, rational_string(tangent_line_density(q)), rational_string(est.exact()));
    });
  }

  for (int d : {3, 4}) {
    check("two tangents at a point iff singular q=2 d=" + std::to_string(d), [&](CheckResult& c) {
      eq(c, "0", std::to_string(tangent_pair_singular_violations(Plane(2), d)));
    });
  }

  check("h(2)", [&](CheckResult& c) { eq(c, "91854/78125", rational_string(h_ratio(2))); });
  check("xi(2) prefix", [&](CheckResult& c) {
    eq(c, "7.4915409", format_fixed(to_decimal(xi_ratio(2)), 10).substr(0, 9));
  });
  check("inequalities q<=32", [&](CheckResult& c) {
    eq(c, "true", inequality_suite(32).all_hold() ? "true" : "false");
  });
  check("bertini lower q=3", [&](CheckResult& c) {
    eq(c, "0.99988803", format_fixed(bounds_report(3).bertini_lower.value, 12).substr(0, 10));
  });
  check("bertini lower q=2", [&](CheckResult& c) {
    eq(c, "0.1485", format_fixed(bounds_report(2).bertini_lower.value, 12).substr(0, 6));
  });
  check("bound ordering q<=9", [&](CheckResult& c) {
    bool ok = true;
    for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
      const auto r = bounds_report(q);
      ok = ok && r.lower.value <= r.upper_precise.value && r.upper_precise.value <= r.upper75.value;
    }
    eq(c, "true", ok ? "true" : "false");
  });

  for (std::uint32_t q : {2u, 3u}) {
    check("truncated tangency product q=" + std::to_string(q), [&](CheckResult& c) {
      const Decimal limit = to_decimal(tangent_line_density(q));
      Decimal prev = 0;
      bool ok = true;
      for (int r = 1; r <= 20; ++r) {
        const Decimal v = truncated_tangency_product(q, r);
        ok = ok && v > prev && v < limit;
        prev = v;
      }
      ok = ok && limit - prev < Decimal("1e-6");
      c.expected = "increasing, below " + format_sig(limit, 8) + ", within 1e-6 at r=20";
      c.observed = format_sig(prev, 12);
      c.passed = ok;
    });
  }

  check("synthesis round trip q=2 d=6", [&](CheckResult& c) {
    const Plane plane(2);
    const auto matchings = enumerate_matchings(incidence_matrix(plane).bits, 1);
    const auto sys = tangency_system(plane, matchings.at(0), 6);
    const auto res = sample_transverse_free(plane, sys, 1);
    c.expected = "smooth transverse-free form";
    if (!res.form) {
      c.observed = res.failure;
      return;
    }
    c.observed = to_string(*res.form);
    c.passed = is_transverse_free(plane, *res.form) && is_smooth(plane, *res.form);
  });

  return all;
}

}  // namespace tfree
