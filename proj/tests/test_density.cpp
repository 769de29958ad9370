#include <gtest/gtest.h>

#include <cstdlib>

#include "tfree/bounds.hpp"
#include "tfree/density.hpp"

using namespace tfree;

namespace {

Rational census_of(const Plane& plane, const std::string& predicate, int d, unsigned threads = 1) {
  return census(plane, CompiledPredicate(plane, parse_predicate(predicate), d), threads).exact();
}

// Lines at q = 2 used below: line 0 is z = 0 through points 1, 3, 5; line 1
// is y = 0 through points 0, 3, 4. Points 13@2 and 17@2 are the conjugate
// pair [1:u:0], [1:u+1:0] on line 0; 3@2 is [0:1:u] on line 3.
struct Config {
  const char* predicate;
  int threshold;
};

const Config kProductConfigs[] = {
    {"tLP(0,1)", 1},
    {"sQ(0)", 1},
    {"tLP(0,1),tLP(1,0)", 2},
    {"tLP(0,1),tLP(0,3)", 3},
    {"tLP(0,1),sQ(0)", 2},
    {"tLP(0,1),tLP(1,4),sQ(2)", 3},
    {"tLP(0,13@2)", 3},
    {"tLP(0,13@2),sQ(0)", 3},
    {"tLP(0,13@2),tLP(1,4)", 3},
    {"tLP(3,3@2),tLP(0,13@2)", 4},
};

}  // namespace

TEST(Parse, AtomsAndSeparators) {
  const auto spec = parse_predicate(" tLP(0, 1) & !sQ(5),a0(2@2) ,aL(3,4),smooth,tf,F,always,tL(6)");
  ASSERT_EQ(spec.atoms.size(), 9u);
  EXPECT_EQ(spec.atoms[0].kind, AtomKind::TangentAt);
  EXPECT_EQ(spec.atoms[1].kind, AtomKind::Singular);
  EXPECT_TRUE(spec.atoms[1].negated);
  EXPECT_EQ(spec.atoms[2].point.ext, 2u);
  EXPECT_EQ(spec.str(), "tLP(0,1),!sQ(5),a0(2@2),aL(3,4),smooth,tf,F,always,tL(6)");
  EXPECT_EQ(parse_predicate(spec.str()).str(), spec.str());
}

TEST(Parse, Errors) {
  for (const char* bad : {"", "tLP(0)", "sQ(x)", "foo(1)", "tL(0) tL(1)", "sQ(1@0)", "tL(0),", "!"})
    EXPECT_THROW(parse_predicate(bad), std::invalid_argument) << bad;
}

TEST(Compile, ResolvesAndValidatesPoints) {
  const Plane plane(2);
  EXPECT_THROW(CompiledPredicate(plane, parse_predicate("tLP(0,0)"), 3), std::invalid_argument);
  EXPECT_THROW(CompiledPredicate(plane, parse_predicate("tL(7)"), 3), std::out_of_range);
  EXPECT_THROW(CompiledPredicate(plane, parse_predicate("sQ(7)"), 3), std::out_of_range);
  EXPECT_THROW(CompiledPredicate(plane, parse_predicate("a0(13@2)"), 3), std::invalid_argument);
  EXPECT_THROW(CompiledPredicate(plane, parse_predicate("tL(0)"), 0), std::invalid_argument);

  // A rational point written over F_4 is the same as over F_2.
  const auto P = resolve_point(plane, PointRef{2, 1});
  EXPECT_EQ(P.degree, 1);
  EXPECT_EQ(P.point, plane.points()[1]);
  EXPECT_EQ(census_of(plane, "sQ(1@2)", 3), census_of(plane, "sQ(1)", 3));

  // A degree-2 point must be given over F_4, not F_16.
  const auto E4 = extension(plane.field(), 4);
  const auto pts = enumerate_points(*E4);
  std::size_t idx = 0;
  while (point_degree(*E4, pts[idx]) != 2) ++idx;
  EXPECT_THROW(resolve_point(plane, PointRef{4, idx}), std::invalid_argument);
  EXPECT_THROW(CompiledPredicate(plane, parse_predicate("sQ(" + std::to_string(idx) + "@4)"), 3),
               std::invalid_argument);
}

TEST(Census, TangentLineExamples) {
  const Plane p2(2), p3(3);
  EXPECT_EQ(census(p2, CompiledPredicate(p2, parse_predicate("tL(0)"), 3)).hits, 640u);
  EXPECT_EQ(census_of(p2, "tL(0)", 3), Rational(5, 8));
  EXPECT_EQ(census_of(p2, "tL(0)", 4), tangent_line_density(2));
  EXPECT_EQ(census_of(p3, "tL(0)", 3), Rational(11, 27));
  EXPECT_EQ(census_of(p2, "!tL(0)", 3), Rational(3, 8));
}

TEST(Census, SingularExample) {
  const Plane plane(2);
  const auto est = census(plane, CompiledPredicate(plane, parse_predicate("sQ(0)"), 3));
  EXPECT_EQ(est.hits, 128u);
  EXPECT_EQ(est.total, 1024u);
  EXPECT_EQ(est.method, "census");
  EXPECT_FALSE(est.ci_low.has_value());
}

TEST(Census, TangentLineIsIndependentOfTheLine) {
  const Plane plane(2);
  for (std::size_t l = 0; l < plane.lines().size(); ++l)
    EXPECT_EQ(census_of(plane, "tL(" + std::to_string(l) + ")", 3), Rational(5, 8));
}

TEST(Census, ThreadCountDoesNotChangeResult) {
  const Plane plane(3);
  const auto spec = parse_predicate("tLP(0,1),!sQ(0)");
  const auto a = census(plane, CompiledPredicate(plane, spec, 3), 1);
  const auto b = census(plane, CompiledPredicate(plane, spec, 3), 4);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_EQ(a.total, b.total);
}

TEST(Census, SmoothAndTransverseFree) {
  const Plane plane(2);
  EXPECT_EQ(census_of(plane, "smooth", 3), Rational(336, 1024));
  // No plane cubic over F_2 is both smooth and transverse-free.
  EXPECT_EQ(census_of(plane, "F", 3), Rational(0));
  EXPECT_EQ(census(plane, CompiledPredicate(plane, parse_predicate("F"), 4)).hits, 25u);
  EXPECT_EQ(census_of(plane, "always", 2), Rational(1));
  EXPECT_EQ(census_of(plane, "!always", 2), Rational(0));
}

TEST(Census, CapIsEnforced) {
  const Plane plane(2);
  EXPECT_THROW(census(plane, CompiledPredicate(plane, parse_predicate("tL(0)"), 9)), CapExceeded);
  EXPECT_THROW(census(plane, CompiledPredicate(plane, parse_predicate("tL(0)"), 4), 1, 1000), std::length_error);
  EXPECT_EQ(coefficient_space_size(2, 4, 1u << 15), std::optional<std::uint64_t>(1u << 15));
  EXPECT_FALSE(coefficient_space_size(2, 4, (1u << 15) - 1).has_value());
}

TEST(Prediction, ProductFormula) {
  const Plane plane(2);
  EXPECT_EQ(*predicted_density(plane, parse_predicate("tL(0)")), Rational(5, 8));
  EXPECT_EQ(*predicted_density(plane, parse_predicate("tLP(0,1),tLP(1,4),sQ(2)")), Rational(1, 128));
  EXPECT_EQ(*predicted_density(plane, parse_predicate("tLP(0,13@2)")), Rational(1, 16));
  EXPECT_EQ(*predicted_density(plane, parse_predicate("!a0(0)")), Rational(1, 2));
  EXPECT_EQ(*predicted_density(plane, parse_predicate("aL(0,1)")), Rational(1, 8));
  EXPECT_EQ(*predicted_density(plane, parse_predicate("!always")), Rational(0));
  EXPECT_FALSE(predicted_density(plane, parse_predicate("tLP(0,1),sQ(1)")).has_value());
  EXPECT_FALSE(predicted_density(plane, parse_predicate("tLP(0,13@2),sQ(17@2)")).has_value());
  EXPECT_FALSE(predicted_density(plane, parse_predicate("smooth")).has_value());
  EXPECT_FALSE(predicted_density(plane, parse_predicate("tL(0),tL(1)")).has_value());
}

TEST(Prediction, HoldsFromPinnedThreshold) {
  const Plane plane(2);
  for (const auto& c : kProductConfigs) {
    const auto spec = parse_predicate(c.predicate);
    const auto rep = find_threshold(plane, spec, 1, 5);
    ASSERT_EQ(rep.observed.size(), 5u);
    EXPECT_EQ(rep.threshold, std::optional<int>(c.threshold)) << c.predicate;
    EXPECT_LE(c.threshold, std::max(1, rep.surjectivity_degree)) << c.predicate;
    for (const auto& [d, est] : rep.observed) {
      if (d >= 4) {
        EXPECT_EQ(est.exact(), rep.predicted) << c.predicate << " d=" << d;
      }
    }
  }
}

TEST(Prediction, ThresholdFinderRejectsNonLocalPredicates) {
  const Plane plane(2);
  EXPECT_THROW(find_threshold(plane, parse_predicate("smooth"), 1, 3), std::invalid_argument);
  // Stops at the cap instead of throwing.
  const auto rep = find_threshold(plane, parse_predicate("sQ(0)"), 1, 9);
  EXPECT_EQ(rep.observed.back().first, 5);
}

TEST(LocalConditions, NoTangentBoundAndOnlyTangentEquality) {
  const Plane plane(2);
  const Rational q(2);
  const Rational one_minus = 1 - 1 / (q * q);
  const Rational a0_bound = rational_pow(one_minus, 3) / one_minus;
  for (int d : {3, 4}) {
    EXPECT_LE(census_of(plane, "a0(0)", d), a0_bound) << d;
    EXPECT_EQ(census_of(plane, "aL(0,1)", d), 1 / (q * q) - 1 / (q * q * q)) << d;
    EXPECT_EQ(census_of(plane, "aL(0,1)", d), census_of(plane, "tLP(0,1)", d) - census_of(plane, "sQ(1)", d)) << d;
  }
}

TEST(LocalConditions, MixedIntersectionsFactor) {
  const Plane plane(2);
  const std::vector<std::vector<std::string>> configs{
      {"a0(0)", "!tLP(0,1)"},
      {"aL(0,1)", "!sQ(0)"},
      {"a0(2)", "aL(0,1)", "sQ(4)"},
      {"!tLP(0,1)", "!tLP(1,4)", "a0(2)"},
      {"tLP(0,13@2)", "!sQ(0)", "!a0(4)"},
  };
  for (const auto& atoms : configs) {
    std::string joined;
    Rational product = 1;
    for (const auto& a : atoms) {
      joined += (joined.empty() ? "" : ",") + a;
      product *= census_of(plane, a, 4);
    }
    EXPECT_EQ(census_of(plane, joined, 4), product) << joined;
  }
}

TEST(MonteCarlo, CoversKnownDensities) {
  const Plane p3(3), p2(2);
  const auto a = monte_carlo(p3, CompiledPredicate(p3, parse_predicate("tL(0)"), 4), 100000, 1);
  EXPECT_LE(*a.ci_low, 11.0 / 27);
  EXPECT_GE(*a.ci_high, 11.0 / 27);
  EXPECT_EQ(a.method, "monte_carlo");
  EXPECT_EQ(a.seed, std::optional<std::uint64_t>(1));
  const auto b = monte_carlo(p2, CompiledPredicate(p2, parse_predicate("tL(0)"), 6), 100000, 2);
  EXPECT_LE(*b.ci_low, 0.625);
  EXPECT_GE(*b.ci_high, 0.625);
}

TEST(MonteCarlo, AlwaysTrue) {
  const Plane plane(2);
  const auto est = monte_carlo(plane, CompiledPredicate(plane, parse_predicate("always"), 3), 500, 9);
  EXPECT_EQ(est.hits, 500u);
  EXPECT_EQ(est.estimate, 1.0);
  EXPECT_EQ(*est.ci_high, 1.0);
  EXPECT_LT(*est.ci_low, 1.0);
  EXPECT_THROW(monte_carlo(plane, CompiledPredicate(plane, parse_predicate("always"), 3), 0, 9),
               std::invalid_argument);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const Plane plane(3);
  const CompiledPredicate pred(plane, parse_predicate("tL(0)"), 4);
  const auto a = monte_carlo(plane, pred, 20000, 77, 1);
  const auto b = monte_carlo(plane, pred, 20000, 77, 3);
  const auto c = monte_carlo(plane, pred, 20000, 78, 1);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_NE(a.hits, c.hits);
}

TEST(MonteCarlo, SamplesAreUniformPerCoefficient) {
  TernaryForm f(3);
  std::vector<std::uint64_t> counts(5, 0);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    sample_form(5, 123, i, f);
    for (auto c : f.coeffs) ++counts[c.idx];
  }
  for (auto n : counts) EXPECT_NEAR(static_cast<double>(n) / 200000, 0.2, 0.01);
}

TEST(MonteCarlo, WilsonIntervalCoverage) {
  const Plane plane(3);
  const CompiledPredicate pred(plane, parse_predicate("tL(0)"), 4);
  const double truth = 11.0 / 27;
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto est = monte_carlo(plane, pred, 10000, seed);
    covered += (*est.ci_low <= truth && truth <= *est.ci_high) ? 1 : 0;
  }
  EXPECT_GE(covered, 90);
}

TEST(MonteCarlo, WilsonIntervalValues) {
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.40383, 1e-5);
  EXPECT_NEAR(hi, 0.59617, 1e-5);
  const auto [lo0, hi0] = wilson_interval(0, 10);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 0.27753, 1e-5);
  EXPECT_THROW(wilson_interval(0, 0), std::invalid_argument);
}

TEST(Threads, EnvironmentOverride) {
  ::setenv("TFREE_THREADS", "3", 1);
  EXPECT_EQ(default_threads(), 3u);
  ::setenv("TFREE_THREADS", "zero", 1);
  EXPECT_GE(default_threads(), 1u);
  ::unsetenv("TFREE_THREADS");
}
