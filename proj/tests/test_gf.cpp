#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <thread>
#include <vector>

#include "tfree/gf.hpp"

using namespace tfree;

namespace {

// Schoolbook product of two encoded elements modulo the field's modulus,
// written against the digit encoding only.
FieldElem reference_mul(const FieldCtx& F, FieldElem a, FieldElem b) {
  const std::uint32_t p = F.p(), n = F.degree();
  std::vector<std::uint32_t> da(n), db(n), prod(2 * n, 0);
  for (std::uint32_t i = 0, x = a.idx, y = b.idx; i < n; ++i, x /= p, y /= p) {
    da[i] = x % p;
    db[i] = y % p;
  }
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
  const auto& mod = F.modulus();
  for (std::uint32_t top = 2 * n - 1; top >= n; --top) {
    const std::uint32_t c = prod[top];
    if (c == 0) continue;
    for (std::uint32_t i = 0; i <= n; ++i) prod[top - n + i] = (prod[top - n + i] + (p - c) * mod[i]) % p;
  }
  std::uint32_t out = 0;
  for (std::uint32_t i = n; i-- > 0;) out = out * p + prod[i];
  return FieldElem{out};
}

std::vector<FieldCtx> small_fields() {
  std::vector<FieldCtx> out;
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 25u, 27u, 81u}) out.push_back(FieldCtx::for_order(q));
  out.push_back(FieldCtx::make(2, 1).extend(3));
  out.push_back(FieldCtx::make(3, 1).extend(4));
  out.push_back(FieldCtx::make(2, 2).extend(3));
  return out;
}

}  // namespace

TEST(FieldCtx, SmallFieldsHaveExpectedShape) {
  const auto F2 = FieldCtx::make(2, 1);
  EXPECT_EQ(F2.size(), 2u);
  EXPECT_EQ(F2.q(), 2u);
  const auto F3 = FieldCtx::make(3, 1);
  EXPECT_EQ(F3.size(), 3u);
  const auto F4 = FieldCtx::make(2, 2);
  EXPECT_EQ(F4.size(), 4u);
  EXPECT_EQ(F4.modulus(), (std::vector<std::uint32_t>{1, 1, 1}));
  EXPECT_EQ(F4.describe(), "F_4 = F_2[u]/(u^2 + u + 1)");
}

TEST(FieldCtx, RejectsBadParameters) {
  EXPECT_THROW(FieldCtx::make(4, 1), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(2, 21), std::invalid_argument);
  EXPECT_THROW(FieldCtx::for_order(6), std::invalid_argument);
  EXPECT_THROW(FieldCtx::for_order(1), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(2, 1).extend(21), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(2, 1).extend(2).extend(2), std::invalid_argument);
}

TEST(FieldCtx, ModulusIsSmallestIrreducible) {
  // Degree-3 monics over F_2 in increasing order: u^3, u^3+1, u^3+u, u^3+u+1.
  EXPECT_EQ(FieldCtx::make(2, 3).modulus(), (std::vector<std::uint32_t>{1, 1, 0, 1}));
  // Over F_3 in degree 2: u^2+1 is the first without a root.
  EXPECT_EQ(FieldCtx::make(3, 2).modulus(), (std::vector<std::uint32_t>{1, 0, 1}));
}

TEST(FieldCtx, KnownProducts) {
  const auto F4 = FieldCtx::make(2, 2);
  const FieldElem u{2};
  EXPECT_EQ(F4.mul(u, u), FieldElem{3});  // u^2 = u + 1
  const auto F5 = FieldCtx::make(5, 1);
  EXPECT_EQ(F5.inv(FieldElem{2}), FieldElem{3});
  const auto F2 = FieldCtx::make(2, 1);
  EXPECT_EQ(F2.add(kOne, kOne), kZero);
  EXPECT_THROW(F5.inv(kZero), std::domain_error);
}

TEST(FieldCtx, ArithmeticLawsExhaustive) {
  for (const auto& F : small_fields()) {
    if (F.size() > 81) continue;
    SCOPED_TRACE(F.describe());
    const std::uint32_t n = F.size();
    for (std::uint32_t a = 0; a < n; ++a) {
      const FieldElem A{a};
      EXPECT_EQ(F.add(A, F.neg(A)), kZero);
      if (a) {
        EXPECT_EQ(F.mul(A, F.inv(A)), kOne);
      }
      for (std::uint32_t b = 0; b < n; ++b) {
        const FieldElem B{b};
        EXPECT_EQ(F.add(A, B), F.add(B, A));
        EXPECT_EQ(F.mul(A, B), F.mul(B, A));
        for (std::uint32_t c = 0; c < n; c += (n > 27 ? 7 : 1)) {
          const FieldElem C{c};
          ASSERT_EQ(F.add(F.add(A, B), C), F.add(A, F.add(B, C)));
          ASSERT_EQ(F.mul(F.mul(A, B), C), F.mul(A, F.mul(B, C)));
          ASSERT_EQ(F.mul(A, F.add(B, C)), F.add(F.mul(A, B), F.mul(A, C)));
        }
      }
    }
  }
}

TEST(FieldCtx, TablesAgreeWithPolynomialProduct) {
  for (std::uint32_t q : {4u, 8u, 9u, 16u, 25u, 27u, 32u, 49u, 64u, 81u, 121u, 125u, 128u, 169u, 243u, 256u}) {
    const auto F = FieldCtx::for_order(q);
    ASSERT_TRUE(F.has_tables());
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b) ASSERT_EQ(F.mul(FieldElem{a}, FieldElem{b}), reference_mul(F, FieldElem{a}, FieldElem{b})) << q;
  }
}

TEST(FieldCtx, LargeFieldFallsBackToPolynomialArithmetic) {
  const auto F = FieldCtx::make(2, 18);
  EXPECT_FALSE(F.has_tables());
  const FieldElem g = F.generator();
  EXPECT_EQ(F.pow(g, F.size() - 1), kOne);
  for (std::uint32_t a = 1; a < F.size(); a += 9973) {
    const FieldElem A{a};
    EXPECT_EQ(F.mul(A, F.inv(A)), kOne);
    EXPECT_EQ(F.mul(A, FieldElem{a ^ 0x155u}), reference_mul(F, A, FieldElem{a ^ 0x155u}));
  }
  const auto G = FieldCtx::make(3, 12);
  EXPECT_FALSE(G.has_tables());
  for (std::uint32_t a = 1; a < G.size(); a += 7919) {
    const FieldElem A{a};
    EXPECT_EQ(G.mul(A, G.inv(A)), kOne);
    EXPECT_EQ(G.add(A, G.neg(A)), kZero);
  }
}

TEST(FieldCtx, GeneratorHasFullOrder) {
  for (const auto& F : small_fields()) {
    std::set<std::uint32_t> seen;
    FieldElem x = kOne;
    for (std::uint32_t i = 0; i + 1 < F.size(); ++i) {
      seen.insert(x.idx);
      x = F.mul(x, F.generator());
    }
    EXPECT_EQ(seen.size(), F.size() - 1) << F.describe();
    EXPECT_EQ(x, kOne);
  }
}

TEST(Frobenius, KnownValues) {
  const auto F4 = FieldCtx::make(2, 1).extend(2);
  EXPECT_EQ(F4.size(), 4u);
  const FieldElem u{2};
  EXPECT_EQ(F4.frobenius(u), F4.add(u, kOne));
  EXPECT_EQ(F4.frobenius(F4.embed(kOne)), F4.embed(kOne));
  const auto F9 = FieldCtx::make(3, 1).extend(2);
  for (std::uint32_t a = 0; a < 9; ++a) EXPECT_EQ(F9.frobenius(F9.frobenius(FieldElem{a})), FieldElem{a});
}

TEST(Frobenius, AutomorphismFixingExactlyTheBase) {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto base = FieldCtx::for_order(q);
    for (std::uint32_t k = 1; q <= 4 && k <= 4; ++k) {
      const auto E = base.extend(k);
      if (E.size() > 81) continue;
      SCOPED_TRACE(E.describe());
      std::set<std::uint32_t> fixed;
      for (std::uint32_t a = 0; a < E.size(); ++a) {
        const FieldElem A{a};
        if (E.frobenius(A) == A) fixed.insert(a);
        for (std::uint32_t b = 0; b < E.size(); ++b) {
          const FieldElem B{b};
          ASSERT_EQ(E.frobenius(E.add(A, B)), E.add(E.frobenius(A), E.frobenius(B)));
          ASSERT_EQ(E.frobenius(E.mul(A, B)), E.mul(E.frobenius(A), E.frobenius(B)));
        }
      }
      std::set<std::uint32_t> embedded;
      for (std::uint32_t c = 0; c < q; ++c) embedded.insert(E.embed(FieldElem{c}).idx);
      EXPECT_EQ(fixed, embedded);
    }
  }
}

TEST(Embedding, IsARingHomomorphismWithInverse) {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 9u}) {
    const auto F = FieldCtx::for_order(q);
    for (std::uint32_t k : {2u, 3u}) {
      const auto E = F.extend(k);
      for (std::uint32_t a = 0; a < q; ++a) {
        EXPECT_EQ(E.to_base(E.embed(FieldElem{a})), FieldElem{a});
        for (std::uint32_t b = 0; b < q; ++b) {
          EXPECT_EQ(E.embed(F.add(FieldElem{a}, FieldElem{b})), E.add(E.embed(FieldElem{a}), E.embed(FieldElem{b})));
          EXPECT_EQ(E.embed(F.mul(FieldElem{a}, FieldElem{b})), E.mul(E.embed(FieldElem{a}), E.embed(FieldElem{b})));
        }
      }
    }
  }
  const auto E = FieldCtx::make(2, 1).extend(2);
  EXPECT_THROW(E.to_base(FieldElem{2}), std::domain_error);
  EXPECT_THROW(E.embed(FieldElem{2}), std::out_of_range);
}

TEST(Extension, CacheReturnsSharedContexts) {
  const auto F = FieldCtx::for_order(3);
  const auto a = extension(F, 2);
  const auto b = extension(F, 2);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(a->size(), 9u);
  EXPECT_EQ(extension(F, 1)->size(), 3u);

  std::vector<std::thread> pool;
  std::vector<const FieldCtx*> seen(4);
  for (int t = 0; t < 4; ++t) pool.emplace_back([&, t] { seen[t] = extension(F, 3).get(); });
  for (auto& th : pool) th.join();
  for (auto* p : seen) EXPECT_EQ(p, seen[0]);
}

TEST(PrimePowers, ListsSmallPrimePowers) {
  EXPECT_EQ(prime_powers(2, 16), (std::vector<std::uint32_t>{2, 3, 4, 5, 7, 8, 9, 11, 13, 16}));
}
