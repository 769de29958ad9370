#pragma once

// Exact arithmetic in F_q (q = p^m) and in extensions F_{q^k}.
//
// Every field is built directly as F_p[u]/(g(u)) with g the smallest monic
// irreducible of degree m*k (smallest when the non-leading coefficients
// c_0 + c_1 p + ... are read as a base-p integer). Elements are encoded as
// integers idx = sum c_i p^i in the basis 1, u, u^2, ...  An extension
// context also carries the embedding of its base field F_q.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tfree {

struct FieldElem {
  std::uint32_t idx = 0;

  constexpr FieldElem() = default;
  constexpr explicit FieldElem(std::uint32_t i) : idx(i) {}

  constexpr bool is_zero() const { return idx == 0; }
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

inline constexpr FieldElem kZero{0};
inline constexpr FieldElem kOne{1};

/// Largest field size the library will construct.
inline constexpr std::uint64_t kMaxFieldSize = std::uint64_t{1} << 20;
/// Fields up to this size use exp/log (and Zech) tables.
inline constexpr std::uint64_t kMaxTableSize = std::uint64_t{1} << 16;

namespace detail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Dense polynomials over F_p, low coefficient first. Used only while a
// context is being constructed and for the large-field fallback path.
using PrimePoly = std::vector<std::uint32_t>;

inline void trim(PrimePoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo a monic b.
inline PrimePoly prime_poly_mod(PrimePoly a, const PrimePoly& b, std::uint32_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() > db && !a.empty()) {
    const std::uint32_t lead = a.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) {
      a[shift + i] = static_cast<std::uint32_t>(
          (a[shift + i] + static_cast<std::uint64_t>(p - lead) * b[i]) % p);
    }
    trim(a);
  }
  return a;
}

// Trial division by every monic polynomial of degree 1..n/2.
inline bool prime_poly_irreducible(const PrimePoly& f, std::uint32_t p) {
  const std::size_t n = f.size() - 1;
  for (std::size_t d = 1; d <= n / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t c = 0; c < count; ++c) {
      PrimePoly g(d + 1);
      std::uint64_t t = c;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(t % p);
        t /= p;
      }
      g[d] = 1;
      if (prime_poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

inline PrimePoly smallest_irreducible(std::uint32_t p, std::size_t n) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= p;
  for (std::uint64_t c = 0; c < count; ++c) {
    PrimePoly f(n + 1);
    std::uint64_t t = c;
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = static_cast<std::uint32_t>(t % p);
      t /= p;
    }
    f[n] = 1;
    if (n == 1 || (f[0] != 0 && prime_poly_irreducible(f, p))) return f;
  }
  throw std::logic_error("no irreducible polynomial found");
}

}  // namespace detail

class FieldCtx {
 public:
  /// F_{p^m}. Throws std::invalid_argument on composite p or when p^m exceeds
  /// kMaxFieldSize.
  static FieldCtx make(std::uint32_t p, std::uint32_t m) { return FieldCtx(p, m, 1, {}); }

  /// Same field, given q directly.
  static FieldCtx for_order(std::uint64_t q) {
    auto [p, m] = split_prime_power(q);
    return make(p, m);
  }

  /// F_{q^k} over this field; the base field embeds via embed().
  FieldCtx extend(std::uint32_t k) const {
    if (k_ != 1) throw std::invalid_argument("extend: base context must have k = 1");
    if (k == 0) throw std::invalid_argument("extend: k must be positive");
    return FieldCtx(p_, m_, k, modulus_);
  }

  static std::pair<std::uint32_t, std::uint32_t> split_prime_power(std::uint64_t q) {
    if (q < 2) throw std::invalid_argument("not a prime power: " + std::to_string(q));
    std::uint64_t p = 2;
    while (q % p != 0) ++p;
    std::uint32_t m = 0;
    std::uint64_t t = q;
    while (t % p == 0) {
      t /= p;
      ++m;
    }
    if (t != 1) throw std::invalid_argument("not a prime power: " + std::to_string(q));
    return {static_cast<std::uint32_t>(p), m};
  }

  std::uint32_t p() const { return p_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t k() const { return k_; }
  /// Order of the base field F_q.
  std::uint32_t q() const { return q_; }
  /// Order of this field, q^k.
  std::uint32_t size() const { return size_; }
  std::uint32_t degree() const { return n_; }
  /// Coefficients of the defining polynomial over F_p, low first, monic.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  bool has_tables() const { return !log_.empty(); }

  bool contains(FieldElem a) const { return a.idx < size_; }

  FieldElem add(FieldElem a, FieldElem b) const {
    if (p_ == 2) return FieldElem{a.idx ^ b.idx};
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (has_tables()) {
      const std::uint32_t la = log_[a.idx], lb = log_[b.idx];
      const std::uint32_t diff = lb >= la ? lb - la : lb + order_ - la;
      const std::int64_t z = zech_[diff];
      if (z < 0) return kZero;
      return FieldElem{exp_[la + static_cast<std::uint32_t>(z)]};
    }
    return digitwise(a, b, 1);
  }

  FieldElem neg(FieldElem a) const {
    if (p_ == 2 || a.is_zero()) return a;
    if (has_tables()) return FieldElem{exp_[log_[a.idx] + neg_one_log_]};
    return digitwise(kZero, a, p_ - 1);
  }

  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }

  FieldElem mul(FieldElem a, FieldElem b) const {
    if (a.is_zero() || b.is_zero()) return kZero;
    if (has_tables()) return FieldElem{exp_[log_[a.idx] + log_[b.idx]]};
    return poly_mul(a, b);
  }

  FieldElem inv(FieldElem a) const {
    if (a.is_zero()) throw std::domain_error("inverse of zero");
    if (has_tables()) {
      const std::uint32_t l = log_[a.idx];
      return FieldElem{exp_[l == 0 ? 0 : order_ - l]};
    }
    return pow(a, static_cast<std::uint64_t>(size_) - 2);
  }

  FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }

  FieldElem pow(FieldElem a, std::uint64_t e) const {
    if (e == 0) return kOne;
    if (a.is_zero()) return kZero;
    if (has_tables()) {
      const std::uint64_t l = (static_cast<std::uint64_t>(log_[a.idx]) * (e % order_)) % order_;
      return FieldElem{exp_[l]};
    }
    FieldElem result = kOne, base = a;
    while (e) {
      if (e & 1) result = poly_mul(result, base);
      base = poly_mul(base, base);
      e >>= 1;
    }
    return result;
  }

  /// a^q, the q-power Frobenius relative to the base field F_q.
  FieldElem frobenius(FieldElem a) const { return pow(a, q_); }

  /// Image of the integer n in the prime subfield.
  FieldElem from_int(std::int64_t n) const {
    std::int64_t r = n % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return FieldElem{static_cast<std::uint32_t>(r)};
  }

  /// Image of a base-field (F_q) element in this field.
  FieldElem embed(FieldElem base) const {
    if (base.idx >= q_) throw std::out_of_range("embed: element not in base field");
    return embed_.empty() ? base : embed_[base.idx];
  }

  bool in_base(FieldElem a) const { return frobenius(a) == a; }

  /// Inverse of embed(); throws if a does not lie in F_q.
  FieldElem to_base(FieldElem a) const {
    if (embed_.empty()) {
      if (a.idx >= q_) throw std::domain_error("to_base: element not in base field");
      return a;
    }
    auto it = std::lower_bound(unembed_.begin(), unembed_.end(), std::pair{a.idx, std::uint32_t{0}});
    if (it == unembed_.end() || it->first != a.idx) throw std::domain_error("to_base: element not in base field");
    return FieldElem{it->second};
  }

  /// A fixed generator of the multiplicative group.
  FieldElem generator() const { return generator_; }

  std::string describe() const {
    std::string s = "F_" + std::to_string(size_) + " = F_" + std::to_string(p_) + "[u]/(";
    bool first = true;
    for (std::size_t i = modulus_.size(); i-- > 0;) {
      if (modulus_[i] == 0) continue;
      if (!first) s += " + ";
      first = false;
      if (modulus_[i] != 1 || i == 0) s += std::to_string(modulus_[i]);
      if (i >= 1) s += (modulus_[i] != 1 ? "*u" : "u");
      if (i >= 2) s += "^" + std::to_string(i);
    }
    return s + ")";
  }

 private:
  FieldCtx(std::uint32_t p, std::uint32_t m, std::uint32_t k, const std::vector<std::uint32_t>& base_modulus)
      : p_(p), m_(m), k_(k) {
    if (!detail::is_prime(p)) throw std::invalid_argument("characteristic is not prime: " + std::to_string(p));
    if (m == 0) throw std::invalid_argument("exponent m must be positive");
    n_ = m * k;
    std::uint64_t sz = 1, qq = 1;
    for (std::uint32_t i = 0; i < n_; ++i) {
      sz *= p;
      if (i < m) qq *= p;
      if (sz > kMaxFieldSize) throw std::invalid_argument("field size exceeds cap 2^20");
    }
    size_ = static_cast<std::uint32_t>(sz);
    q_ = static_cast<std::uint32_t>(qq);
    order_ = size_ - 1;
    modulus_ = detail::smallest_irreducible(p, n_);
    if (n_ > 1 && !detail::prime_poly_irreducible(modulus_, p))
      throw std::logic_error("modulus failed irreducibility check");
    generator_ = find_generator();
    if (size_ <= kMaxTableSize) build_tables();
    if (k > 1) build_embedding(base_modulus);
  }

  std::vector<std::uint32_t> digits(FieldElem a) const {
    std::vector<std::uint32_t> d(n_);
    std::uint32_t t = a.idx;
    for (std::uint32_t i = 0; i < n_; ++i) {
      d[i] = t % p_;
      t /= p_;
    }
    return d;
  }

  FieldElem encode(std::span<const std::uint32_t> d) const {
    std::uint32_t v = 0;
    for (std::size_t i = d.size(); i-- > 0;) v = v * p_ + d[i];
    return FieldElem{v};
  }

  // a + scale * b, digit by digit.
  FieldElem digitwise(FieldElem a, FieldElem b, std::uint32_t scale) const {
    std::uint32_t ta = a.idx, tb = b.idx, v = 0, w = 1;
    for (std::uint32_t i = 0; i < n_; ++i) {
      v += ((ta % p_ + scale * (tb % p_)) % p_) * w;
      ta /= p_;
      tb /= p_;
      w *= p_;
    }
    return FieldElem{v};
  }

  FieldElem poly_mul(FieldElem a, FieldElem b) const {
    const auto da = digits(a), db = digits(b);
    detail::PrimePoly prod(2 * n_, 0);
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (da[i] == 0) continue;
      for (std::uint32_t j = 0; j < n_; ++j)
        prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(da[i]) * db[j]) % p_);
    }
    auto r = detail::prime_poly_mod(std::move(prod), modulus_, p_);
    r.resize(n_, 0);
    return encode(r);
  }

  FieldElem poly_pow(FieldElem a, std::uint64_t e) const {
    FieldElem result = kOne, base = a;
    while (e) {
      if (e & 1) result = poly_mul(result, base);
      base = poly_mul(base, base);
      e >>= 1;
    }
    return result;
  }

  FieldElem find_generator() const {
    if (size_ == 2) return kOne;
    const auto factors = detail::prime_factors(order_);
    for (std::uint32_t g = 2; g < size_; ++g) {
      bool ok = true;
      for (auto r : factors) {
        if (poly_pow(FieldElem{g}, order_ / r) == kOne) {
          ok = false;
          break;
        }
      }
      if (ok) return FieldElem{g};
    }
    throw std::logic_error("no multiplicative generator found");
  }

  void build_tables() {
    // exp_ is doubled so that exp_[log a + log b] needs no reduction.
    exp_.assign(2 * static_cast<std::size_t>(order_) + 1, 0);
    log_.assign(size_, 0);
    FieldElem x = kOne;
    for (std::uint32_t i = 0; i < order_; ++i) {
      exp_[i] = x.idx;
      log_[x.idx] = i;
      x = poly_mul(x, generator_);
    }
    if (x != kOne) throw std::logic_error("generator order mismatch");
    for (std::size_t i = order_; i < exp_.size(); ++i) exp_[i] = exp_[i - order_];
    neg_one_log_ = (p_ == 2) ? 0 : order_ / 2;
    if (p_ != 2) {
      // zech_[i] = log(1 + g^i), or -1 when 1 + g^i = 0.
      zech_.assign(order_, -1);
      for (std::uint32_t i = 0; i < order_; ++i) {
        const FieldElem s = digitwise(kOne, FieldElem{exp_[i]}, 1);
        zech_[i] = s.is_zero() ? -1 : static_cast<std::int64_t>(log_[s.idx]);
      }
    }
  }

  // Embedding of F_q = F_p[v]/(h(v)): v maps to the smallest root of h here.
  void build_embedding(const std::vector<std::uint32_t>& h) {
    auto eval_h = [&](FieldElem x) {
      FieldElem acc = kZero;
      for (std::size_t i = h.size(); i-- > 0;) acc = add(mul(acc, x), FieldElem{h[i]});
      return acc;
    };
    FieldElem root{0};
    bool found = false;
    for (std::uint32_t c = 0; c < size_ && !found; ++c) {
      if (eval_h(FieldElem{c}).is_zero()) {
        root = FieldElem{c};
        found = true;
      }
    }
    if (!found) throw std::logic_error("base modulus has no root in extension");
    embed_.resize(q_);
    std::vector<FieldElem> powers(m_);
    powers[0] = kOne;
    for (std::uint32_t i = 1; i < m_; ++i) powers[i] = mul(powers[i - 1], root);
    for (std::uint32_t a = 0; a < q_; ++a) {
      FieldElem acc = kZero;
      std::uint32_t t = a;
      for (std::uint32_t i = 0; i < m_; ++i) {
        acc = add(acc, mul(from_int(t % p_), powers[i]));
        t /= p_;
      }
      embed_[a] = acc;
    }
    unembed_.reserve(q_);
    for (std::uint32_t a = 0; a < q_; ++a) unembed_.emplace_back(embed_[a].idx, a);
    std::sort(unembed_.begin(), unembed_.end());
  }

  std::uint32_t p_ = 2, m_ = 1, k_ = 1, n_ = 1;
  std::uint32_t q_ = 2, size_ = 2, order_ = 1;
  std::vector<std::uint32_t> modulus_;
  FieldElem generator_{1};
  std::vector<std::uint32_t> exp_, log_;
  std::vector<std::int64_t> zech_;
  std::uint32_t neg_one_log_ = 0;
  std::vector<FieldElem> embed_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> unembed_;
};

/// Process-wide cache of extension contexts F_{q^k}, keyed by (p, m, k).
/// Returned pointers stay valid for the life of the process.
inline std::shared_ptr<const FieldCtx> extension(const FieldCtx& base, std::uint32_t k) {
  static std::mutex mu;
  static std::map<std::array<std::uint32_t, 3>, std::shared_ptr<const FieldCtx>> cache;
  const std::array<std::uint32_t, 3> key{base.p(), base.m(), k};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto ctx = std::make_shared<const FieldCtx>(k == 1 ? FieldCtx::make(base.p(), base.m()) : base.extend(k));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(ctx)).first->second;
}

/// All prime powers q with lo <= q <= hi.
inline std::vector<std::uint32_t> prime_powers(std::uint32_t lo, std::uint32_t hi) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t q = std::max<std::uint32_t>(lo, 2); q <= hi; ++q) {
    std::uint32_t p = 2;
    while (q % p != 0) ++p;
    std::uint32_t t = q;
    while (t % p == 0) t /= p;
    if (t == 1) out.push_back(q);
  }
  return out;
}

}  // namespace tfree
