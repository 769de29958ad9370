#pragma once

// The Levi (point-line incidence) graph of PG(2,q): incidence matrices,
// exact permanents, perfect matchings and permanent lower bounds.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tfree/numeric.hpp"
#include "tfree/pg2.hpp"

namespace tfree {

/// Square 0/1 matrix with n <= 64, stored as one bitmask per row.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(int n) : n_(n), rows_(static_cast<std::size_t>(n), 0) {
    if (n < 0 || n > 64) throw std::invalid_argument("BitMatrix: n must be in [0, 64]");
  }

  int n() const { return n_; }
  bool at(int i, int j) const { return (rows_[i] >> j) & 1u; }
  void set(int i, int j, bool v = true) {
    if (v)
      rows_[i] |= (std::uint64_t{1} << j);
    else
      rows_[i] &= ~(std::uint64_t{1} << j);
  }
  std::uint64_t row(int i) const { return rows_[i]; }
  int row_sum(int i) const { return std::popcount(rows_[i]); }
  int col_sum(int j) const {
    int s = 0;
    for (auto r : rows_) s += static_cast<int>((r >> j) & 1u);
    return s;
  }

  /// Rows and columns permuted: result(i, j) = this(rp[i], cp[j]).
  BitMatrix permuted(const std::vector<int>& rp, const std::vector<int>& cp) const {
    BitMatrix out(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out.set(i, j, at(rp[i], cp[j]));
    return out;
  }

  /// n lines of n characters '0'/'1'.
  std::string to_text() const {
    std::string s;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) s.push_back(at(i, j) ? '1' : '0');
      s.push_back('\n');
    }
    return s;
  }

  static BitMatrix from_text(std::string_view text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        if (!cur.empty()) lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
    const int n = static_cast<int>(lines.size());
    if (n > 64) throw std::invalid_argument("matrix text: more than 64 rows");
    BitMatrix m(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(lines[i].size()) != n) throw std::invalid_argument("matrix text: row length differs from row count");
      for (int j = 0; j < n; ++j) {
        if (lines[i][j] == '1')
          m.set(i, j);
        else if (lines[i][j] != '0')
          throw std::invalid_argument("matrix text: characters must be '0' or '1'");
      }
    }
    return m;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> rows_;
};

struct IncidenceMatrix {
  std::uint32_t q = 0;
  BitMatrix bits;  ///< rows = points, columns = lines, both in global order

  int n() const { return bits.n(); }
};

inline IncidenceMatrix incidence_matrix(const Plane& plane) {
  const auto& pts = plane.points();
  const auto& lines = plane.lines();
  const int n = static_cast<int>(pts.size());
  if (n > 64) throw std::invalid_argument("incidence_matrix: plane too large");
  IncidenceMatrix M{plane.q(), BitMatrix(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (incident(plane.field(), pts[i], lines[j])) M.bits.set(i, j);
  const int k = static_cast<int>(plane.q()) + 1;
  for (int i = 0; i < n; ++i)
    if (M.bits.row_sum(i) != k || M.bits.col_sum(i) != k) throw std::logic_error("incidence matrix is not (q+1)-regular");
  return M;
}

inline IncidenceMatrix incidence_matrix(std::uint32_t q) { return incidence_matrix(Plane(q)); }

// ---------------------------------------------------------------------------
// Ryser's formula
//
//   per(A) = (-1)^n sum_{S subset of columns} (-1)^{|S|} prod_i sum_{j in S} a_ij
//
// Column subsets are split by the pattern on the top `partition_bits` columns;
// each partition walks the remaining columns in Gray-code order, so one step
// toggles one column and touches only that column's nonzero rows. A histogram
// of row-sum values makes the row product a handful of table lookups.

struct PermanentOptions {
  unsigned threads = 1;
  int partition_bits = -1;  ///< -1: min(10, n - 1)
  std::optional<std::filesystem::path> checkpoint;
  /// Called after each finished partition with (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

namespace detail {

class RyserKernel {
 public:
  explicit RyserKernel(const BitMatrix& A) : n_(A.n()) {
    cols_.resize(n_);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i)
        if (A.at(i, j)) cols_[j].push_back(i);
    max_sum_ = 0;
    double log2_bound = n_;
    for (int i = 0; i < n_; ++i) {
      max_sum_ = std::max(max_sum_, A.row_sum(i));
      if (A.row_sum(i) > 0) log2_bound += std::log2(static_cast<double>(A.row_sum(i)));
    }
    if (log2_bound > 125.0) throw std::overflow_error("permanent_ryser: terms may exceed 128-bit range");
    pow_.assign(static_cast<std::size_t>(max_sum_ + 1) * (n_ + 1), 0);
    for (int v = 0; v <= max_sum_; ++v) {
      __int128 x = 1;
      for (int c = 0; c <= n_; ++c) {
        pow_[idx(v, c)] = x;
        __int128 next;
        if (__builtin_mul_overflow(x, static_cast<__int128>(v), &next)) next = 0;  // unreachable range
        x = next;
      }
    }
  }

  int n() const { return n_; }

  /// Signed partial sum over the column subsets whose top `bits` columns
  /// follow `pattern`.
  __int128 partition_sum(int bits, std::uint64_t pattern) const {
    const int low = n_ - bits;
    std::vector<int> rs(n_, 0);
    std::vector<int> hist(max_sum_ + 2, 0);
    int parity = 0;
    for (int b = 0; b < bits; ++b) {
      if ((pattern >> b) & 1u) {
        parity ^= 1;
        for (int i : cols_[low + b]) ++rs[i];
      }
    }
    for (int i = 0; i < n_; ++i) ++hist[rs[i]];

    auto product = [&]() -> __int128 {
      __int128 p = 1;
      for (int v = 2; v <= max_sum_; ++v)
        if (hist[v]) p *= pow_[idx(v, hist[v])];
      return p;
    };

    __int128 total = 0;
    if (hist[0] == 0) total += parity ? -product() : product();
    const std::uint64_t steps = std::uint64_t{1} << low;
    std::uint64_t gray = 0;
    for (std::uint64_t s = 1; s < steps; ++s) {
      const int j = std::countr_zero(s);
      gray ^= (std::uint64_t{1} << j);
      parity ^= 1;
      if ((gray >> j) & 1u) {
        for (int i : cols_[j]) {
          --hist[rs[i]];
          ++hist[++rs[i]];
        }
      } else {
        for (int i : cols_[j]) {
          --hist[rs[i]];
          ++hist[--rs[i]];
        }
      }
      if (hist[0] == 0) total += parity ? -product() : product();
    }
    return total;
  }

 private:
  std::size_t idx(int v, int c) const { return static_cast<std::size_t>(v) * (n_ + 1) + c; }

  int n_;
  int max_sum_;
  std::vector<std::vector<int>> cols_;
  std::vector<__int128> pow_;
};

struct Checkpoint {
  std::size_t partitions = 0;
  int n = 0;
  std::map<std::size_t, __int128> done;
};

inline std::string checkpoint_header(int n, std::size_t partitions) {
  return "# tfree-permanent n=" + std::to_string(n) + " partitions=" + std::to_string(partitions);
}

/// Reads `partition_index partial_sum_decimal` lines. Lines starting with '#'
/// are comments; a header comment, when present, must match n and the
/// partition count.
inline std::map<std::size_t, __int128> load_checkpoint(const std::filesystem::path& path, int n, std::size_t partitions) {
  std::map<std::size_t, __int128> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto corrupt = [&](const std::string& why) {
      return std::runtime_error("corrupt checkpoint " + path.string() + " line " + std::to_string(lineno) + ": " + why);
    };
    if (line[0] == '#') {
      if (line.rfind("# tfree-permanent", 0) == 0 && line != checkpoint_header(n, partitions))
        throw corrupt("header does not match this run (" + checkpoint_header(n, partitions) + ")");
      continue;
    }
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra)) throw corrupt("expected two fields");
    std::size_t index = 0;
    try {
      std::size_t pos = 0;
      index = std::stoull(a, &pos);
      if (pos != a.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw corrupt("bad partition index");
    }
    if (index >= partitions) throw corrupt("partition index out of range");
    __int128 value;
    try {
      value = parse_int128(b);
    } catch (const std::exception&) {
      throw corrupt("bad partial sum");
    }
    if (!done.emplace(index, value).second) throw corrupt("duplicate partition index");
  }
  return done;
}

}  // namespace detail

/// Exact permanent by Ryser's formula. The result does not depend on the
/// thread count or the partitioning.
inline __int128 permanent_ryser(const BitMatrix& A, const PermanentOptions& opt = {}) {
  const int n = A.n();
  if (n > 34) throw std::length_error("permanent_ryser: n exceeds 34");
  if (n == 0) return 1;
  const detail::RyserKernel kernel(A);
  const int bits = opt.partition_bits >= 0 ? std::min(opt.partition_bits, n - 1) : std::min(10, n - 1);
  const std::size_t parts = std::size_t{1} << bits;

  std::vector<__int128> partial(parts, 0);
  std::vector<char> have(parts, 0);
  std::ofstream ckpt;
  if (opt.checkpoint) {
    for (const auto& [i, v] : detail::load_checkpoint(*opt.checkpoint, n, parts)) {
      partial[i] = v;
      have[i] = 1;
    }
    const bool fresh = !std::filesystem::exists(*opt.checkpoint) || std::filesystem::file_size(*opt.checkpoint) == 0;
    ckpt.open(*opt.checkpoint, std::ios::app);
    if (!ckpt) throw std::runtime_error("cannot open checkpoint " + opt.checkpoint->string());
    if (fresh) ckpt << detail::checkpoint_header(n, parts) << "\n" << std::flush;
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < parts; ++i)
    if (!have[i]) todo.push_back(i);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{parts - todo.size()};
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t t = next++; t < todo.size(); t = next++) {
      const std::size_t i = todo[t];
      const __int128 v = kernel.partition_sum(bits, i);
      std::lock_guard lock(mu);
      partial[i] = v;
      if (ckpt.is_open()) ckpt << i << ' ' << int128_to_string(v) << '\n' << std::flush;
      const std::size_t f = ++finished;
      if (opt.progress) opt.progress(f, parts);
    }
  };
  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  __int128 total = 0;
  for (auto v : partial) total += v;
  return (n % 2) ? -total : total;
}

// ---------------------------------------------------------------------------
// Matchings

/// Number of perfect matchings by row-by-row backtracking over free columns.
inline std::uint64_t count_matchings_backtrack(const BitMatrix& A) {
  const int n = A.n();
  if (n > 21) throw std::length_error("count_matchings_backtrack: n exceeds 21");
  std::function<std::uint64_t(int, std::uint64_t)> rec = [&](int r, std::uint64_t used) -> std::uint64_t {
    if (r == n) return 1;
    std::uint64_t total = 0;
    for (std::uint64_t free = A.row(r) & ~used; free; free &= free - 1) {
      const int j = std::countr_zero(free);
      total += rec(r + 1, used | (std::uint64_t{1} << j));
    }
    return total;
  };
  return rec(0, 0);
}

struct Matching {
  std::vector<int> sigma;  ///< row i is matched to column sigma[i]

  friend bool operator==(const Matching&, const Matching&) = default;
  friend auto operator<=>(const Matching&, const Matching&) = default;
};

inline bool is_valid_matching(const BitMatrix& A, const Matching& m) {
  const int n = A.n();
  if (static_cast<int>(m.sigma.size()) != n) return false;
  std::uint64_t used = 0;
  for (int i = 0; i < n; ++i) {
    const int j = m.sigma[i];
    if (j < 0 || j >= n || !A.at(i, j) || ((used >> j) & 1u)) return false;
    used |= std::uint64_t{1} << j;
  }
  return true;
}

/// Perfect matchings in lexicographic order of sigma.
class MatchingEnumerator {
 public:
  explicit MatchingEnumerator(const BitMatrix& A) : A_(A), n_(A.n()), sigma_(n_, -1), avail_(n_ + 1, 0) {
    if (n_ > 0) avail_[0] = A_.row(0);
  }

  std::optional<Matching> next() {
    if (exhausted_) return std::nullopt;
    if (n_ == 0) {
      exhausted_ = true;
      return Matching{};
    }
    while (true) {
      if (depth_ < 0) {
        exhausted_ = true;
        return std::nullopt;
      }
      if (depth_ == n_) {
        Matching m{sigma_};
        --depth_;
        return m;
      }
      if (sigma_[depth_] >= 0) used_ &= ~(std::uint64_t{1} << sigma_[depth_]);
      const std::uint64_t cand = avail_[depth_] & ~used_;
      if (!cand) {
        sigma_[depth_] = -1;
        --depth_;
        continue;
      }
      const int j = std::countr_zero(cand);
      avail_[depth_] &= ~(std::uint64_t{1} << j);
      sigma_[depth_] = j;
      used_ |= std::uint64_t{1} << j;
      ++depth_;
      if (depth_ < n_) {
        avail_[depth_] = A_.row(depth_);
        sigma_[depth_] = -1;
      }
    }
  }

 private:
  const BitMatrix& A_;
  int n_;
  std::vector<int> sigma_;
  std::vector<std::uint64_t> avail_;
  std::uint64_t used_ = 0;
  int depth_ = 0;
  bool exhausted_ = false;
};

inline std::vector<Matching> enumerate_matchings(const BitMatrix& A, std::size_t limit) {
  std::vector<Matching> out;
  MatchingEnumerator it(A);
  while (out.size() < limit) {
    auto m = it.next();
    if (!m) break;
    out.push_back(std::move(*m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lower bounds

/// ((k-1)^{k-1} / k^{k-2})^n, valid for nonnegative integer matrices whose
/// row and column sums all equal k.
inline Rational schrijver_bound(int n, int k) {
  if (k < 2) throw std::invalid_argument("schrijver_bound: k must be >= 2");
  const Rational base = Rational(rational_pow(Rational(k - 1), k - 1)) / rational_pow(Rational(k), k - 2);
  return rational_pow(base, n);
}

/// ((q+1)/e)^{q^2+q+1}, the weaker closed form for the projective plane.
inline Decimal projective_plane_bound(std::uint32_t q) {
  const Decimal e = boost::multiprecision::exp(Decimal(1));
  return boost::multiprecision::pow(Decimal(q + 1) / e, static_cast<int>(q * q + q + 1));
}

}  // namespace tfree
