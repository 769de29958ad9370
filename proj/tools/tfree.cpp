// tfree: command-line front end for the transverse-free curve toolkit.
//
// Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 resource cap.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tfree/bounds.hpp"
#include "tfree/density.hpp"
#include "tfree/levi.hpp"
#include "tfree/report.hpp"
#include "tfree/synth.hpp"
#include "tfree/verify.hpp"

namespace {

using namespace tfree;

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  unsigned threads = default_threads();
  std::string format = "json";
};

void emit(const Globals& g, const std::vector<json>& records) {
  if (g.format == "csv") {
    std::cout << to_csv(records);
  } else {
    for (const auto& r : records) std::cout << r.dump() << '\n';
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Short target names map to fixed atoms on line 0 and point 0.
PredicateSpec target_predicate(const Plane& plane, const std::string& target) {
  if (target == "tL") return parse_predicate("tL(0)");
  if (target == "sQ") return parse_predicate("sQ(0)");
  if (target == "tLP") {
    const auto& L = plane.lines()[0];
    return parse_predicate("tLP(0," + std::to_string(plane.point_index(L.basis[0])) + ")");
  }
  return parse_predicate(target);
}

void check_prime_power(std::uint32_t q) {
  try {
    FieldCtx::split_prime_power(q);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_permanent(const Globals& g, std::optional<std::uint32_t> q, const std::string& matrix_path, bool allow_long,
                  const std::string& checkpoint) {
  const auto t0 = std::chrono::steady_clock::now();
  BitMatrix M;
  if (!matrix_path.empty()) {
    std::ifstream in(matrix_path);
    if (!in) throw UsageError("cannot read matrix file " + matrix_path);
    std::stringstream ss;
    ss << in.rdbuf();
    M = BitMatrix::from_text(ss.str());
  } else {
    if (!q || *q < 2 || *q > 5) throw UsageError("--q must be 2, 3, 4 or 5");
    check_prime_power(*q);
    if (*q == 5 && !allow_long) {
      std::cerr << "permanent --q 5 sums over 2^31 column subsets and takes about a minute of CPU time per core; "
                   "pass --allow-long to run it (add --checkpoint FILE to make it resumable)\n";
      return kExitCap;
    }
    M = incidence_matrix(*q).bits;
  }
  PermanentOptions opt;
  opt.threads = g.threads;
  if (!checkpoint.empty()) opt.checkpoint = checkpoint;
  const __int128 per = permanent_ryser(M, opt);
  json j;
  j["kind"] = "permanent";
  j["q"] = q ? json(*q) : json(nullptr);
  j["n"] = M.n();
  j["permanent"] = int128_to_string(per);
  if (q) {
    const int n = M.n();
    j["schrijver_bound"] = format_sig(to_decimal(schrijver_bound(n, static_cast<int>(*q) + 1)), 20);
    j["prop33_bound"] = format_sig(projective_plane_bound(*q), 20);
  } else {
    j["schrijver_bound"] = nullptr;
    j["prop33_bound"] = nullptr;
  }
  j["elapsed_ms"] = ms_since(t0);
  emit(g, {j});
  return 0;
}

int cmd_census(const Globals& g, std::uint32_t q, int d, const std::string& target, std::uint64_t cap) {
  check_prime_power(q);
  const auto t0 = std::chrono::steady_clock::now();
  const Plane plane(q);
  const auto spec = target_predicate(plane, target);
  const CompiledPredicate pred(plane, spec, d);
  const auto est = census(plane, pred, g.threads, cap);
  emit(g, {to_json(est, "census", q, d, spec.str(), ms_since(t0))});
  return 0;
}

int cmd_sample(const Globals& g, std::uint32_t q, int d, const std::string& target, std::uint64_t samples,
               std::uint64_t seed) {
  check_prime_power(q);
  const auto t0 = std::chrono::steady_clock::now();
  const Plane plane(q);
  const auto spec = target_predicate(plane, target);
  const auto est = monte_carlo(plane, CompiledPredicate(plane, spec, d), samples, seed, g.threads);
  emit(g, {to_json(est, "monte_carlo", q, d, spec.str(), ms_since(t0))});
  return 0;
}

int cmd_synth(const Globals& g, std::uint32_t q, int d, std::uint64_t seed, std::size_t matching_index,
              std::uint64_t attempts) {
  check_prime_power(q);
  const Plane plane(q);
  const auto M = incidence_matrix(plane);
  const auto matchings = enumerate_matchings(M.bits, matching_index + 1);
  if (matching_index >= matchings.size()) throw UsageError("--matching index out of range");
  const auto sys = tangency_system(plane, matchings[matching_index], d);
  const auto res = sample_transverse_free(plane, sys, seed, attempts);
  emit(g, {synth_provenance(sys, res)});
  return res.form ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse-free plane curves over finite fields"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (default: TFREE_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::optional<std::uint32_t> q;
  std::uint32_t q_req = 2;
  int d = 3;
  std::string target = "tL";
  std::uint64_t seed = 1;
  std::uint64_t samples = 10000;
  std::uint64_t cap = kDefaultCensusCap;

  auto* perm = app.add_subcommand("permanent", "Exact permanent of the point-line incidence matrix");
  bool allow_long = false;
  std::string checkpoint, matrix_path;
  auto* q_opt = perm->add_option("--q", q, "Field order (2..5)");
  perm->add_option("--matrix", matrix_path, "Read a 0/1 matrix from a file instead")->excludes(q_opt);
  perm->add_flag("--allow-long", allow_long, "Permit the q=5 run");
  perm->add_option("--checkpoint", checkpoint, "Resumable partial-sum file");

  auto* matrix = app.add_subcommand("matrix", "Print the incidence matrix as 0/1 rows");
  matrix->add_option("--q", q_req, "Field order")->required();

  auto* cen = app.add_subcommand("census", "Exact density over all forms of degree d");
  cen->add_option("--q", q_req, "Field order")->required();
  cen->add_option("--d", d, "Degree")->required()->check(CLI::PositiveNumber);
  cen->add_option("--target", target, "tL | sQ | tLP | F | predicate such as \"tLP(0,1),!sQ(5)\"");
  cen->add_option("--cap", cap, "Maximum number of coefficient vectors");

  auto* bnd = app.add_subcommand("bounds", "Closed-form density bounds");
  bnd->add_option("--q", q_req, "Field order")->required();

  auto* ineq = app.add_subcommand("inequalities", "h, psi and xi over prime powers");
  std::uint32_t q_max = 32;
  ineq->add_option("--q-max", q_max, "Largest q")->check(CLI::Range(2u, 1u << 16));

  auto* smp = app.add_subcommand("sample", "Monte Carlo density estimate");
  smp->add_option("--q", q_req, "Field order")->required();
  smp->add_option("--d", d, "Degree")->required()->check(CLI::PositiveNumber);
  smp->add_option("--target", target, "Same as census");
  smp->add_option("--samples,-n", samples, "Sample count")->check(CLI::PositiveNumber);
  smp->add_option("--seed", seed, "Random seed (default 1)");

  auto* syn = app.add_subcommand("synth", "Smooth transverse-free curve from a point-line matching");
  std::size_t matching_index = 0;
  std::uint64_t attempts = kDefaultSynthAttempts;
  syn->add_option("--q", q_req, "Field order")->required();
  syn->add_option("--d", d, "Degree")->required()->check(CLI::PositiveNumber);
  syn->add_option("--seed", seed, "Random seed (default 1)");
  syn->add_option("--matching", matching_index, "Index in lexicographic matching order");
  syn->add_option("--max-attempts", attempts, "Draw limit")->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "Recompute known values; one JSON line per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*perm) return cmd_permanent(g, q, matrix_path, allow_long, checkpoint);
    if (*matrix) {
      check_prime_power(q_req);
      std::cout << incidence_matrix(q_req).bits.to_text();
      return 0;
    }
    if (*cen) return cmd_census(g, q_req, d, target, cap);
    if (*bnd) {
      check_prime_power(q_req);
      emit(g, {to_json(bounds_report(q_req))});
      return 0;
    }
    if (*ineq) {
      const auto rep = inequality_suite(q_max);
      emit(g, {to_json(rep)});
      return rep.all_hold() ? 0 : kExitMismatch;
    }
    if (*smp) return cmd_sample(g, q_req, d, target, samples, seed);
    if (*syn) return cmd_synth(g, q_req, d, seed, matching_index, attempts);
    if (*ver) {
      std::vector<json> records;
      const bool ok = run_verification(
          [&](const CheckResult& c) {
            if (g.format == "json") {
              std::cout << to_json(c).dump() << std::endl;
            } else {
              records.push_back(to_json(c));
            }
          },
          g.threads);
      if (g.format == "csv") std::cout << to_csv(records);
      return ok ? 0 : kExitMismatch;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMismatch;
  }
  return kExitUsage;
}
