#pragma once

// JSON and CSV renderings of results.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tfree/bounds.hpp"
#include "tfree/density.hpp"
#include "tfree/forms.hpp"
#include "tfree/levi.hpp"
#include "tfree/numeric.hpp"
#include "tfree/synth.hpp"

namespace tfree {

using json = nlohmann::ordered_json;

inline json to_json(const DensityEstimate& e, const std::string& kind, std::uint32_t q, int d,
                    const std::string& predicate, double elapsed_ms) {
  json j;
  j["kind"] = kind;
  j["q"] = q;
  j["d"] = d;
  j["predicate"] = predicate;
  j["hits"] = e.hits;
  j["total"] = e.total;
  j["estimate"] = e.estimate;
  if (e.ci_low)
    j["ci"] = json::array({*e.ci_low, *e.ci_high});
  else
    j["ci"] = nullptr;
  if (e.seed)
    j["seed"] = *e.seed;
  else
    j["seed"] = nullptr;
  j["elapsed_ms"] = elapsed_ms;
  return j;
}

inline json to_json(const BoundValue& v, int digits = 30) {
  json j;
  j["decimal"] = format_sig(v.value, digits);
  if (v.exact)
    j["exact"] = rational_string(*v.exact);
  else
    j["exact"] = nullptr;
  return j;
}

inline json to_json(const BoundsReport& r) {
  json j;
  j["kind"] = "bounds";
  j["q"] = r.q;
  j["smooth_density"] = to_json(r.smooth_density);
  j["lower"] = to_json(r.lower);
  j["upper75"] = to_json(r.upper75);
  j["upper_precise"] = to_json(r.upper_precise);
  j["bertini_lower"] = to_json(r.bertini_lower);
  return j;
}

inline json to_json(const InequalityReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"q", r.q},
                    {"h", format_sig(to_decimal(r.h), 20)},
                    {"psi", format_sig(to_decimal(r.psi), 20)},
                    {"xi", format_sig(to_decimal(r.xi), 20)}});
  }
  json j;
  j["kind"] = "inequalities";
  j["rows"] = rows;
  j["h_at_least_one"] = rep.h_at_least_one;
  j["psi_at_least_one"] = rep.psi_at_least_one;
  j["psi_decreasing"] = rep.psi_decreasing;
  j["xi_decreasing"] = rep.xi_decreasing;
  j["xi_below_7_5"] = rep.xi_below_7_5;
  return j;
}

/// Provenance of a synthesized curve.
inline json synth_provenance(const TangencySystem& sys, const SynthResult& res) {
  json j;
  j["kind"] = "synth";
  j["q"] = sys.q;
  j["d"] = sys.d;
  j["matching"] = sys.matching.sigma;
  j["seed"] = res.seed;
  j["attempts"] = res.attempts;
  j["nonsmooth"] = res.nonsmooth;
  j["kernel_dimension"] = sys.kernel_basis.size();
  j["rank"] = sys.rank();
  j["exhaustive"] = res.exhaustive;
  if (res.form) {
    j["form"] = to_string(*res.form);
    j["failure"] = nullptr;
  } else {
    j["form"] = nullptr;
    j["failure"] = res.failure;
  }
  return j;
}

/// CSV with a header row from the keys of the first object. Nested values are
/// written as compact JSON.
inline std::string to_csv(const std::vector<json>& records) {
  std::ostringstream os;
  if (records.empty()) return {};
  auto cell = [](const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + "\"";
    }
    return s;
  };
  bool first = true;
  for (const auto& [k, v] : records.front().items()) {
    os << (first ? "" : ",") << k;
    first = false;
  }
  os << '\n';
  for (const auto& r : records) {
    first = true;
    for (const auto& [k, v] : records.front().items()) {
      os << (first ? "" : ",") << (r.contains(k) ? cell(r[k]) : std::string());
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace tfree
