#pragma once

// Brute-force reference counters and reproducible instance/session
// generators. Everything here works by exhaustive enumeration over the raw
// formula and shares no decision-diagram code with the counter.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbmc/formula.hpp"

namespace pbmc::oracle {

inline constexpr std::uint32_t kEnumerationGuard = 24;

namespace detail {

inline void check_guard(std::size_t bits) {
  if (bits > kEnumerationGuard)
    throw std::invalid_argument("instance exceeds the 24-variable enumeration guard");
}

}  // namespace detail

inline std::uint64_t brute_count(const PBFormula& f) {
  detail::check_guard(f.nvars);
  std::uint64_t count = 0;
  std::vector<bool> tau(f.nvars + 1, false);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.nvars); ++bits) {
    for (Var v = 1; v <= f.nvars; ++v) tau[v] = (bits >> (v - 1)) & 1;
    if (satisfies_all(f, tau)) ++count;
  }
  return count;
}

inline bool brute_satisfiable(const PBFormula& f) {
  detail::check_guard(f.nvars);
  std::vector<bool> tau(f.nvars + 1, false);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.nvars); ++bits) {
    for (Var v = 1; v <= f.nvars; ++v) tau[v] = (bits >> (v - 1)) & 1;
    if (satisfies_all(f, tau)) return true;
  }
  return false;
}

// Literal evaluation of the definition: the number of X-assignments that some
// Y-assignment extends to a model.
inline std::uint64_t brute_projected_count(const PBFormula& f, const std::set<Var>& xset,
                                           const std::set<Var>& yset) {
  detail::check_guard(xset.size() + yset.size());
  std::vector<Var> xs(xset.begin(), xset.end());
  std::vector<Var> ys(yset.begin(), yset.end());
  std::vector<bool> tau(f.nvars + 1, false);

  std::uint64_t count = 0;
  for (std::uint64_t xbits = 0; xbits < (std::uint64_t{1} << xs.size()); ++xbits) {
    for (std::size_t i = 0; i < xs.size(); ++i) tau[xs[i]] = (xbits >> i) & 1;
    bool extendable = false;
    for (std::uint64_t ybits = 0; ybits < (std::uint64_t{1} << ys.size()) && !extendable;
         ++ybits) {
      for (std::size_t i = 0; i < ys.size(); ++i) tau[ys[i]] = (ybits >> i) & 1;
      extendable = satisfies_all(f, tau);
    }
    if (extendable) ++count;
  }
  return count;
}

inline std::uint64_t brute_projected_count(const PBFormula& f) {
  return brute_projected_count(f, f.projection.xset, f.projection.yset);
}

// ---------------------------------------------------------------------------
// Generators (self-contained RNG so output bytes do not depend on the
// standard library implementation)

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(double p) { return (next() >> 11) * 0x1.0p-53 < p; }
};

struct GenParams {
  std::uint32_t nvars = 8;
  std::uint32_t nconstraints = 4;
  std::int64_t max_coeff = 5;
  double density = 0.4;     // fraction of variables mentioned per constraint
  double x_fraction = 0.7;  // fraction of variables in the projection set
};

namespace detail {

inline std::vector<Var> sample_vars(SplitMix64& rng, std::uint32_t nvars, std::size_t k) {
  std::vector<Var> all(nvars);
  for (std::uint32_t i = 0; i < nvars; ++i) all[i] = i + 1;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.below(all.size() - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

// Three loose row shapes: knapsack-like all-positive rows, mixed-sign rows
// with the occasional equality, and unit-coefficient covering rows.
inline RawConstraint gen_constraint(SplitMix64& rng, const GenParams& p) {
  std::size_t want = static_cast<std::size_t>(p.density * p.nvars + 0.5);
  want = std::max<std::size_t>(1, std::min<std::size_t>(want, p.nvars));
  std::vector<Var> vars = sample_vars(rng, p.nvars, want);
  std::sort(vars.begin(), vars.end());

  RawConstraint raw;
  std::uint64_t family = rng.below(3);
  std::int64_t max_sum = 0, min_sum = 0;
  for (Var v : vars) {
    RawTerm t;
    t.var = v;
    switch (family) {
      case 0: t.coeff = rng.range(1, p.max_coeff); break;
      case 1:
        t.coeff = rng.range(1, p.max_coeff);
        if (rng.chance(0.4)) t.coeff = -t.coeff;
        if (rng.chance(0.15)) t.negated = true;
        break;
      default: t.coeff = 1; break;
    }
    // a term contributes a value in [min(0,a), max(0,a)] either way
    min_sum += std::min<std::int64_t>(0, t.coeff);
    max_sum += std::max<std::int64_t>(0, t.coeff);
    raw.terms.push_back(t);
  }

  if (family == 1 && rng.chance(0.25)) {
    // achievable equality: aim at the value of a random assignment
    std::int64_t target = 0;
    for (const RawTerm& t : raw.terms) {
      bool on = rng.below(2) == 1;
      bool lit = t.negated ? !on : on;
      if (lit) target += t.coeff;
    }
    raw.cmp = Comparator::Eq;
    raw.bound = target;
    return raw;
  }

  raw.cmp = rng.chance(0.2) ? Comparator::Le : Comparator::Ge;
  if (rng.chance(0.08)) {
    raw.bound = max_sum + rng.range(1, 3);  // infeasible on purpose
  } else {
    raw.bound = rng.range(std::min<std::int64_t>(min_sum, 0), std::max<std::int64_t>(max_sum, 1));
  }
  if (raw.cmp == Comparator::Le) raw.bound = rng.range(0, std::max<std::int64_t>(max_sum, 1));
  return raw;
}

}  // namespace detail

inline PBFormula gen_instance(std::uint64_t seed, const GenParams& p) {
  if (p.nvars == 0 || p.nconstraints == 0)
    throw std::invalid_argument("generator needs at least one variable and constraint");
  detail::check_guard(p.nvars);
  SplitMix64 rng(seed);

  PBFormula f;
  f.nvars = p.nvars;
  for (Cid cid = 1; cid <= p.nconstraints; ++cid) {
    PBConstraint c = normalize(detail::gen_constraint(rng, p));
    c.cid = cid;
    f.constraints.emplace(cid, std::move(c));
  }

  std::size_t xsize = static_cast<std::size_t>(p.x_fraction * p.nvars + 0.5);
  xsize = std::min<std::size_t>(xsize, p.nvars);
  std::vector<Var> xs = detail::sample_vars(rng, p.nvars, xsize);
  std::set<Var> xset(xs.begin(), xs.end());
  f.projection = make_partition(p.nvars, xset);
  return f;
}

// Emits an incremental script: header, the initial constraints, then
// counting_steps 'count' commands with a mutation (add / remove / modify)
// before each count after the first.
inline std::string gen_session_script(std::uint64_t seed, const GenParams& p,
                                      std::uint32_t counting_steps) {
  if (counting_steps < 1) throw std::invalid_argument("need at least one counting step");
  PBFormula initial = gen_instance(seed, p);
  SplitMix64 rng(seed ^ 0xD1B54A32D192ED03ULL);

  std::ostringstream os;
  os << "* #variable= " << initial.nvars << " #constraint= " << initial.constraints.size()
     << "\n";
  if (!initial.projection.yset.empty()) {
    os << "* proj:";
    for (Var v : initial.projection.xset) os << " x" << v;
    os << "\n";
  }

  // normalized rows render to plain text; the runner re-normalizes on add
  std::map<Cid, PBConstraint> alive;  // by runner-assigned cid
  Cid next_cid = 1;
  auto emit_add = [&](const PBConstraint& c) {
    PBConstraint copy = c;
    copy.cid = next_cid++;
    os << "add " << render_constraint(copy) << "\n";
    alive.emplace(copy.cid, copy);
  };

  for (const auto& [cid, c] : initial.constraints) emit_add(c);
  os << "count\n";

  for (std::uint32_t step = 1; step < counting_steps; ++step) {
    std::uint64_t op = rng.below(3);
    if (op != 0 && alive.empty()) op = 0;
    if (op == 0) {  // add a fresh row
      PBConstraint c = normalize(detail::gen_constraint(rng, p));
      emit_add(c);
    } else {
      auto it = alive.begin();
      std::advance(it, rng.below(alive.size()));
      Cid victim = it->first;
      PBConstraint old = it->second;
      os << "remove " << victim << "\n";
      alive.erase(it);
      if (op == 1) {  // modify: re-add with a perturbed coefficient or bound
        RawConstraint raw;
        for (const Term& t : old.terms) raw.terms.push_back({t.coeff, t.var, false});
        raw.cmp = old.cmp;
        raw.bound = old.bound;
        if (!raw.terms.empty() && rng.chance(0.5)) {
          auto& t = raw.terms[rng.below(raw.terms.size())];
          t.coeff += rng.range(-2, 2);
          if (t.coeff == 0) t.coeff = 1;
        } else {
          raw.bound += rng.range(-2, 2);
        }
        emit_add(normalize(raw));
      }
    }
    os << "count\n";
  }
  return os.str();
}

}  // namespace pbmc::oracle
