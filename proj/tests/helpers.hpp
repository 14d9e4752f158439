#pragma once

// Shared test utilities: explicit truth-table ADD construction (two different
// recursion orders, for canonicity checks) and small deterministic helpers.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbmc/add.hpp"
#include "pbmc/formula.hpp"
#include "pbmc/oracle.hpp"

namespace testutil {

using Rng = pbmc::oracle::SplitMix64;

// values[idx] where bit i of idx is the assignment of vars[i]; vars must be
// ascending in the manager's order.
inline pbmc::AddRef build_tt_top_down(pbmc::AddManager& m, const std::vector<pbmc::Var>& vars,
                                      const std::vector<pbmc::Int>& values) {
  if (values.size() != (std::size_t{1} << vars.size()))
    throw std::invalid_argument("truth table size mismatch");
  auto rec = [&](auto&& self, std::size_t k, std::size_t prefix) -> pbmc::AddRef {
    if (k == vars.size()) return m.terminal(values[prefix]);
    pbmc::AddRef lo = self(self, k + 1, prefix);
    pbmc::AddRef hi = self(self, k + 1, prefix | (std::size_t{1} << k));
    if (lo == hi) return lo;
    return m.internal(vars[k], lo, hi);
  };
  return rec(rec, 0, 0);
}

// Same function, built from the terminal row upward.
inline pbmc::AddRef build_tt_bottom_up(pbmc::AddManager& m, const std::vector<pbmc::Var>& vars,
                                       const std::vector<pbmc::Int>& values) {
  if (values.size() != (std::size_t{1} << vars.size()))
    throw std::invalid_argument("truth table size mismatch");
  std::vector<pbmc::AddRef> row;
  row.reserve(values.size());
  for (const pbmc::Int& v : values) row.push_back(m.terminal(v));
  for (std::size_t k = vars.size(); k-- > 0;) {
    std::vector<pbmc::AddRef> next(std::size_t{1} << k);
    for (std::size_t j = 0; j < next.size(); ++j) {
      pbmc::AddRef lo = row[j];
      pbmc::AddRef hi = row[j | (std::size_t{1} << k)];
      next[j] = lo == hi ? lo : m.internal(vars[k], lo, hi);
    }
    row = std::move(next);
  }
  return row[0];
}

inline std::vector<bool> assignment_of(std::uint32_t nvars, std::uint64_t bits) {
  std::vector<bool> tau(nvars + 1, false);
  for (pbmc::Var v = 1; v <= nvars; ++v) tau[v] = (bits >> (v - 1)) & 1;
  return tau;
}

inline std::vector<pbmc::Int> random_table(Rng& rng, std::size_t nvars, std::int64_t lo = -8,
                                           std::int64_t hi = 8) {
  std::vector<pbmc::Int> values;
  values.reserve(std::size_t{1} << nvars);
  for (std::size_t i = 0; i < (std::size_t{1} << nvars); ++i)
    values.emplace_back(static_cast<long>(rng.range(lo, hi)));
  return values;
}

// Hand-built diagram for 2x1 + x2 + x3 >= 2 under the identity order, shaped
// like the worked figure: x1 --solid--> 1, x1 --dashed--> x2, x2 --solid--> x3.
inline pbmc::AddRef threshold_diagram(pbmc::AddManager& m) {
  pbmc::AddRef n3 = m.internal(3, m.zero(), m.one());
  pbmc::AddRef n2 = m.internal(2, m.zero(), n3);
  return m.internal(1, n2, m.one());
}

inline pbmc::PBConstraint make_ge(std::vector<pbmc::Term> terms, std::int64_t bound) {
  pbmc::RawConstraint raw;
  for (const pbmc::Term& t : terms) raw.terms.push_back({t.coeff, t.var, false});
  raw.cmp = pbmc::Comparator::Ge;
  raw.bound = bound;
  return pbmc::normalize(raw);
}

inline pbmc::PBConstraint make_eq(std::vector<pbmc::Term> terms, std::int64_t bound) {
  pbmc::RawConstraint raw;
  for (const pbmc::Term& t : terms) raw.terms.push_back({t.coeff, t.var, false});
  raw.cmp = pbmc::Comparator::Eq;
  raw.bound = bound;
  return pbmc::normalize(raw);
}

}  // namespace testutil
