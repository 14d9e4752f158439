#pragma once

// Compiles one normalized PB constraint into its 0/1 indicator ADD.
//
// The construction walks the constraint's support in manager order, tracking
// the residual bound still to be met. Residuals outside the achievable range
// of the remaining suffix collapse to a single memo key (always-true resp.
// always-false), which bounds the table by the coefficient magnitudes.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pbmc/add.hpp"
#include "pbmc/formula.hpp"

namespace pbmc {

inline AddRef compile_constraint(AddManager& m, const PBConstraint& c,
                                 bool clamp_residuals = true) {
  // support sorted by decision order, top level first
  std::vector<Term> terms = c.terms;
  std::sort(terms.begin(), terms.end(),
            [&](const Term& a, const Term& b) { return m.order().rank(a.var) < m.order().rank(b.var); });

  const std::size_t n = terms.size();
  // min_rem[i] / max_rem[i]: extreme achievable sums over terms[i..)
  std::vector<std::int64_t> min_rem(n + 1, 0), max_rem(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    min_rem[i] = min_rem[i + 1] + std::min<std::int64_t>(0, terms[i].coeff);
    max_rem[i] = max_rem[i + 1] + std::max<std::int64_t>(0, terms[i].coeff);
  }

  const bool is_eq = c.cmp == Comparator::Eq;
  std::map<std::pair<std::size_t, std::int64_t>, AddRef> memo;

  auto rec = [&](auto&& self, std::size_t depth, std::int64_t residual) -> AddRef {
    if (clamp_residuals || depth == n) {
      if (is_eq) {
        if (residual < min_rem[depth] || residual > max_rem[depth]) return m.zero();
        if (depth == n) return m.one();  // residual == 0 here
      } else {
        if (residual <= min_rem[depth]) return m.one();
        if (residual > max_rem[depth]) return m.zero();
      }
    }
    auto key = std::make_pair(depth, residual);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    AddRef lo = self(self, depth + 1, residual);
    AddRef hi = self(self, depth + 1, residual - terms[depth].coeff);
    AddRef node = m.internal(terms[depth].var, lo, hi);
    memo.emplace(key, node);
    return node;
  };
  return rec(rec, 0, c.bound);
}

}  // namespace pbmc
