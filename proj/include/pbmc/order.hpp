#pragma once

// Maximal cardinality search over the Gaifman graph, used as the decision
// variable order. Ties break toward the smallest variable id; isolated
// variables are appended in id order.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "pbmc/add.hpp"
#include "pbmc/formula.hpp"

namespace pbmc {

inline VarOrder mcs_order(const GaifmanGraph& g, std::uint32_t nvars) {
  std::set<Var> pending;
  std::vector<Var> isolated;
  for (Var v = 1; v <= nvars; ++v) {
    auto it = g.adj.find(v);
    if (it != g.adj.end() && !it->second.empty())
      pending.insert(v);
    else
      isolated.push_back(v);
  }

  std::vector<Var> seq;
  seq.reserve(nvars);
  std::map<Var, std::size_t> score;  // ordered neighbors
  for (Var v : pending) score[v] = 0;

  while (!pending.empty()) {
    Var best = 0;
    std::size_t best_score = 0;
    for (Var v : pending) {
      std::size_t s = score[v];
      if (best == 0 || s > best_score) {
        best = v;
        best_score = s;
      }
    }
    pending.erase(best);
    seq.push_back(best);
    for (const auto& [u, w] : g.adj.at(best))
      if (pending.count(u)) ++score[u];
  }

  seq.insert(seq.end(), isolated.begin(), isolated.end());
  return VarOrder(std::move(seq));
}

}  // namespace pbmc
