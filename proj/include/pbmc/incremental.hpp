#pragma once

// Incremental counting: every intermediate ADD produced at a projection step
// is cached together with the constraints it represents and the variables
// projected out of it. A later count over a modified formula retrieves every
// cached ADD whose metadata proves it still computes a factor of the new
// count, and compiles fresh ADDs only for the uncovered constraints.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbmc/add.hpp"
#include "pbmc/compile.hpp"
#include "pbmc/count.hpp"
#include "pbmc/formula.hpp"
#include "pbmc/order.hpp"

namespace pbmc {

// A persisted LiveAdd plus its creation stamp.
struct CachedAddEntry {
  AddRef add;
  std::set<Cid> constraints;
  std::set<Var> projected_x;
  std::set<Var> projected_y;
  std::uint64_t created_at = 0;
  bool dead = false;  // references a removed constraint
};

class CacheStore {
 public:
  std::uint64_t append(CachedAddEntry entry) {
    entry.created_at = next_stamp_++;
    std::size_t idx = entries_.size();
    for (Cid cid : entry.constraints) by_cid_[cid].push_back(idx);
    entries_.push_back(std::move(entry));
    return entries_.back().created_at;
  }

  // Entries touching a removed constraint stay in the store but are skipped
  // by retrieval from now on.
  void mark_dead(Cid cid) {
    auto it = by_cid_.find(cid);
    if (it == by_cid_.end()) return;
    for (std::size_t idx : it->second) entries_[idx].dead = true;
  }

  void clear() {
    entries_.clear();
    by_cid_.clear();
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<CachedAddEntry>& entries() const { return entries_; }

 private:
  std::vector<CachedAddEntry> entries_;
  std::map<Cid, std::vector<std::size_t>> by_cid_;
  std::uint64_t next_stamp_ = 0;
};

// Variable sets the compatibility predicates reason over, per constraint.
using ConstraintVars = std::map<Cid, std::set<Var>>;

// As written: the variables mentioned by each constraint's terms.
inline ConstraintVars constraint_vars(const PBFormula& f) {
  ConstraintVars out;
  for (const auto& [cid, c] : f.constraints) {
    auto& vars = out[cid];
    for (const Term& t : c.terms) vars.insert(t.var);
  }
  return out;
}

// As compiled: the support of each constraint's diagram. A subset of the
// textual variables (degenerate rows do not depend on everything they
// mention), so compatibility judged on supports reuses strictly more.
inline ConstraintVars semantic_constraint_vars(AddManager& m, const PBFormula& f,
                                               std::map<Cid, AddRef>* unit_memo = nullptr) {
  ConstraintVars out;
  for (const auto& [cid, c] : f.constraints) {
    AddRef add;
    if (unit_memo) {
      auto it = unit_memo->find(cid);
      if (it == unit_memo->end()) it = unit_memo->emplace(cid, compile_constraint(m, c)).first;
      add = it->second;
    } else {
      add = compile_constraint(m, c);
    }
    auto support = m.support(add);
    out[cid] = {support.begin(), support.end()};
  }
  return out;
}

// True iff none of the entry's projected variables occurs in a constraint of
// the formula the entry does not represent.
inline bool check_no_extra_var(const CachedAddEntry& e, const ConstraintVars& vars) {
  for (const auto& [cid, cvars] : vars) {
    if (e.constraints.count(cid)) continue;
    for (Var v : cvars)
      if (e.projected_x.count(v) || e.projected_y.count(v)) return false;
  }
  return true;
}

inline bool check_no_extra_var(const CachedAddEntry& e, const PBFormula& f) {
  return check_no_extra_var(e, constraint_vars(f));
}

// Two candidates clash when one has projected a variable that still occurs,
// unprojected, in the constraints the other represents. Symmetric.
inline bool conflicts(const CachedAddEntry& a, const CachedAddEntry& b,
                      const ConstraintVars& vars) {
  auto one_way = [&vars](const CachedAddEntry& p, const CachedAddEntry& q) {
    for (Cid cid : q.constraints) {
      for (Var v : vars.at(cid)) {
        bool projected_in_p = p.projected_x.count(v) || p.projected_y.count(v);
        bool projected_in_q = q.projected_x.count(v) || q.projected_y.count(v);
        if (projected_in_p && !projected_in_q) return true;
      }
    }
    return false;
  };
  return one_way(a, b) || one_way(b, a);
}

inline bool conflicts(const CachedAddEntry& a, const CachedAddEntry& b, const PBFormula& f) {
  return conflicts(a, b, constraint_vars(f));
}

struct RetrieveResult {
  std::vector<LiveAdd> from_cache;
  std::vector<std::pair<Cid, AddRef>> fresh;  // ascending cid
};

// Cache retrieval. Candidates must represent a subset of the formula's
// constraints and pass check_no_extra_var; admission is greedy by descending
// constraint coverage, then first-created. On top of the pairwise conflict
// predicate, admitted entries keep disjoint constraint sets and disjoint
// projected sets, so that every constraint ends up represented exactly once
// and no variable is projected twice.
//
// Entries with projected X variables additionally require that every
// Y variable occurring in the formula is projected away within the admitted
// set; otherwise the latest such entry is dropped and admission re-runs.
// Reused sum-projections may never end up below a fresh exists-projection.
inline RetrieveResult retrieve(AddManager& m, const CacheStore& cache, const PBFormula& f,
                               std::map<Cid, AddRef>* unit_memo = nullptr) {
  std::map<Cid, AddRef> local_memo;
  if (!unit_memo) unit_memo = &local_memo;
  ConstraintVars vars = semantic_constraint_vars(m, f, unit_memo);

  std::set<Cid> cids;
  for (const auto& [cid, c] : f.constraints) cids.insert(cid);

  std::vector<const CachedAddEntry*> candidates;
  for (const CachedAddEntry& e : cache.entries()) {
    if (e.dead) continue;
    if (!std::includes(cids.begin(), cids.end(), e.constraints.begin(), e.constraints.end()))
      continue;
    if (!check_no_extra_var(e, vars)) continue;
    candidates.push_back(&e);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const CachedAddEntry* a, const CachedAddEntry* b) {
              if (a->constraints.size() != b->constraints.size())
                return a->constraints.size() > b->constraints.size();
              return a->created_at < b->created_at;
            });

  std::set<Var> occurring_y;
  for (const auto& [cid, cvars] : vars)
    for (Var v : cvars)
      if (f.projection.yset.count(v)) occurring_y.insert(v);

  std::set<const CachedAddEntry*> dropped;
  std::vector<const CachedAddEntry*> admitted;
  for (;;) {
    admitted.clear();
    for (const CachedAddEntry* e : candidates) {
      if (dropped.count(e)) continue;
      bool ok = true;
      for (const CachedAddEntry* b : admitted) {
        auto intersects = [](const std::set<Var>& p, const std::set<Var>& q) {
          for (Var v : p)
            if (q.count(v)) return true;
          return false;
        };
        auto cid_overlap = [](const std::set<Cid>& p, const std::set<Cid>& q) {
          for (Cid c : p)
            if (q.count(c)) return true;
          return false;
        };
        std::set<Var> pe, pb;
        pe.insert(e->projected_x.begin(), e->projected_x.end());
        pe.insert(e->projected_y.begin(), e->projected_y.end());
        pb.insert(b->projected_x.begin(), b->projected_x.end());
        pb.insert(b->projected_y.begin(), b->projected_y.end());
        if (cid_overlap(e->constraints, b->constraints) || intersects(pe, pb) ||
            conflicts(*e, *b, vars)) {
          ok = false;
          break;
        }
      }
      if (ok) admitted.push_back(e);
    }

    std::set<Var> covered_y;
    for (const CachedAddEntry* e : admitted)
      covered_y.insert(e->projected_y.begin(), e->projected_y.end());
    const CachedAddEntry* offender = nullptr;
    if (!std::includes(covered_y.begin(), covered_y.end(), occurring_y.begin(),
                       occurring_y.end())) {
      for (auto it = admitted.rbegin(); it != admitted.rend(); ++it)
        if (!(*it)->projected_x.empty()) {
          offender = *it;
          break;
        }
    }
    if (!offender) break;
    dropped.insert(offender);
  }

  RetrieveResult result;
  std::set<Cid> covered;
  for (const CachedAddEntry* e : admitted) {
    result.from_cache.push_back({e->add, e->constraints, e->projected_x, e->projected_y});
    covered.insert(e->constraints.begin(), e->constraints.end());
  }
  for (const auto& [cid, c] : f.constraints) {
    if (covered.count(cid)) continue;
    result.fresh.emplace_back(cid, unit_memo->at(cid));  // compiled with the var map
  }
  return result;
}

// ---------------------------------------------------------------------------
// Session

// Owns the evolving formula, the shared manager and the cache. The variable
// universe and the X/Y partition are fixed per session; the decision order is
// frozen at the first count from the formula's Gaifman graph. Removed
// constraint ids are never reissued.
class Session {
 public:
  struct Event {
    enum class Kind { Add, Remove, Count } kind;
    Cid cid = 0;   // Add/Remove
    Int count = 0; // Count
  };

  Session(std::uint32_t nvars, VarPartition partition) {
    formula_.nvars = nvars;
    validate_partition(partition);
    formula_.projection = std::move(partition);
  }

  explicit Session(const PBFormula& initial) {
    formula_ = initial;
    validate_partition(formula_.projection);
    for (const auto& [cid, c] : formula_.constraints) next_cid_ = std::max(next_cid_, cid + 1);
  }

  std::uint32_t nvars() const { return formula_.nvars; }
  const PBFormula& formula() const { return formula_; }
  const VarPartition& partition() const { return formula_.projection; }
  const CacheStore& cache() const { return cache_; }
  const std::vector<Event>& log() const { return log_; }

  // Normalizes, assigns a fresh cid, no other preprocessing.
  Cid add_constraint(const RawConstraint& raw) {
    for (const RawTerm& t : raw.terms)
      if (t.var == 0 || t.var > formula_.nvars)
        throw std::invalid_argument("constraint references undeclared variable x" +
                                    std::to_string(t.var));
    PBConstraint c = normalize(raw);
    c.cid = next_cid_++;
    Cid cid = c.cid;
    formula_.constraints.emplace(cid, std::move(c));
    log_.push_back({Event::Kind::Add, cid, 0});
    return cid;
  }

  Cid add_constraint(std::string_view text) {
    return add_constraint(parse_constraint_text(text, formula_.nvars));
  }

  void remove_constraint(Cid cid) {
    auto it = formula_.constraints.find(cid);
    if (it == formula_.constraints.end())
      throw std::out_of_range("unknown constraint id " + std::to_string(cid));
    formula_.constraints.erase(it);
    cache_.mark_dead(cid);
    log_.push_back({Event::Kind::Remove, cid, 0});
  }

  // Changing the projection invalidates the cached metadata.
  void set_partition(VarPartition partition) {
    validate_partition(partition);
    formula_.projection = std::move(partition);
    cache_.clear();
  }

  // Retrieval seeds the live set, the remaining variables are eliminated as
  // in a plain count, and every projection intermediate is appended to the
  // cache. Tautological constraints stay (as constant-1 ADDs): the cid space
  // must remain stable.
  CountResult count() {
    ensure_manager();
    RetrieveResult rr = retrieve(*mgr_, cache_, formula_, &unit_adds_);

    CountEngine engine(*mgr_, formula_);
    for (const LiveAdd& e : rr.from_cache) engine.seed_retrieved(e);
    for (const auto& [cid, add] : rr.fresh) engine.seed_constraint(formula_.constraints.at(cid), add);
    engine.finalize_pools();
    engine.set_cache_sink([this](const LiveAdd& e, Grade) {
      cache_.append({e.add, e.constraints, e.projected_x, e.projected_y});
    });
    CountResult result = engine.run();
    log_.push_back({Event::Kind::Count, 0, result.count});
    return result;
  }

  // Freezes the decision order on first use.
  AddManager& manager() {
    ensure_manager();
    return *mgr_;
  }

  // Testing hook: cache entries are data, so arbitrary (metadata-valid)
  // entries may be injected; retrieval must stay sound regardless.
  void inject_cache_entry(CachedAddEntry entry) { cache_.append(std::move(entry)); }

 private:
  void validate_partition(const VarPartition& p) const {
    for (Var v = 1; v <= formula_.nvars; ++v)
      if (p.xset.count(v) + p.yset.count(v) != 1)
        throw std::invalid_argument("partition must split 1..nvars into X and Y");
    if (p.xset.size() + p.yset.size() != formula_.nvars)
      throw std::invalid_argument("partition mentions variables outside 1..nvars");
  }

  void ensure_manager() {
    if (!mgr_) mgr_.emplace(mcs_order(build_gaifman_graph(formula_), formula_.nvars));
  }

  PBFormula formula_;
  std::optional<AddManager> mgr_;
  CacheStore cache_;
  std::map<Cid, AddRef> unit_adds_;
  Cid next_cid_ = 1;
  std::vector<Event> log_;
};

}  // namespace pbmc
