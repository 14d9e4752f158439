#pragma once

// Graded projected model counting: compile one ADD per constraint, eliminate
// every non-projection variable by exists-projection, then every projection
// variable by sum-projection, multiplying together all ADDs that contain the
// chosen variable before projecting it. Variables are picked by least
// occurrence in the live ADD set. The run records an implicit project-join
// tree (the trace) whose gradedness can be validated after the fact.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbmc/add.hpp"
#include "pbmc/compile.hpp"
#include "pbmc/formula.hpp"

namespace pbmc {

enum class Grade : std::uint8_t { None, IY, IX };

// One ADD of the evolving working set, with the metadata that makes it
// reusable: the constraints it represents and the variables already
// projected out of it. The constraint set is empty exactly for ADDs arising
// from free-variable elimination.
struct LiveAdd {
  AddRef add;
  std::set<Cid> constraints;
  std::set<Var> projected_x;
  std::set<Var> projected_y;
};

class LiveSet {
 public:
  int insert(const AddManager& m, LiveAdd entry) {
    int slot = next_slot_++;
    supports_[slot] = m.support(entry.add);
    for (Var v : supports_[slot]) index_[v].insert(slot);
    adds_.emplace(slot, std::move(entry));
    return slot;
  }

  void erase(int slot) {
    for (Var v : supports_.at(slot)) {
      index_[v].erase(slot);
      if (index_[v].empty()) index_.erase(v);
    }
    supports_.erase(slot);
    adds_.erase(slot);
  }

  const LiveAdd& at(int slot) const { return adds_.at(slot); }
  std::size_t support_size(int slot) const { return supports_.at(slot).size(); }
  std::size_t size() const { return adds_.size(); }

  static const std::set<int>& no_slots() {
    static const std::set<int> empty;
    return empty;
  }

  const std::set<int>& containing(Var v) const {
    auto it = index_.find(v);
    return it == index_.end() ? no_slots() : it->second;
  }

  std::vector<int> slots() const {
    std::vector<int> out;
    out.reserve(adds_.size());
    for (const auto& [slot, entry] : adds_) out.push_back(slot);
    return out;
  }

 private:
  std::map<int, LiveAdd> adds_;
  std::map<int, std::vector<Var>> supports_;
  std::map<Var, std::set<int>> index_;
  int next_slot_ = 0;
};

// Least-occurrence choice: the pool variable contained in the fewest live
// ADDs right now; ties break on the summed support size of the containing
// ADDs (an estimate of the merge cost), then on the variable id. The chosen
// variable is removed from the pool.
inline Var pop_next_var(const LiveSet& ls, std::set<Var>& pool) {
  if (pool.empty()) throw std::logic_error("pop_next_var: empty pool");
  Var best = 0;
  std::size_t best_deg = 0, best_cost = 0;
  for (Var v : pool) {
    const auto& slots = ls.containing(v);
    std::size_t deg = slots.size();
    std::size_t cost = 0;
    for (int s : slots) cost += ls.support_size(s);
    if (best == 0 || deg < best_deg || (deg == best_deg && cost < best_cost)) {
      best = v;
      best_deg = deg;
      best_cost = cost;
    }
  }
  pool.erase(best);
  return best;
}

// ---------------------------------------------------------------------------
// Computation trace

struct TraceNode {
  enum class Kind { Leaf, Cached, Internal };
  Kind kind = Kind::Leaf;
  Grade grade = Grade::None;       // Internal only
  std::vector<Var> vars;           // Internal: projection label; others: empty
  std::vector<Cid> cids;           // Leaf: one; Cached: the represented set
  std::vector<Var> support;        // support of the node's ADD at creation
  std::vector<Var> projected;      // Cached only: vars projected inside
  std::vector<std::int32_t> children;
};

struct CountTrace {
  std::vector<TraceNode> nodes;
  std::int32_t root = -1;
};

struct CountStats {
  std::uint64_t apply_calls = 0;
  std::size_t peak_live_adds = 0;
  std::size_t cache_hits = 0;
  friend bool operator==(const CountStats&, const CountStats&) = default;
};

struct CountResult {
  Int count;
  CountTrace trace;
  CountStats stats;
};

inline const char* grade_name(Grade g) {
  switch (g) {
    case Grade::IX: return "IX";
    case Grade::IY: return "IY";
    default: return "none";
  }
}

inline std::string trace_to_json(const CountTrace& t) {
  std::ostringstream os;
  auto list = [&os](const auto& xs) {
    os << "[";
    bool first = true;
    for (const auto& x : xs) {
      if (!first) os << ",";
      os << x;
      first = false;
    }
    os << "]";
  };
  os << "{\"root\":" << t.root << ",\"nodes\":[";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TraceNode& n = t.nodes[i];
    if (i) os << ",";
    os << "{\"id\":" << i << ",\"kind\":\"";
    switch (n.kind) {
      case TraceNode::Kind::Leaf: os << "leaf"; break;
      case TraceNode::Kind::Cached: os << "cached"; break;
      case TraceNode::Kind::Internal: os << "internal"; break;
    }
    os << "\"";
    if (n.kind == TraceNode::Kind::Internal) {
      os << ",\"grade\":\"" << grade_name(n.grade) << "\",\"vars\":";
      list(n.vars);
      os << ",\"children\":";
      list(n.children);
    }
    if (!n.cids.empty()) {
      os << ",\"cids\":";
      list(n.cids);
    }
    if (!n.projected.empty()) {
      os << ",\"projected\":";
      list(n.projected);
    }
    os << ",\"support\":";
    list(n.support);
    os << "}";
  }
  os << "]}";
  return os.str();
}

// ---------------------------------------------------------------------------
// Engine

class CountEngine {
 public:
  using CacheSink = std::function<void(const LiveAdd&, Grade)>;

  CountEngine(AddManager& m, const PBFormula& f) : mgr_(m), formula_(f) {}

  // Plain entry point: one leaf per constraint. Constraints that hold under
  // every assignment are dropped when requested (non-incremental mode).
  void seed_from_formula(bool drop_always_true) {
    for (const auto& [cid, c] : formula_.constraints) {
      if (drop_always_true && c.flag == ConstraintFlag::AlwaysTrue) continue;
      seed_constraint(c, compile_constraint(mgr_, c));
    }
  }

  void seed_constraint(const PBConstraint& c, AddRef add) {
    LiveAdd entry{add, {c.cid}, {}, {}};
    TraceNode node;
    node.kind = TraceNode::Kind::Leaf;
    node.cids = {c.cid};
    node.support = mgr_.support(add);
    insert(std::move(entry), add_trace_node(std::move(node)));
  }

  // Cache-retrieved intermediate from a previous run of the same session.
  void seed_retrieved(const LiveAdd& entry) {
    TraceNode node;
    node.kind = TraceNode::Kind::Cached;
    node.cids.assign(entry.constraints.begin(), entry.constraints.end());
    node.support = mgr_.support(entry.add);
    for (Var v : entry.projected_x) node.projected.push_back(v);
    for (Var v : entry.projected_y) node.projected.push_back(v);
    std::sort(node.projected.begin(), node.projected.end());
    insert(entry, add_trace_node(std::move(node)));
    ++stats_.cache_hits;
  }

  // Pools start as the partition minus everything already projected inside
  // seeded entries.
  void finalize_pools() {
    xpool_ = formula_.projection.xset;
    ypool_ = formula_.projection.yset;
    for (int slot : live_.slots()) {
      const LiveAdd& e = live_.at(slot);
      for (Var v : e.projected_x) xpool_.erase(v);
      for (Var v : e.projected_y) ypool_.erase(v);
    }
  }

  void set_cache_sink(CacheSink sink) { sink_ = std::move(sink); }

  // Merge every live ADD containing v, project v out of the product, and put
  // the result (with merged metadata) back into the live set. With no
  // occurrence the projection acts on the constant 1.
  LiveAdd eliminate_var(Var v, Grade grade) {
    std::vector<int> slots(live_.containing(v).begin(), live_.containing(v).end());
    LiveAdd merged;
    merged.add = mgr_.one();
    std::vector<std::int32_t> children;
    for (int s : slots) {
      const LiveAdd& e = live_.at(s);
      merged.add = mgr_.apply(Op::Mul, merged.add, e.add);
      merged.constraints.insert(e.constraints.begin(), e.constraints.end());
      merged.projected_x.insert(e.projected_x.begin(), e.projected_x.end());
      merged.projected_y.insert(e.projected_y.begin(), e.projected_y.end());
      children.push_back(slot_trace_.at(s));
    }
    merged.add = grade == Grade::IY ? mgr_.exists_project(merged.add, v)
                                    : mgr_.sum_project(merged.add, v);
    (grade == Grade::IY ? merged.projected_y : merged.projected_x).insert(v);

    for (int s : slots) live_.erase(s);
    TraceNode node;
    node.kind = TraceNode::Kind::Internal;
    node.grade = grade;
    node.vars = {v};
    node.support = mgr_.support(merged.add);
    node.children = std::move(children);
    insert(merged, add_trace_node(std::move(node)));
    if (sink_) sink_(merged, grade);
    return merged;
  }

  CountResult run() {
    std::uint64_t applies_before = mgr_.apply_calls();

    while (!ypool_.empty()) eliminate_var(pop_next_var(live_, ypool_), Grade::IY);
    while (!xpool_.empty()) eliminate_var(pop_next_var(live_, xpool_), Grade::IX);

    // Final merge, smallest diagrams first.
    std::vector<int> remaining = live_.slots();
    std::sort(remaining.begin(), remaining.end(), [&](int a, int b) {
      std::size_t na = mgr_.node_count(live_.at(a).add);
      std::size_t nb = mgr_.node_count(live_.at(b).add);
      return na != nb ? na < nb : a < b;
    });
    AddRef product = mgr_.one();
    TraceNode root;
    root.kind = TraceNode::Kind::Internal;
    root.grade = Grade::IX;
    for (int s : remaining) {
      product = mgr_.apply(Op::Mul, product, live_.at(s).add);
      root.children.push_back(slot_trace_.at(s));
    }
    if (!mgr_.is_terminal(product))
      throw std::logic_error("internal invariant violation: residual ADD is not constant");

    CountResult result;
    result.count = mgr_.value(product);
    if (result.count < 0)
      throw std::logic_error("internal invariant violation: negative model count");
    trace_.root = add_trace_node(std::move(root));
    result.trace = std::move(trace_);
    result.stats = stats_;
    result.stats.apply_calls = mgr_.apply_calls() - applies_before;
    return result;
  }

  const LiveSet& live() const { return live_; }

 private:
  std::int32_t add_trace_node(TraceNode node) {
    trace_.nodes.push_back(std::move(node));
    return static_cast<std::int32_t>(trace_.nodes.size()) - 1;
  }

  void insert(LiveAdd entry, std::int32_t trace_id) {
    int slot = live_.insert(mgr_, std::move(entry));
    slot_trace_[slot] = trace_id;
    stats_.peak_live_adds = std::max(stats_.peak_live_adds, live_.size());
  }

  AddManager& mgr_;
  const PBFormula& formula_;
  LiveSet live_;
  std::map<int, std::int32_t> slot_trace_;
  CountTrace trace_;
  CountStats stats_;
  std::set<Var> xpool_, ypool_;
  CacheSink sink_;
};

// From-scratch projected count of a normalized formula. The manager's order
// must cover the formula's variables.
inline CountResult count(AddManager& m, const PBFormula& f) {
  CountEngine engine(m, f);
  engine.seed_from_formula(/*drop_always_true=*/true);
  engine.finalize_pools();
  return engine.run();
}

// ---------------------------------------------------------------------------
// Graded project-join tree validation
//
// Violations are returned as data, one string each:
//  (a) every internal node carries exactly one grade,
//  (b) IX labels stay inside X and IY labels inside Y,
//  (c) no IX node is a descendant of an IY node,
//  (d) the projection labels partition all variables,
//  (e) every leaf whose ADD depends on a variable sits below the internal
//      node that projects that variable,
// plus the leaf/constraint bijection and basic tree-shape checks.

inline std::vector<std::string> validate_graded_trace(const CountTrace& t, const PBFormula& f,
                                                      bool include_always_true = false) {
  std::vector<std::string> out;
  const auto n = static_cast<std::int32_t>(t.nodes.size());
  if (t.root < 0 || t.root >= n) {
    out.push_back("invalid root node id");
    return out;
  }

  // tree shape: every child id valid, each node at most one parent
  std::vector<int> parent_count(t.nodes.size(), 0);
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t ch : t.nodes[i].children) {
      if (ch < 0 || ch >= n || ch == i) {
        out.push_back("node " + std::to_string(i) + " has invalid child id");
        return out;
      }
      ++parent_count[ch];
    }
  }
  for (std::int32_t i = 0; i < n; ++i)
    if (parent_count[i] > 1) out.push_back("node " + std::to_string(i) + " has several parents");

  // descendants via DFS from the root; also detects unreachable nodes
  std::vector<std::set<std::int32_t>> desc(t.nodes.size());
  std::vector<char> visited(t.nodes.size(), 0);
  auto dfs = [&](auto&& self, std::int32_t id) -> void {
    visited[id] = 1;
    for (std::int32_t ch : t.nodes[id].children) {
      if (!visited[ch]) self(self, ch);
      desc[id].insert(ch);
      desc[id].insert(desc[ch].begin(), desc[ch].end());
    }
  };
  dfs(dfs, t.root);
  for (std::int32_t i = 0; i < n; ++i)
    if (!visited[i]) out.push_back("node " + std::to_string(i) + " unreachable from root");

  const std::set<Var>& xset = f.projection.xset;
  const std::set<Var>& yset = f.projection.yset;

  // (a) + (b)
  for (std::int32_t i = 0; i < n; ++i) {
    const TraceNode& node = t.nodes[i];
    if (node.kind != TraceNode::Kind::Internal) {
      if (!node.vars.empty())
        out.push_back("non-internal node " + std::to_string(i) + " carries projection label");
      continue;
    }
    if (node.grade != Grade::IX && node.grade != Grade::IY) {
      out.push_back("internal node " + std::to_string(i) + " has no grade");
      continue;
    }
    for (Var v : node.vars) {
      bool ok = node.grade == Grade::IX ? xset.count(v) > 0 : yset.count(v) > 0;
      if (!ok)
        out.push_back("node " + std::to_string(i) + " projects x" + std::to_string(v) +
                      " outside its grade");
    }
  }

  // (c): walk down, flagging IX nodes below an IY node
  auto walk = [&](auto&& self, std::int32_t id, bool below_iy) -> void {
    const TraceNode& node = t.nodes[id];
    bool is_internal = node.kind == TraceNode::Kind::Internal;
    if (is_internal && node.grade == Grade::IX && below_iy)
      out.push_back("IX node " + std::to_string(id) + " is a descendant of an IY node");
    bool next = below_iy || (is_internal && node.grade == Grade::IY);
    for (std::int32_t ch : node.children) self(self, ch, next);
  };
  walk(walk, t.root, false);

  // (d): labels partition X union Y
  std::map<Var, int> labeled;
  for (const TraceNode& node : t.nodes)
    if (node.kind == TraceNode::Kind::Internal)
      for (Var v : node.vars) ++labeled[v];
  for (Var v = 1; v <= f.nvars; ++v) {
    auto it = labeled.find(v);
    int times = it == labeled.end() ? 0 : it->second;
    if (times == 0)
      out.push_back("variable x" + std::to_string(v) + " is never projected");
    else if (times > 1)
      out.push_back("variable x" + std::to_string(v) + " is projected " + std::to_string(times) +
                    " times");
  }
  for (const auto& [v, times] : labeled)
    if (v == 0 || v > f.nvars)
      out.push_back("projected variable x" + std::to_string(v) + " outside the formula");

  // leaf <-> constraint bijection over the constraints the count used
  std::set<Cid> used;
  for (const auto& [cid, c] : f.constraints)
    if (include_always_true || c.flag != ConstraintFlag::AlwaysTrue) used.insert(cid);
  std::map<Cid, std::int32_t> leaf_of;
  for (std::int32_t i = 0; i < n; ++i) {
    const TraceNode& node = t.nodes[i];
    if (node.kind == TraceNode::Kind::Internal) continue;
    if (node.kind == TraceNode::Kind::Cached) {
      out.push_back("node " + std::to_string(i) + " is cache-seeded; not a constraint leaf");
      continue;
    }
    if (node.cids.size() != 1) {
      out.push_back("leaf " + std::to_string(i) + " does not carry exactly one constraint");
      continue;
    }
    Cid cid = node.cids.front();
    if (!used.count(cid))
      out.push_back("leaf " + std::to_string(i) + " labels unused constraint " +
                    std::to_string(cid));
    else if (!leaf_of.emplace(cid, i).second)
      out.push_back("constraint " + std::to_string(cid) + " appears at several leaves");
  }
  for (Cid cid : used)
    if (!leaf_of.count(cid))
      out.push_back("constraint " + std::to_string(cid) + " has no leaf");

  // (e): dependency containment, against the recorded ADD supports. A node
  // that depends on v must sit below the node projecting v, unless the
  // dependency was already cancelled by a merge created before the
  // projection (a product can stop depending on a variable its operands
  // depend on, in which case that variable is projected elsewhere).
  std::vector<std::int32_t> parent(t.nodes.size(), -1);
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t ch : t.nodes[i].children)
      if (parent[ch] == -1) parent[ch] = i;
  auto has_var = [&](std::int32_t id, Var v) {
    const auto& s = t.nodes[id].support;
    return std::find(s.begin(), s.end(), v) != s.end();
  };
  for (std::int32_t i = 0; i < n; ++i) {
    const TraceNode& node = t.nodes[i];
    if (node.kind != TraceNode::Kind::Internal) continue;
    for (Var v : node.vars) {
      for (std::int32_t mnode = 0; mnode < n; ++mnode) {
        if (mnode == i || !has_var(mnode, v)) continue;
        std::int32_t w = parent[mnode];
        while (w != -1 && has_var(w, v)) w = parent[w];
        if (w == -1)
          out.push_back("x" + std::to_string(v) + " survives to the root above node " +
                        std::to_string(mnode));
        else if (w != i && w >= i)
          out.push_back("node " + std::to_string(mnode) + " depends on x" + std::to_string(v) +
                        " but is not below node " + std::to_string(i));
      }
    }
  }

  return out;
}

}  // namespace pbmc
