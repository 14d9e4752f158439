#pragma once

// Canonical reduced ordered algebraic decision diagrams with exact integer
// terminals. One AddManager owns a fixed variable order, a unique table and
// the memo tables for Apply/restrict; refs are only meaningful within the
// manager that produced them.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pbmc/types.hpp"

namespace pbmc {

struct AddRef {
  std::uint32_t id = 0;
  std::uint32_t mgr = 0;  // serial of the owning manager
  friend bool operator==(AddRef, AddRef) = default;
};

enum class Op : std::uint8_t { Add, Mul, Max };

// Permutation of 1..n; rank 0 is the topmost decision level.
class VarOrder {
 public:
  VarOrder() = default;

  explicit VarOrder(std::vector<Var> seq) : seq_(std::move(seq)) {
    rank_.assign(seq_.size() + 1, kUnset);
    for (std::uint32_t pos = 0; pos < seq_.size(); ++pos) {
      Var v = seq_[pos];
      if (v == 0 || v > seq_.size() || rank_[v] != kUnset)
        throw std::invalid_argument("variable order is not a permutation of 1..n");
      rank_[v] = pos;
    }
  }

  static VarOrder identity(std::uint32_t nvars) {
    std::vector<Var> seq(nvars);
    for (std::uint32_t i = 0; i < nvars; ++i) seq[i] = i + 1;
    return VarOrder(std::move(seq));
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(seq_.size()); }

  Var var_at(std::uint32_t pos) const { return seq_.at(pos); }

  std::uint32_t rank(Var v) const {
    if (v == 0 || v > seq_.size())
      throw std::invalid_argument("variable x" + std::to_string(v) + " outside order");
    return rank_[v];
  }

  const std::vector<Var>& sequence() const { return seq_; }

 private:
  static constexpr std::uint32_t kUnset = 0xFFFFFFFF;
  std::vector<Var> seq_;
  std::vector<std::uint32_t> rank_;
};

class AddManager {
 public:
  explicit AddManager(VarOrder order) : order_(std::move(order)), serial_(next_serial()++) {}
  explicit AddManager(std::uint32_t nvars) : AddManager(VarOrder::identity(nvars)) {}

  AddManager(const AddManager&) = delete;
  AddManager& operator=(const AddManager&) = delete;
  AddManager(AddManager&&) = default;

  const VarOrder& order() const { return order_; }
  std::uint32_t num_vars() const { return order_.size(); }
  std::uint32_t serial() const { return serial_; }

  // --- construction ------------------------------------------------------

  AddRef terminal(const Int& value) {
    auto it = terminal_index_.find(value);
    if (it != terminal_index_.end()) return ref(it->second);
    std::uint32_t value_idx = static_cast<std::uint32_t>(terminal_values_.size());
    terminal_values_.push_back(value);
    std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({kLeafLevel, value_idx, 0});
    terminal_index_.emplace(value, id);
    return ref(id);
  }

  AddRef terminal(std::int64_t value) { return terminal(Int(static_cast<long>(value))); }
  AddRef zero() { return terminal(std::int64_t{0}); }
  AddRef one() { return terminal(std::int64_t{1}); }

  // Canonical internal node; returns lo when lo == hi. The decision variable
  // must precede both children in the order (violations are logic errors).
  AddRef internal(Var x, AddRef lo, AddRef hi) {
    check(lo);
    check(hi);
    std::uint32_t lvl = order_.rank(x);
    if (level(lo.id) <= lvl || level(hi.id) <= lvl)
      throw std::logic_error("ADD node ordering violation at x" + std::to_string(x));
    return ref(make(lvl, lo.id, hi.id));
  }

  // The 0/1 indicator of a single variable.
  AddRef indicator(Var x) { return internal(x, zero(), one()); }

  // --- inspection ---------------------------------------------------------

  bool is_terminal(AddRef f) const {
    check(f);
    return level(f.id) == kLeafLevel;
  }

  // Value of a constant ADD; anything else means projection is incomplete.
  const Int& value(AddRef f) const {
    check(f);
    if (level(f.id) != kLeafLevel)
      throw std::logic_error("count not fully projected: ADD is not constant");
    return terminal_values_[nodes_[f.id].lo];
  }

  Var top_var(AddRef f) const {
    check(f);
    if (level(f.id) == kLeafLevel) throw std::logic_error("terminal has no decision variable");
    return order_.var_at(level(f.id));
  }

  AddRef lo(AddRef f) const {
    check(f);
    if (level(f.id) == kLeafLevel) throw std::logic_error("terminal has no children");
    return ref(nodes_[f.id].lo);
  }

  AddRef hi(AddRef f) const {
    check(f);
    if (level(f.id) == kLeafLevel) throw std::logic_error("terminal has no children");
    return ref(nodes_[f.id].hi);
  }

  // assignment[v] is indexed by variable id (1-based).
  const Int& evaluate(AddRef f, const std::vector<bool>& assignment) const {
    check(f);
    std::uint32_t id = f.id;
    while (level(id) != kLeafLevel) {
      Var v = order_.var_at(level(id));
      id = assignment.at(v) ? nodes_[id].hi : nodes_[id].lo;
    }
    return terminal_values_[nodes_[id].lo];
  }

  // Decision variables f depends on, ascending by id.
  std::vector<Var> support(AddRef f) const {
    check(f);
    std::set<Var> vars;
    std::unordered_set<std::uint32_t> seen;
    walk(f.id, seen, [&](std::uint32_t id) {
      if (level(id) != kLeafLevel) vars.insert(order_.var_at(level(id)));
    });
    return {vars.begin(), vars.end()};
  }

  std::size_t node_count(AddRef f) const {
    check(f);
    std::unordered_set<std::uint32_t> seen;
    std::size_t n = 0;
    walk(f.id, seen, [&](std::uint32_t) { ++n; });
    return n;
  }

  std::size_t internal_node_count(AddRef f) const {
    check(f);
    std::unordered_set<std::uint32_t> seen;
    std::size_t n = 0;
    walk(f.id, seen, [&](std::uint32_t id) {
      if (level(id) != kLeafLevel) ++n;
    });
    return n;
  }

  std::size_t terminal_count(AddRef f) const {
    check(f);
    std::unordered_set<std::uint32_t> seen;
    std::size_t n = 0;
    walk(f.id, seen, [&](std::uint32_t id) {
      if (level(id) == kLeafLevel) ++n;
    });
    return n;
  }

  // --- operations ---------------------------------------------------------

  // Pointwise op(a, b). All three operators are commutative, so memo keys
  // normalize the operand order.
  AddRef apply(Op op, AddRef a, AddRef b) {
    check(a);
    check(b);
    ++apply_calls_;
    return ref(apply_rec(op, a.id, b.id));
  }

  // Cofactor f[x := value]; returns f unchanged when x is not in its support.
  AddRef restrict_var(AddRef f, Var x, bool value) {
    check(f);
    return ref(restrict_rec(f.id, order_.rank(x), value));
  }

  // f[x:=1] + f[x:=0]. Doubles the function when x is absent.
  AddRef sum_project(AddRef f, Var x) {
    return apply(Op::Add, restrict_var(f, x, true), restrict_var(f, x, false));
  }

  // max(f[x:=1], f[x:=0]); Boolean disjunction on 0/1 ADDs.
  AddRef exists_project(AddRef f, Var x) {
    return apply(Op::Max, restrict_var(f, x, true), restrict_var(f, x, false));
  }

  // --- bookkeeping ---------------------------------------------------------

  std::uint64_t apply_calls() const { return apply_calls_; }
  std::size_t unique_nodes() const { return nodes_.size(); }

  // Results are unaffected; only timing changes.
  void clear_apply_memo() {
    apply_memo_.clear();
    restrict_memo_.clear();
  }

  void to_dot(AddRef f, std::ostream& os, const std::string& name = "add") const {
    check(f);
    os << "digraph " << name << " {\n";
    write_dot_body(f, os);
    os << "}\n";
  }

  // Shared body so callers can compose several roots into one digraph.
  void write_dot_body(AddRef f, std::ostream& os) const {
    check(f);
    std::unordered_set<std::uint32_t> seen;
    walk(f.id, seen, [&](std::uint32_t id) {
      if (level(id) == kLeafLevel) {
        os << "  n" << id << " [shape=box,label=\"" << terminal_values_[nodes_[id].lo].get_str()
           << "\"];\n";
      } else {
        os << "  n" << id << " [shape=circle,label=\"x" << order_.var_at(level(id)) << "\"];\n";
        os << "  n" << id << " -> n" << nodes_[id].lo << " [style=dashed];\n";
        os << "  n" << id << " -> n" << nodes_[id].hi << " [style=solid];\n";
      }
    });
  }

 private:
  static constexpr std::uint32_t kLeafLevel = 0xFFFFFFFF;

  struct Node {
    std::uint32_t level;  // kLeafLevel for terminals
    std::uint32_t lo;     // child id, or terminal value index for leaves
    std::uint32_t hi;
  };

  struct NodeKey {
    std::uint32_t level, lo, hi;
    friend bool operator==(const NodeKey&, const NodeKey&) = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      std::size_t h = k.level;
      h = h * 0x9E3779B97F4A7C15ULL + k.lo;
      h = h * 0x9E3779B97F4A7C15ULL + k.hi;
      return h;
    }
  };

  struct ApplyKey {
    std::uint8_t op;
    std::uint32_t a, b;
    friend bool operator==(const ApplyKey&, const ApplyKey&) = default;
  };
  struct ApplyKeyHash {
    std::size_t operator()(const ApplyKey& k) const {
      std::size_t h = k.op;
      h = h * 0x9E3779B97F4A7C15ULL + k.a;
      h = h * 0x9E3779B97F4A7C15ULL + k.b;
      return h;
    }
  };

  struct RestrictKey {
    std::uint32_t f, rank;
    bool value;
    friend bool operator==(const RestrictKey&, const RestrictKey&) = default;
  };
  struct RestrictKeyHash {
    std::size_t operator()(const RestrictKey& k) const {
      std::size_t h = k.f;
      h = h * 0x9E3779B97F4A7C15ULL + k.rank;
      return h * 2 + (k.value ? 1 : 0);
    }
  };

  static std::uint32_t& next_serial() {
    static std::uint32_t serial = 1;
    return serial;
  }

  AddRef ref(std::uint32_t id) const { return {id, serial_}; }

  void check(AddRef r) const {
    if (r.mgr != serial_ || r.id >= nodes_.size())
      throw std::invalid_argument("AddRef does not belong to this manager");
  }

  std::uint32_t level(std::uint32_t id) const { return nodes_[id].level; }

  bool is_leaf(std::uint32_t id) const { return nodes_[id].level == kLeafLevel; }

  const Int& leaf_value(std::uint32_t id) const { return terminal_values_[nodes_[id].lo]; }

  std::uint32_t make_terminal(const Int& value) {
    auto it = terminal_index_.find(value);
    if (it != terminal_index_.end()) return it->second;
    std::uint32_t value_idx = static_cast<std::uint32_t>(terminal_values_.size());
    terminal_values_.push_back(value);
    std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({kLeafLevel, value_idx, 0});
    terminal_index_.emplace(value, id);
    return id;
  }

  std::uint32_t make(std::uint32_t lvl, std::uint32_t lo_id, std::uint32_t hi_id) {
    if (lo_id == hi_id) return lo_id;  // reduction rule
    NodeKey key{lvl, lo_id, hi_id};
    auto it = unique_.find(key);
    if (it != unique_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({lvl, lo_id, hi_id});
    unique_.emplace(key, id);
    return id;
  }

  static Int apply_op(Op op, const Int& x, const Int& y) {
    switch (op) {
      case Op::Add: return x + y;
      case Op::Mul: return x * y;
      case Op::Max: return x >= y ? x : y;
    }
    throw std::logic_error("unknown operator");
  }

  std::uint32_t apply_rec(Op op, std::uint32_t a, std::uint32_t b) {
    if (is_leaf(a) && is_leaf(b)) return make_terminal(apply_op(op, leaf_value(a), leaf_value(b)));
    // identity shortcuts, sound pointwise for arbitrary carriers
    if (op == Op::Mul) {
      if (is_leaf(a) && leaf_value(a) == 1) return b;
      if (is_leaf(b) && leaf_value(b) == 1) return a;
      if (is_leaf(a) && leaf_value(a) == 0) return a;
      if (is_leaf(b) && leaf_value(b) == 0) return b;
    } else if (op == Op::Add) {
      if (is_leaf(a) && leaf_value(a) == 0) return b;
      if (is_leaf(b) && leaf_value(b) == 0) return a;
    } else if (op == Op::Max) {
      if (a == b) return a;
    }

    ApplyKey key{static_cast<std::uint8_t>(op), a < b ? a : b, a < b ? b : a};
    auto it = apply_memo_.find(key);
    if (it != apply_memo_.end()) return it->second;

    std::uint32_t la = level(a), lb = level(b);
    std::uint32_t top = la < lb ? la : lb;
    std::uint32_t a0 = a, a1 = a, b0 = b, b1 = b;
    if (la == top) {
      a0 = nodes_[a].lo;
      a1 = nodes_[a].hi;
    }
    if (lb == top) {
      b0 = nodes_[b].lo;
      b1 = nodes_[b].hi;
    }
    std::uint32_t r0 = apply_rec(op, a0, b0);
    std::uint32_t r1 = apply_rec(op, a1, b1);
    std::uint32_t res = make(top, r0, r1);
    apply_memo_.emplace(key, res);
    return res;
  }

  std::uint32_t restrict_rec(std::uint32_t f, std::uint32_t rank, bool value) {
    std::uint32_t lvl = level(f);
    if (lvl > rank) return f;  // terminal, or x below every node of f
    if (lvl == rank) return value ? nodes_[f].hi : nodes_[f].lo;

    RestrictKey key{f, rank, value};
    auto it = restrict_memo_.find(key);
    if (it != restrict_memo_.end()) return it->second;
    std::uint32_t r0 = restrict_rec(nodes_[f].lo, rank, value);
    std::uint32_t r1 = restrict_rec(nodes_[f].hi, rank, value);
    std::uint32_t res = make(lvl, r0, r1);
    restrict_memo_.emplace(key, res);
    return res;
  }

  template <typename Fn>
  void walk(std::uint32_t root, std::unordered_set<std::uint32_t>& seen, Fn&& fn) const {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      std::uint32_t id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      fn(id);
      if (!is_leaf(id)) {
        stack.push_back(nodes_[id].lo);
        stack.push_back(nodes_[id].hi);
      }
    }
  }

  VarOrder order_;
  std::uint32_t serial_;
  std::vector<Node> nodes_;
  std::deque<Int> terminal_values_;
  std::map<Int, std::uint32_t> terminal_index_;
  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> unique_;
  std::unordered_map<ApplyKey, std::uint32_t, ApplyKeyHash> apply_memo_;
  std::unordered_map<RestrictKey, std::uint32_t, RestrictKeyHash> restrict_memo_;
  std::uint64_t apply_calls_ = 0;
};

}  // namespace pbmc
