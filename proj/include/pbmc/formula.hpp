#pragma once

// Pseudo-Boolean formula model: constraints, normalization, the .pb text
// format, and the occurrence structures consumed by ordering heuristics.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbmc/types.hpp"

namespace pbmc {

enum class Comparator { Ge, Eq, Le };

// Normalized term: positive literal, nonzero coefficient.
struct Term {
  std::int64_t coeff = 0;
  Var var = 0;
  friend bool operator==(const Term&, const Term&) = default;
};

// A term as written in the input, before polarity rewriting.
struct RawTerm {
  std::int64_t coeff = 0;
  Var var = 0;
  bool negated = false;  // literal was ~xN
};

struct RawConstraint {
  std::vector<RawTerm> terms;
  Comparator cmp = Comparator::Ge;
  std::int64_t bound = 0;
};

enum class ConstraintFlag { None, AlwaysTrue, AlwaysFalse };

// Invariants: terms sorted by var, one term per var, nonzero coefficients,
// positive literals only, cmp is Ge or Eq.
struct PBConstraint {
  Cid cid = 0;
  std::vector<Term> terms;
  Comparator cmp = Comparator::Ge;
  std::int64_t bound = 0;
  ConstraintFlag flag = ConstraintFlag::None;
  friend bool operator==(const PBConstraint&, const PBConstraint&) = default;
};

// xset is the projection set X, yset its complement in {1..nvars}.
struct VarPartition {
  std::set<Var> xset;
  std::set<Var> yset;
  friend bool operator==(const VarPartition&, const VarPartition&) = default;
};

struct PBFormula {
  std::uint32_t nvars = 0;
  std::map<Cid, PBConstraint> constraints;
  VarPartition projection;
  friend bool operator==(const PBFormula&, const PBFormula&) = default;
};

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

inline VarPartition make_partition(std::uint32_t nvars,
                                   const std::optional<std::set<Var>>& xvars) {
  VarPartition p;
  if (!xvars) {
    for (Var v = 1; v <= nvars; ++v) p.xset.insert(v);
    return p;
  }
  p.xset = *xvars;
  for (Var v = 1; v <= nvars; ++v)
    if (!p.xset.count(v)) p.yset.insert(v);
  return p;
}

// ---------------------------------------------------------------------------
// Normalization

// Rewrites negated literals (a*~x == a - a*x), flips <= to >=, merges
// duplicate variables, drops zero coefficients, and flags constraints that
// hold (or fail) under every assignment.
inline PBConstraint normalize(const RawConstraint& raw) {
  PBConstraint c;
  c.cmp = raw.cmp;
  c.bound = raw.bound;

  std::map<Var, std::int64_t> merged;
  for (const RawTerm& t : raw.terms) {
    if (t.negated) {
      merged[t.var] -= t.coeff;
      c.bound -= t.coeff;
    } else {
      merged[t.var] += t.coeff;
    }
  }
  if (c.cmp == Comparator::Le) {
    for (auto& [v, a] : merged) a = -a;
    c.bound = -c.bound;
    c.cmp = Comparator::Ge;
  }
  for (const auto& [v, a] : merged)
    if (a != 0) c.terms.push_back({a, v});

  std::int64_t min_sum = 0, max_sum = 0;
  for (const Term& t : c.terms) {
    if (t.coeff < 0)
      min_sum += t.coeff;
    else
      max_sum += t.coeff;
  }
  if (c.cmp == Comparator::Ge) {
    if (c.bound <= min_sum)
      c.flag = ConstraintFlag::AlwaysTrue;
    else if (c.bound > max_sum)
      c.flag = ConstraintFlag::AlwaysFalse;
  } else {  // Eq
    if (c.bound < min_sum || c.bound > max_sum)
      c.flag = ConstraintFlag::AlwaysFalse;
    else if (c.terms.empty())
      c.flag = ConstraintFlag::AlwaysTrue;  // 0 = 0
  }
  return c;
}

// ---------------------------------------------------------------------------
// Evaluation (assignment[v] indexed by variable id, 1-based)

inline bool satisfies(const PBConstraint& c, const std::vector<bool>& tau) {
  std::int64_t sum = 0;
  for (const Term& t : c.terms)
    if (tau[t.var]) sum += t.coeff;
  return c.cmp == Comparator::Ge ? sum >= c.bound : sum == c.bound;
}

inline bool satisfies_raw(const RawConstraint& c, const std::vector<bool>& tau) {
  std::int64_t sum = 0;
  for (const RawTerm& t : c.terms) {
    bool lit = t.negated ? !tau[t.var] : tau[t.var];
    if (lit) sum += t.coeff;
  }
  switch (c.cmp) {
    case Comparator::Ge: return sum >= c.bound;
    case Comparator::Eq: return sum == c.bound;
    case Comparator::Le: return sum <= c.bound;
  }
  return false;
}

inline bool satisfies_all(const PBFormula& f, const std::vector<bool>& tau) {
  for (const auto& [cid, c] : f.constraints)
    if (!satisfies(c, tau)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Occurrence structures

struct OccurrenceGraph {
  std::map<Var, std::set<Cid>> var_to_cons;  // every var 1..nvars has an entry
  std::map<Cid, std::set<Var>> cons_to_vars;

  std::size_t degree(Var v) const {
    auto it = var_to_cons.find(v);
    return it == var_to_cons.end() ? 0 : it->second.size();
  }
};

inline OccurrenceGraph build_occurrence_graph(const PBFormula& f) {
  OccurrenceGraph g;
  for (Var v = 1; v <= f.nvars; ++v) g.var_to_cons[v];
  for (const auto& [cid, c] : f.constraints) {
    g.cons_to_vars[cid];
    for (const Term& t : c.terms) {
      g.var_to_cons[t.var].insert(cid);
      g.cons_to_vars[cid].insert(t.var);
    }
  }
  return g;
}

// Edge weight = number of constraints in which both endpoints appear.
struct GaifmanGraph {
  std::map<Var, std::map<Var, int>> adj;  // symmetric, no self-loops

  int weight(Var u, Var v) const {
    auto it = adj.find(u);
    if (it == adj.end()) return 0;
    auto jt = it->second.find(v);
    return jt == it->second.end() ? 0 : jt->second;
  }
};

inline GaifmanGraph build_gaifman_graph(const PBFormula& f) {
  GaifmanGraph g;
  for (Var v = 1; v <= f.nvars; ++v) g.adj[v];
  for (const auto& [cid, c] : f.constraints) {
    for (std::size_t i = 0; i < c.terms.size(); ++i)
      for (std::size_t j = i + 1; j < c.terms.size(); ++j) {
        Var u = c.terms[i].var, v = c.terms[j].var;
        g.adj[u][v] += 1;
        g.adj[v][u] += 1;
      }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Text format
//
//   * #variable= 3 #constraint= 1
//   * proj: x1 x3
//   +2 x1 +1 x2 +1 x3 >= 2 ;
//
// One constraint per line, '*' starts a comment line. The header comment is
// required; a 'proj:' comment selects the projection set X (default: all).

namespace detail {

struct Token {
  std::string_view text;
  int col = 0;  // 1-based
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline std::int64_t parse_int(const Token& tok, int line_no) {
  std::int64_t value = 0;
  std::string_view s = tok.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line_no, tok.col, "expected integer, got '" + std::string(tok.text) + "'");
  return value;
}

inline Var parse_var_token(std::string_view s, int line_no, int col, std::uint32_t nvars) {
  if (s.empty() || s.front() != 'x')
    throw ParseError(line_no, col, "expected variable 'xN', got '" + std::string(s) + "'");
  s.remove_prefix(1);
  std::uint32_t idx = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line_no, col, "malformed variable index");
  if (idx == 0) throw ParseError(line_no, col, "variable index 0 is invalid");
  if (idx > nvars)
    throw ParseError(line_no, col,
                     "variable x" + std::to_string(idx) + " exceeds declared #variable= " +
                         std::to_string(nvars));
  return idx;
}

}  // namespace detail

// Parses one "<terms> <cmp> <bound> ;" constraint body.
inline RawConstraint parse_constraint_text(std::string_view text, std::uint32_t nvars,
                                           int line_no = 1) {
  auto toks = detail::tokenize(text);
  if (toks.empty()) throw ParseError(line_no, 1, "empty constraint");

  RawConstraint raw;
  std::size_t i = 0;
  bool saw_cmp = false;
  while (i < toks.size()) {
    std::string_view t = toks[i].text;
    if (t == ">=" || t == "<=" || t == "=") {
      raw.cmp = t == ">=" ? Comparator::Ge : (t == "<=" ? Comparator::Le : Comparator::Eq);
      saw_cmp = true;
      ++i;
      break;
    }
    std::int64_t coeff = detail::parse_int(toks[i], line_no);
    ++i;
    if (i >= toks.size())
      throw ParseError(line_no, toks[i - 1].col, "coefficient without variable");
    RawTerm term;
    term.coeff = coeff;
    std::string_view vtok = toks[i].text;
    if (!vtok.empty() && vtok.front() == '~') {
      term.negated = true;
      vtok.remove_prefix(1);
    }
    term.var = detail::parse_var_token(vtok, line_no, toks[i].col, nvars);
    raw.terms.push_back(term);
    ++i;
  }
  if (!saw_cmp) throw ParseError(line_no, 1, "missing comparator");
  if (raw.terms.empty()) throw ParseError(line_no, 1, "constraint has no terms");
  if (i >= toks.size()) throw ParseError(line_no, 1, "missing bound");

  detail::Token bound_tok = toks[i];
  bool terminated = false;
  if (bound_tok.text.size() > 1 && bound_tok.text.back() == ';') {
    bound_tok.text.remove_suffix(1);
    terminated = true;
  }
  raw.bound = detail::parse_int(bound_tok, line_no);
  ++i;
  if (!terminated) {
    if (i >= toks.size() || toks[i].text != ";")
      throw ParseError(line_no, bound_tok.col, "constraint must end with ';'");
    ++i;
  }
  if (i < toks.size())
    throw ParseError(line_no, toks[i].col, "trailing tokens after ';'");
  return raw;
}

// Parses a whitespace-separated projection variable list ("x1 x3" or "1 3").
inline std::set<Var> parse_var_list(std::string_view text, std::uint32_t nvars,
                                    int line_no = 1) {
  std::set<Var> out;
  for (const auto& tok : detail::tokenize(text)) {
    if (!tok.text.empty() && tok.text.front() == '*') break;  // trailing comment
    std::string_view s = tok.text;
    if (!s.empty() && s.front() == 'x') {
      out.insert(detail::parse_var_token(s, line_no, tok.col, nvars));
    } else {
      std::int64_t v = detail::parse_int(tok, line_no);
      if (v < 1 || v > static_cast<std::int64_t>(nvars))
        throw ParseError(line_no, tok.col, "projection variable out of range");
      out.insert(static_cast<Var>(v));
    }
  }
  return out;
}

namespace detail {

// Recognizes "* #variable= N #constraint= M"; returns false if the comment is
// not a header line at all.
inline bool parse_header(std::string_view line, int line_no, std::uint32_t& nvars,
                         std::uint64_t& ncons) {
  auto pos = line.find("#variable=");
  if (pos == std::string_view::npos) return false;
  auto toks = tokenize(line.substr(pos));
  // toks[0] == "#variable=", toks[1] == N, toks[2] == "#constraint=", toks[3] == M
  if (toks.size() < 4 || toks[0].text != "#variable=" || toks[2].text != "#constraint=")
    throw ParseError(line_no, static_cast<int>(pos) + 1, "malformed header comment");
  std::int64_t n = parse_int(toks[1], line_no);
  std::int64_t m = parse_int(toks[3], line_no);
  if (n < 0 || m < 0) throw ParseError(line_no, toks[1].col, "negative header count");
  nvars = static_cast<std::uint32_t>(n);
  ncons = static_cast<std::uint64_t>(m);
  return true;
}

}  // namespace detail

// Parses the .pb format. `projection_spec`, when given, is the content of a
// separate projection file; it conflicts with an in-file 'proj:' comment.
inline PBFormula parse_formula(std::string_view text,
                               const std::optional<std::string>& projection_spec = std::nullopt) {
  std::uint32_t nvars = 0;
  std::uint64_t declared_cons = 0;
  bool header_seen = false;
  std::optional<std::set<Var>> proj;
  std::vector<RawConstraint> raws;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (line[first] == '*') {
      std::string_view body = line.substr(first + 1);
      if (!header_seen && detail::parse_header(body, line_no, nvars, declared_cons)) {
        header_seen = true;
        continue;
      }
      auto p = body.find_first_not_of(" \t");
      if (p != std::string_view::npos && body.substr(p).starts_with("proj:")) {
        if (proj) throw ParseError(line_no, static_cast<int>(first) + 1,
                                   "duplicate projection declaration");
        if (!header_seen)
          throw ParseError(line_no, static_cast<int>(first) + 1,
                           "projection declared before header");
        proj = parse_var_list(body.substr(p + 5), nvars, line_no);
      }
      continue;
    }
    if (!header_seen)
      throw ParseError(line_no, static_cast<int>(first) + 1,
                       "missing '* #variable= N #constraint= M' header");
    raws.push_back(parse_constraint_text(line, nvars, line_no));
  }

  if (!header_seen) throw ParseError(line_no, 1, "missing header comment");
  if (raws.empty()) throw ParseError(line_no, 1, "empty constraint list");
  if (projection_spec) {
    if (proj) throw ParseError(1, 1, "duplicate projection declaration (file and spec)");
    proj = parse_var_list(*projection_spec, nvars);
  }

  PBFormula f;
  f.nvars = nvars;
  Cid next = 1;
  for (const RawConstraint& raw : raws) {
    PBConstraint c = normalize(raw);
    c.cid = next++;
    f.constraints.emplace(c.cid, std::move(c));
  }
  f.projection = make_partition(nvars, proj);
  return f;
}

inline std::string render_constraint(const PBConstraint& c) {
  std::ostringstream os;
  for (const Term& t : c.terms) {
    os << (t.coeff >= 0 ? "+" : "") << t.coeff << " x" << t.var << " ";
  }
  os << (c.cmp == Comparator::Ge ? ">=" : "=") << " " << c.bound << " ;";
  return os.str();
}

// Canonical text form; parse(render(f)) == f whenever f's cids are 1..M.
inline std::string render(const PBFormula& f) {
  std::ostringstream os;
  os << "* #variable= " << f.nvars << " #constraint= " << f.constraints.size() << "\n";
  if (!f.projection.yset.empty()) {
    os << "* proj:";
    for (Var v : f.projection.xset) os << " x" << v;
    os << "\n";
  }
  for (const auto& [cid, c] : f.constraints) os << render_constraint(c) << "\n";
  return os.str();
}

}  // namespace pbmc
