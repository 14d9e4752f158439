#pragma once

// Incremental session scripts, one command per line:
//
//   add <constraint text>     -> prints  cid=<n>
//   remove <cid>
//   count                     -> prints the exact decimal count
//
// '*' lines are comments; a '* #variable= N ...' header (and an optional
// '* proj: ...' line) before the first command sets up the session unless an
// initial formula was supplied.

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "pbmc/formula.hpp"
#include "pbmc/incremental.hpp"
#include "pbmc/oracle.hpp"

namespace pbmc {

struct ScriptOptions {
  std::optional<PBFormula> initial;  // seeds nvars, partition, constraints
  bool check = false;                // verify every count against the oracle
};

// Returns 0 on success, 1 on input errors, 2 on a --check mismatch or an
// internal invariant violation. Output is streamed one line per response.
inline int run_script(std::istream& in, std::ostream& out, std::ostream& err,
                      const ScriptOptions& opt = {}) {
  std::optional<Session> session;
  std::optional<std::uint32_t> nvars;
  std::optional<std::set<Var>> proj;

  if (opt.initial) session.emplace(*opt.initial);

  auto materialize = [&](int line_no) -> Session& {
    if (!session) {
      if (!nvars) throw ParseError(line_no, 1, "missing '* #variable= N' header");
      session.emplace(*nvars, make_partition(*nvars, proj));
    }
    return *session;
  };

  std::string line;
  int line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view sv(line);
      auto first = sv.find_first_not_of(" \t\r");
      if (first == std::string_view::npos) continue;
      sv.remove_suffix(sv.size() - sv.find_last_not_of(" \t\r") - 1);

      if (sv[first] == '*') {
        if (session) continue;  // plain comment once the session exists
        std::string_view body = sv.substr(first + 1);
        std::uint32_t n = 0;
        std::uint64_t m = 0;
        if (!nvars && detail::parse_header(body, line_no, n, m)) {
          nvars = n;
          continue;
        }
        auto p = body.find_first_not_of(" \t");
        if (p != std::string_view::npos && body.substr(p).starts_with("proj:")) {
          if (proj) throw ParseError(line_no, static_cast<int>(first) + 1,
                                     "duplicate projection declaration");
          if (!nvars) throw ParseError(line_no, static_cast<int>(first) + 1,
                                       "projection declared before header");
          proj = parse_var_list(body.substr(p + 5), *nvars, line_no);
        }
        continue;
      }

      sv.remove_prefix(first);
      if (sv == "count") {
        Session& s = materialize(line_no);
        if (opt.check && s.nvars() > oracle::kEnumerationGuard) {
          err << "error: line " << line_no << ": --check needs at most "
              << oracle::kEnumerationGuard << " variables\n";
          return 1;
        }
        CountResult r = s.count();
        out << to_string(r.count) << "\n";
        if (opt.check) {
          std::uint64_t expected = oracle::brute_projected_count(s.formula());
          if (r.count != Int(static_cast<unsigned long>(expected))) {
            err << "error: line " << line_no << ": count mismatch, oracle says " << expected
                << "\n";
            return 2;
          }
        }
      } else if (sv.starts_with("add ") || sv == "add") {
        Session& s = materialize(line_no);
        if (sv.size() <= 4) throw ParseError(line_no, 1, "add needs a constraint");
        RawConstraint raw = parse_constraint_text(sv.substr(4), s.nvars(), line_no);
        Cid cid = s.add_constraint(raw);
        out << "cid=" << cid << "\n";
      } else if (sv.starts_with("remove ") || sv == "remove") {
        if (sv.size() <= 7) throw ParseError(line_no, 1, "remove needs a constraint id");
        Session& s = materialize(line_no);
        std::uint64_t cid = 0;
        std::istringstream num(std::string(sv.substr(7)));
        if (!(num >> cid) || !(num >> std::ws).eof())
          throw ParseError(line_no, 8, "malformed constraint id");
        s.remove_constraint(cid);
      } else {
        throw ParseError(line_no, static_cast<int>(first) + 1,
                         "unknown command '" + std::string(sv.substr(0, sv.find(' '))) + "'");
      }
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: line " << line_no << ": " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: line " << line_no << ": " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace pbmc
