#include <catch2/catch.hpp>

#include "pbmc/compile.hpp"
#include "pbmc/formula.hpp"

#include "helpers.hpp"

using namespace pbmc;
using testutil::assignment_of;

TEST_CASE("the threshold constraint compiles to the figure's shape") {
  AddManager m(3);
  PBConstraint c = testutil::make_ge({{2, 1}, {1, 2}, {1, 3}}, 2);
  AddRef f = compile_constraint(m, c);
  CHECK(f == testutil::threshold_diagram(m));
  CHECK(m.internal_node_count(f) == 3);
  CHECK(m.terminal_count(f) == 2);
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    auto tau = assignment_of(3, bits);
    CHECK(m.evaluate(f, tau) == (satisfies(c, tau) ? 1 : 0));
  }
}

TEST_CASE("trivially satisfied constraints compile to the one terminal") {
  AddManager m(2);
  AddRef f = compile_constraint(m, testutil::make_ge({{1, 1}, {1, 2}}, 0));
  CHECK(f == m.one());
}

TEST_CASE("equalities compile directly") {
  AddManager m(2);
  PBConstraint c = testutil::make_eq({{1, 1}, {1, 2}}, 1);
  AddRef f = compile_constraint(m, c);
  // models are exactly 10 and 01
  CHECK(m.evaluate(f, assignment_of(2, 0b01)) == 1);
  CHECK(m.evaluate(f, assignment_of(2, 0b10)) == 1);
  CHECK(m.evaluate(f, assignment_of(2, 0b00)) == 0);
  CHECK(m.evaluate(f, assignment_of(2, 0b11)) == 0);
  CHECK(m.sum_project(m.sum_project(f, 1), 2) == m.terminal(2));
}

TEST_CASE("infeasible constraints compile to the zero terminal") {
  AddManager m(2);
  CHECK(compile_constraint(m, testutil::make_ge({{1, 1}, {1, 2}}, 3)) == m.zero());
  // bound inside the coefficient range but not a subset sum
  CHECK(compile_constraint(m, testutil::make_eq({{2, 1}, {2, 2}}, 3)) == m.zero());
}

TEST_CASE("compiled constraints count like brute force") {
  testutil::Rng rng(91);
  oracle::GenParams p;
  p.nvars = 10;
  p.max_coeff = 7;
  for (int round = 0; round < 150; ++round) {
    p.density = 0.1 + 0.8 * (rng.below(100) / 100.0);
    RawConstraint raw = oracle::detail::gen_constraint(rng, p);
    PBConstraint c = normalize(raw);
    AddManager m(p.nvars);
    AddRef f = compile_constraint(m, c);

    // brute count over the variables the constraint mentions
    std::vector<Var> vars;
    for (const Term& t : c.terms) vars.push_back(t.var);
    std::uint64_t expected = 0;
    std::vector<bool> tau(p.nvars + 1, false);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars.size()); ++bits) {
      for (std::size_t i = 0; i < vars.size(); ++i) tau[vars[i]] = (bits >> i) & 1;
      if (satisfies(c, tau)) ++expected;
    }

    AddRef total = f;
    for (Var v : vars) total = m.sum_project(total, v);
    REQUIRE(m.value(total) == Int(static_cast<unsigned long>(expected)));
  }
}

TEST_CASE("residual clamping does not change the diagram") {
  testutil::Rng rng(92);
  oracle::GenParams p;
  p.nvars = 8;
  p.max_coeff = 7;
  p.density = 0.7;
  for (int round = 0; round < 150; ++round) {
    PBConstraint c = normalize(oracle::detail::gen_constraint(rng, p));
    AddManager m(p.nvars);
    REQUIRE(compile_constraint(m, c, true) == compile_constraint(m, c, false));
  }
}

TEST_CASE("compiled support stays within the constraint") {
  testutil::Rng rng(93);
  oracle::GenParams p;
  p.nvars = 9;
  p.max_coeff = 5;
  p.density = 0.5;
  for (int round = 0; round < 100; ++round) {
    PBConstraint c = normalize(oracle::detail::gen_constraint(rng, p));
    AddManager m(p.nvars);
    std::set<Var> mentioned;
    for (const Term& t : c.terms) mentioned.insert(t.var);
    for (Var v : m.support(compile_constraint(m, c))) REQUIRE(mentioned.count(v) == 1);
  }
}
