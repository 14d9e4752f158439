#include <catch2/catch.hpp>

#include "pbmc/oracle.hpp"

#include "helpers.hpp"

using namespace pbmc;

TEST_CASE("brute counting") {
  SECTION("the worked constraint has five models") {
    PBFormula f = parse_formula(
        "* #variable= 3 #constraint= 1\n"
        "+2 x1 +1 x2 +1 x3 >= 2 ;\n");
    CHECK(oracle::brute_count(f) == 5);
  }
  SECTION("no constraints means the full cube") {
    PBFormula f;
    f.nvars = 3;
    f.projection = make_partition(3, std::nullopt);
    CHECK(oracle::brute_count(f) == 8);
  }
  SECTION("contradictions have no models") {
    PBFormula f = parse_formula(
        "* #variable= 1 #constraint= 2\n"
        "+1 x1 >= 1 ;\n"
        "-1 x1 >= 0 ;\n");
    CHECK(oracle::brute_count(f) == 0);
    CHECK_FALSE(oracle::brute_satisfiable(f));
  }
}

TEST_CASE("brute projected counting") {
  PBFormula f = parse_formula(
      "* #variable= 3 #constraint= 1\n"
      "+2 x1 +1 x2 +1 x3 >= 2 ;\n");

  SECTION("projecting onto the top variable") {
    CHECK(oracle::brute_projected_count(f, {1}, {2, 3}) == 2);
  }
  SECTION("empty Y collapses to the plain count") {
    CHECK(oracle::brute_projected_count(f, {1, 2, 3}, {}) == oracle::brute_count(f));
  }
  SECTION("empty X answers satisfiability") {
    CHECK(oracle::brute_projected_count(f, {}, {1, 2, 3}) == 1);
  }
}

TEST_CASE("enumeration guard") {
  PBFormula f;
  f.nvars = 25;
  CHECK_THROWS_AS(oracle::brute_count(f), std::invalid_argument);
  std::set<Var> xset, yset;
  for (Var v = 1; v <= 25; ++v) (v % 2 ? xset : yset).insert(v);
  CHECK_THROWS_AS(oracle::brute_projected_count(f, xset, yset), std::invalid_argument);
}

TEST_CASE("instance generation") {
  oracle::GenParams p;
  p.nvars = 10;
  p.nconstraints = 5;

  SECTION("deterministic per seed") {
    PBFormula a = oracle::gen_instance(1, p);
    PBFormula b = oracle::gen_instance(1, p);
    CHECK(a == b);
    CHECK_FALSE(oracle::gen_instance(2, p) == a);
  }
  SECTION("full density mentions every variable") {
    p.density = 1.0;
    PBFormula f = oracle::gen_instance(3, p);
    for (const auto& [cid, c] : f.constraints) REQUIRE(c.terms.size() == p.nvars);
  }
  SECTION("x_fraction one leaves Y empty") {
    p.x_fraction = 1.0;
    CHECK(oracle::gen_instance(4, p).projection.yset.empty());
  }
  SECTION("every constraint is nonempty") {
    testutil::Rng rng(5);
    for (int round = 0; round < 30; ++round) {
      p.density = rng.below(101) / 100.0;
      PBFormula f = oracle::gen_instance(rng.next(), p);
      for (const auto& [cid, c] : f.constraints) REQUIRE_FALSE(c.terms.empty());
    }
  }
}

TEST_CASE("session script generation") {
  oracle::GenParams p;
  p.nvars = 6;
  p.nconstraints = 3;

  auto count_lines = [](const std::string& text, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
      ++n;
      pos += needle.size();
    }
    return n;
  };

  SECTION("five counting steps") {
    std::string script = oracle::gen_session_script(1, p, 5);
    CHECK(count_lines(script, "count\n") == 5);
  }
  SECTION("three counting steps") {
    std::string script = oracle::gen_session_script(1, p, 3);
    CHECK(count_lines(script, "count\n") == 3);
  }
  SECTION("deterministic per seed") {
    CHECK(oracle::gen_session_script(9, p, 5) == oracle::gen_session_script(9, p, 5));
  }
}
