#include <catch2/catch.hpp>

#include <sstream>

#include "pbmc/oracle.hpp"
#include "pbmc/script.hpp"

#include "helpers.hpp"

using namespace pbmc;

namespace {

struct RunOutcome {
  int exit_code;
  std::vector<std::string> lines;
  std::string errors;
};

RunOutcome run(const std::string& script, const ScriptOptions& opt = {}) {
  std::istringstream in(script);
  std::ostringstream out, err;
  int rc = run_script(in, out, err, opt);
  RunOutcome outcome{rc, {}, err.str()};
  std::string line;
  std::istringstream lines(out.str());
  while (std::getline(lines, line)) outcome.lines.push_back(line);
  return outcome;
}

}  // namespace

TEST_CASE("a session script streams one response per command") {
  RunOutcome r = run(
      "* #variable= 3 #constraint= 0\n"
      "add +2 x1 +1 x2 +1 x3 >= 2 ;\n"
      "count\n"
      "add +1 x2 +1 x3 >= 2 ;\n"
      "count\n");
  REQUIRE(r.exit_code == 0);
  // the second count keeps only assignments with x2 = x3 = 1
  REQUIRE(r.lines == std::vector<std::string>{"cid=1", "5", "cid=2", "2"});
}

TEST_CASE("counting an empty session yields the full cube") {
  RunOutcome r = run(
      "* #variable= 2 #constraint= 0\n"
      "count\n");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.lines == std::vector<std::string>{"4"});
}

TEST_CASE("scripts honor projection headers") {
  RunOutcome r = run(
      "* #variable= 3 #constraint= 0\n"
      "* proj: x1\n"
      "add +2 x1 +1 x2 +1 x3 >= 2 ;\n"
      "count\n");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.lines == std::vector<std::string>{"cid=1", "2"});
}

TEST_CASE("script errors abort with a nonzero exit") {
  SECTION("removing an unknown id") {
    RunOutcome r = run(
        "* #variable= 2 #constraint= 0\n"
        "remove 99\n");
    CHECK(r.exit_code != 0);
    CHECK(r.errors.find("99") != std::string::npos);
  }
  SECTION("missing header") {
    RunOutcome r = run("count\n");
    CHECK(r.exit_code == 1);
    CHECK(r.errors.find("#variable") != std::string::npos);
  }
  SECTION("malformed constraint") {
    RunOutcome r = run(
        "* #variable= 2 #constraint= 0\n"
        "add +1 x9 >= 1 ;\n");
    CHECK(r.exit_code == 1);
  }
  SECTION("unknown command") {
    RunOutcome r = run(
        "* #variable= 2 #constraint= 0\n"
        "frobnicate\n");
    CHECK(r.exit_code == 1);
  }
  SECTION("duplicate projection") {
    RunOutcome r = run(
        "* #variable= 2 #constraint= 0\n"
        "* proj: x1\n"
        "* proj: x2\n"
        "count\n");
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("an initial formula seeds the session") {
  ScriptOptions opt;
  opt.initial = parse_formula(
      "* #variable= 3 #constraint= 1\n"
      "+2 x1 +1 x2 +1 x3 >= 2 ;\n");
  RunOutcome r = run("count\nremove 1\ncount\n", opt);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.lines == std::vector<std::string>{"5", "8"});
}

TEST_CASE("generated scripts run clean under oracle checking") {
  testutil::Rng rng(1001);
  for (int round = 0; round < 15; ++round) {
    oracle::GenParams p;
    p.nvars = 2 + static_cast<std::uint32_t>(rng.below(7));
    p.nconstraints = 1 + static_cast<std::uint32_t>(rng.below(4));
    p.max_coeff = 1 + rng.below(4);
    p.density = 0.3 + 0.5 * (rng.below(100) / 100.0);
    p.x_fraction = rng.below(101) / 100.0;
    std::string script = oracle::gen_session_script(rng.next(), p, 5);
    ScriptOptions opt;
    opt.check = true;
    RunOutcome r = run(script, opt);
    CAPTURE(script, r.errors);
    REQUIRE(r.exit_code == 0);
  }
}
