// pbmc - exact pseudo-Boolean model counter with projected and incremental
// modes. See README.md for the input formats.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pbmc/count.hpp"
#include "pbmc/formula.hpp"
#include "pbmc/incremental.hpp"
#include "pbmc/oracle.hpp"
#include "pbmc/order.hpp"
#include "pbmc/script.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInternalError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --project accepts either a file of projection variables or an inline list
// such as "x1 x3".
std::optional<std::string> load_projection(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  if (std::filesystem::exists(spec)) return read_file(spec);
  return spec;
}

int cmd_count(const std::string& path, const std::string& project, const std::string& trace_path,
              bool validate, bool stats, const std::string& dot_path) {
  pbmc::PBFormula formula = pbmc::parse_formula(read_file(path), load_projection(project));
  pbmc::AddManager mgr(pbmc::mcs_order(pbmc::build_gaifman_graph(formula), formula.nvars));

  if (!dot_path.empty()) {
    std::ofstream dot(dot_path);
    if (!dot) throw std::runtime_error("cannot write '" + dot_path + "'");
    dot << "digraph constraints {\n";
    for (const auto& [cid, c] : formula.constraints) {
      pbmc::AddRef add = pbmc::compile_constraint(mgr, c);
      dot << "  // constraint " << cid << ": " << pbmc::render_constraint(c) << "\n";
      dot << "  c" << cid << " [shape=plaintext,label=\"c" << cid << "\"];\n";
      dot << "  c" << cid << " -> n" << add.id << ";\n";
      mgr.write_dot_body(add, dot);
    }
    dot << "}\n";
  }

  pbmc::CountResult result = pbmc::count(mgr, formula);

  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw std::runtime_error("cannot write '" + trace_path + "'");
    out << pbmc::trace_to_json(result.trace) << "\n";
  }
  if (validate) {
    auto violations = pbmc::validate_graded_trace(result.trace, formula);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << "trace violation: " << v << "\n";
      return kExitInternalError;
    }
  }

  std::cout << "s mc " << pbmc::to_string(result.count) << "\n";
  std::cout << pbmc::to_string(result.count) << "\n";
  if (stats) {
    std::cout << "c stats apply_calls=" << result.stats.apply_calls
              << " peak_live_adds=" << result.stats.peak_live_adds
              << " cache_hits=" << result.stats.cache_hits << "\n";
  }
  return kExitOk;
}

int cmd_incr(const std::string& script_path, const std::string& formula_path,
             const std::string& project, bool check) {
  pbmc::ScriptOptions opt;
  opt.check = check;
  if (!formula_path.empty())
    opt.initial = pbmc::parse_formula(read_file(formula_path), load_projection(project));

  if (script_path.empty() || script_path == "-") return pbmc::run_script(std::cin, std::cout, std::cerr, opt);
  std::ifstream in(script_path);
  if (!in) throw std::runtime_error("cannot open '" + script_path + "'");
  return pbmc::run_script(in, std::cout, std::cerr, opt);
}

int cmd_gen(std::uint64_t seed, const pbmc::oracle::GenParams& params, bool session,
            std::uint32_t steps, const std::string& out_path) {
  std::string text = session ? pbmc::oracle::gen_session_script(seed, params, steps)
                             : pbmc::render(pbmc::oracle::gen_instance(seed, params));
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact pseudo-Boolean model counter"};
  app.require_subcommand(1);

  // count
  std::string pb_path, project, trace_path, dot_path;
  bool validate = false, stats = false;
  auto* count = app.add_subcommand("count", "count models of a .pb file");
  count->add_option("file", pb_path, "input .pb file")->required();
  count->add_option("--project", project, "projection set: file or inline list (e.g. \"x1 x3\")");
  count->add_option("--trace", trace_path, "write the computation trace as JSON");
  count->add_flag("--validate-trace", validate, "check the trace gradedness, fail on violations");
  count->add_flag("--stats", stats, "print apply/live-set/cache statistics");
  count->add_option("--dot", dot_path, "write the per-constraint ADDs in DOT format");

  // incr
  std::string script_path, init_formula, incr_project;
  bool check = false;
  auto* incr = app.add_subcommand("incr", "run an incremental session script");
  incr->add_option("script", script_path, "script file ('-' or empty reads stdin)");
  incr->add_option("--formula", init_formula, "seed the session with a .pb file");
  incr->add_option("--project", incr_project, "projection set for --formula");
  incr->add_flag("--check", check, "verify every count against the enumeration oracle");

  // gen
  pbmc::oracle::GenParams params;
  std::uint64_t seed = 1;
  bool session = false;
  std::uint32_t steps = 5;
  std::string out_path;
  auto* gen = app.add_subcommand("gen", "generate a random instance or session script");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--nvars", params.nvars, "number of variables");
  gen->add_option("--nconstraints", params.nconstraints, "number of constraints");
  gen->add_option("--max-coeff", params.max_coeff, "coefficient magnitude bound")
      ->check(CLI::PositiveNumber);
  gen->add_option("--density", params.density, "fraction of variables per constraint")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--x-fraction", params.x_fraction, "fraction of variables in the projection set")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_flag("--session", session, "emit an incremental script instead of a .pb file");
  gen->add_option("--steps", steps, "counting steps in the session script")
      ->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (count->parsed())
      return cmd_count(pb_path, project, trace_path, validate, stats, dot_path);
    if (incr->parsed()) return cmd_incr(script_path, init_formula, incr_project, check);
    if (gen->parsed()) return cmd_gen(seed, params, session, steps, out_path);
  } catch (const pbmc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}
