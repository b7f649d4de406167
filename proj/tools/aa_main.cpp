#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aa/checks.hpp"
#include "aa/devirt.hpp"
#include "aa/generator.hpp"
#include "aa/oracle.hpp"
#include "aa/report.hpp"
#include "aa/solver.hpp"

namespace {

using namespace aa;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitViolation = 3;

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(ParseCode::SyntaxError, 0, 0, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonOpts {
  std::string input;
  std::string variant = "id";
  std::string abstraction = "tba";
  bool objectStore = false;
  bool usedPointerStore = false;
  bool disableAddrSpeculation = false;
  std::string format = "text";
  double budgetFactor = 1.0;

  void attach(CLI::App* cmd, bool needsInput = true) {
    if (needsInput)
      cmd->add_option("input", input, "IR source file")->required();
    else
      cmd->add_option("input", input, "IR source file");
    cmd->add_option("--variant", variant, "id|cd|ex|jd")
        ->check(CLI::IsMember({"id", "cd", "ex", "jd"}));
    cmd->add_option("--abstraction", abstraction, "tba|asb")
        ->check(CLI::IsMember({"tba", "asb"}));
    cmd->add_flag("--object-store", objectStore,
                  "enable the object store refinement (tba)");
    cmd->add_flag("--used-pointer-store", usedPointerStore,
                  "only seek pointers used in indirect stores");
    cmd->add_flag("--disable-addr-speculation", disableAddrSpeculation)
        ->group("");  // hidden: deliberately breaks the improved speculation
    cmd->add_option("--format", format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--budget-factor", budgetFactor,
                    "scale the iteration budget")
        ->group("");
  }

  VariantConfig config() const {
    VariantConfig c;
    if (variant == "id") c.variant = Variant::Id;
    if (variant == "cd") c.variant = Variant::Cd;
    if (variant == "ex") c.variant = Variant::Ex;
    if (variant == "jd") c.variant = Variant::Jd;
    c.abstraction = abstraction == "tba" ? Abstraction::Tba : Abstraction::Asb;
    c.useObjectStore = objectStore;
    c.useUsedPointerStore = usedPointerStore;
    c.disableAddrSpeculation = disableAddrSpeculation;
    return c;
  }
};

int analysisExitCode(const AnalysisError& e) {
  // validation problems are input errors; budget and resolution failures are
  // analysis errors
  return e.code == AnalysisCode::UnsupportedExpr ? kExitParse : kExitAnalysis;
}

int cmdAnalyze(const CommonOpts& o) {
  ProgramIR p = parse_program(readFile(o.input));
  SolveOptions so;
  so.budgetFactor = o.budgetFactor;
  SolveResult r = solve(p, o.config(), so);
  DevirtReport rep = devirtualize(r, p, o.input);
  if (o.format == "json")
    std::cout << render_states_json(p, r, rep) << "\n";
  else
    std::cout << render_states_text(p, r) << rep.toText();
  return kExitOk;
}

int cmdTrace(const CommonOpts& o) {
  ProgramIR p = parse_program(readFile(o.input));
  VariantConfig cfg = o.config();
  if (cfg.variant == Variant::Ex) {
    std::cerr << "trace requires a demand-driven variant (id, cd, jd)\n";
    return kExitParse;
  }
  SolveOptions so;
  so.trace = true;
  so.budgetFactor = o.budgetFactor;
  SolveResult r = solve(p, cfg, so);
  std::cout << render_trace(p, r);
  return kExitOk;
}

int cmdDevirt(const CommonOpts& o) {
  ProgramIR p = parse_program(readFile(o.input));
  SolveOptions so;
  so.budgetFactor = o.budgetFactor;
  auto t0 = std::chrono::steady_clock::now();
  SolveResult r = solve(p, o.config(), so);
  auto t1 = std::chrono::steady_clock::now();
  DevirtReport rep = devirtualize(r, p, o.input);
  rep.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (o.format == "json")
    std::cout << rep.toJson() << "\n";
  else
    std::cout << rep.toText();
  return kExitOk;
}

int cmdVerify(const CommonOpts& o, int randomCount, uint64_t seed,
              size_t maxPathLen, const std::string& shape) {
  Abstraction abs =
      o.abstraction == "tba" ? Abstraction::Tba : Abstraction::Asb;
  PathLimits limits;
  limits.maxLen = maxPathLen;
  OracleReport all;
  auto runOne = [&](const ProgramIR& p, const std::string& tag) {
    OracleReport r = verify_program(p, abs, limits, o.disableAddrSpeculation);
    for (auto& v : r.violations) {
      v.witness = tag + " " + v.witness;
      all.violations.push_back(std::move(v));
    }
  };

  if (!o.input.empty()) {
    runOne(parse_program(readFile(o.input)), o.input);
  }
  if (randomCount > 0) {
    GenParams params;
    params.statements = 12;
    params.classes = 3;
    params.vcalls = 1;
    params.shape =
        shape == "straightline" ? GenShape::StraightLine : GenShape::Acyclic;
    for (int i = 0; i < randomCount; ++i) {
      uint64_t s = seed + static_cast<uint64_t>(i);
      ProgramIR p =
          params.shape == GenShape::StraightLine
              ? generate_runnable(params, s)
              : parse_program(generate_program(params, s));
      runOne(p, "seed=" + std::to_string(s));
    }
  }
  std::cout << all.toJson() << "\n";
  if (!all.pass()) {
    std::cerr << all.violations.size() << " violation(s)\n";
    return kExitViolation;
  }
  std::cerr << "all checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "demand-driven alias analysis over a small object-oriented IR"};
  app.require_subcommand(1);

  CommonOpts analyzeOpts, traceOpts, devirtOpts, verifyOpts;
  int randomCount = 0;
  uint64_t seed = 1;
  size_t maxPathLen = 64;
  std::string shape = "acyclic";

  CLI::App* analyze =
      app.add_subcommand("analyze", "solve and print per-node states");
  analyzeOpts.attach(analyze);
  CLI::App* trace = app.add_subcommand(
      "trace", "round-by-round demand and points-to table");
  traceOpts.attach(trace);
  CLI::App* devirt =
      app.add_subcommand("devirt", "virtual-call resolution report");
  devirtOpts.attach(devirt);
  CLI::App* verify = app.add_subcommand(
      "verify", "path, concrete-execution, and precision checks");
  verifyOpts.attach(verify, /*needsInput=*/false);
  verify->add_option("--random", randomCount,
                     "also verify N generated programs");
  verify->add_option("--seed", seed, "seed for generated programs");
  verify->add_option("--max-path-len", maxPathLen,
                     "path enumeration length bound");
  verify->add_option("--shape", shape, "straightline|acyclic")
      ->check(CLI::IsMember({"straightline", "acyclic"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmdAnalyze(analyzeOpts);
    if (trace->parsed()) return cmdTrace(traceOpts);
    if (devirt->parsed()) return cmdDevirt(devirtOpts);
    if (verify->parsed())
      return cmdVerify(verifyOpts, randomCount, seed, maxPathLen, shape);
  } catch (const aa::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const aa::AnalysisError& e) {
    std::cerr << e.what() << "\n";
    return analysisExitCode(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return kExitOk;
}
