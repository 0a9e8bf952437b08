// subsel: exact subset selection for block-diagonal matrices with a few
// dense coupling columns.

#include "subsel/errors.hpp"
#include "subsel/instance_io.hpp"
#include "subsel/oracle.hpp"
#include "subsel/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace subsel;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, BadInput = 1, OverBudget = 2, Mismatch = 3 };

std::uint64_t envBudget(const char* name, std::uint64_t fallback) {
  const char* value = std::getenv(name);
  if (!value || !*value) return fallback;
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw InputError(std::string(name) + " must be a non-negative integer");
  }
}

struct Common {
  std::string path;
  bool json = false;
  std::optional<std::uint64_t> maxCellsFlag, maxOracleFlag;
  std::uint64_t maxCells = 200000;
  std::uint64_t maxOracle = 1000000;
  std::string algorithm = "auto";
  std::string refinement = "lazy";
  bool extendedSpace = false;
};

SolveOptions solveOptions(const Common& c) {
  SolveOptions o;
  o.arrangement.maxCells = c.maxCells;
  if (c.algorithm == "diagonal")
    o.algorithm = SolveOptions::Algorithm::Diagonal;
  else if (c.algorithm == "block")
    o.algorithm = SolveOptions::Algorithm::Block;
  o.refinement = c.refinement == "full" ? SolveOptions::Refinement::Full : SolveOptions::Refinement::Lazy;
  o.lineSweep = !c.extendedSpace;
  return o;
}

double secondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json vectorJson(const RatVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(toString(v[i]));
  return out;
}

std::string vectorText(const RatVector& v) {
  std::string out = "[";
  for (Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + toString(v[i]);
  return out + "]";
}

// 1-based column indices in reports.
std::vector<int> oneBased(std::vector<int> support) {
  for (int& s : support) ++s;
  return support;
}

std::string supportText(const std::vector<int>& support) {
  std::string out = "{";
  for (std::size_t i = 0; i < support.size(); ++i) out += (i ? "," : "") + std::to_string(support[i] + 1);
  return out + "}";
}

json solutionJson(const Instance& instance, const Solution& s) {
  json out;
  out["objective"] = toString(s.objective);
  out["objective_decimal"] = toDecimal(s.objective);
  out["support"] = oneBased(s.support());
  out["x"] = vectorJson(s.x);
  if (instance.intercept) out["mu"] = toString(s.mu);
  return out;
}

void printSolution(const Instance& instance, const Solution& s, const std::string& prefix = "") {
  std::cout << prefix << "objective: " << toString(s.objective) << " (" << toDecimal(s.objective) << ")\n";
  std::cout << prefix << "support: " << supportText(s.support()) << "\n";
  std::cout << prefix << "x: " << vectorText(s.x) << "\n";
  if (instance.intercept) std::cout << prefix << "mu: " << toString(s.mu) << "\n";
}

json reportJson(const SubproblemReport& r) {
  return json{{"subset", describeSubset(r.couplingSubset)},
              {"method", r.method},
              {"lambda_dim", r.lambdaDim},
              {"sigma_prime", r.sigmaPrime},
              {"hyperplanes", r.hyperplanes},
              {"block_hyperplanes", r.blockHyperplanes},
              {"base_cells", r.baseCells},
              {"regions", r.refinedCells},
              {"candidates", r.candidates}};
}

int runSolve(const Common& c) {
  const Instance instance = readInstance(c.path);
  const auto start = std::chrono::steady_clock::now();
  const SolveResult result = solveDetailed(instance, solveOptions(c));
  const double seconds = secondsSince(start);
  if (c.json) {
    json out = solutionJson(instance, result.solution);
    out["command"] = "solve";
    out["candidates"] = result.candidateCount;
    out["subproblems"] = json::array();
    for (const auto& r : result.subproblems) out["subproblems"].push_back(reportJson(r));
    out["seconds"] = seconds;
    std::cout << out.dump() << "\n";
    return Ok;
  }
  printSolution(instance, result.solution);
  std::cout << "candidates: " << result.candidateCount << "\n";
  for (const auto& r : result.subproblems)
    std::cout << "subproblem " << describeSubset(r.couplingSubset) << ": " << r.method << ", k'=" << r.lambdaDim
              << ", sigma'=" << r.sigmaPrime << ", hyperplanes " << r.hyperplanes << ", cells " << r.baseCells
              << ", regions " << r.refinedCells << ", candidates " << r.candidates << "\n";
  std::cout << "time: " << seconds << " s\n";
  return Ok;
}

int runOracle(const Common& c) {
  const Instance instance = readInstance(c.path);
  const OracleResult result = bruteForce(instance, {c.maxOracle});
  if (c.json) {
    json out = solutionJson(instance, result.solution);
    out["command"] = "oracle";
    out["supports_tried"] = result.supportsTried;
    std::cout << out.dump() << "\n";
    return Ok;
  }
  printSolution(instance, result.solution);
  std::cout << "supports tried: " << result.supportsTried << "\n";
  return Ok;
}

int runCompare(const Common& c) {
  const Instance instance = readInstance(c.path);
  const OracleResult oracle = bruteForce(instance, {c.maxOracle});
  json out{{"command", "compare"}, {"oracle", solutionJson(instance, oracle.solution)}};
  if (!c.json) printSolution(instance, oracle.solution, "oracle ");
  Solution solved;
  try {
    solved = solve(instance, solveOptions(c));
  } catch (const BudgetExceeded& e) {
    if (c.json) {
      out["error"] = e.what();
      std::cout << out.dump() << "\n";
    }
    throw;
  }
  const bool pass = solved.objective == oracle.solution.objective;
  out["solver"] = solutionJson(instance, solved);
  out["result"] = pass ? "PASS" : "FAIL";
  if (c.json) {
    std::cout << out.dump() << "\n";
  } else {
    printSolution(instance, solved, "solver ");
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
  }
  return pass ? Ok : Mismatch;
}

struct Bench {
  GeneratorOptions gen;
  int count = 10;
  bool compare = false;
};

int runBench(const Common& c, const Bench& b) {
  int failures = 0;
  double total = 0;
  double worst = 0;
  for (int t = 0; t < b.count; ++t) {
    GeneratorOptions g = b.gen;
    g.seed = b.gen.seed + static_cast<std::uint64_t>(t);
    const Instance instance = generateInstance(g);
    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solveDetailed(instance, solveOptions(c));
    const double seconds = secondsSince(start);
    total += seconds;
    worst = std::max(worst, seconds);
    std::string verdict;
    if (b.compare) {
      const bool pass = bruteForce(instance, {c.maxOracle}).solution.objective == result.solution.objective;
      verdict = pass ? "PASS" : "FAIL";
      failures += pass ? 0 : 1;
    }
    if (c.json) {
      json line{{"seed", g.seed},
                {"d", instance.variableCount()},
                {"sigma", instance.sigma},
                {"objective", toString(result.solution.objective)},
                {"candidates", result.candidateCount},
                {"seconds", seconds}};
      if (b.compare) line["result"] = verdict;
      std::cout << line.dump() << "\n";
    } else {
      std::cout << "seed " << g.seed << ": d=" << instance.variableCount() << " sigma=" << instance.sigma
                << " objective=" << toString(result.solution.objective)
                << " candidates=" << result.candidateCount << " time=" << seconds * 1000 << " ms"
                << (verdict.empty() ? "" : " " + verdict) << "\n";
    }
  }
  if (!c.json)
    std::cout << "total " << total << " s, mean " << total / std::max(1, b.count) << " s, max " << worst << " s\n";
  return failures ? Mismatch : Ok;
}

void addGenerator(CLI::App* app, GeneratorOptions& g) {
  app->add_option("--blocks", g.blocks, "number of blocks h")->capture_default_str();
  app->add_option("--block-cols", g.blockCols, "maximum columns per block")->capture_default_str();
  app->add_option("--block-rows", g.blockRows, "maximum rows per block")->capture_default_str();
  app->add_option("--coupling", g.coupling, "number of coupling columns k")->capture_default_str();
  app->add_option("--sigma", g.sigma, "support bound (random in 0..d when omitted)");
  app->add_flag("--intercept", g.intercept, "add a free intercept column");
  app->add_option("--seed", g.seed, "random seed")->capture_default_str();
  app->add_option("--range", g.range, "entries p/q with |p|, q <= range")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact subset selection for block-diagonal matrices with coupling columns"};
  app.require_subcommand(1);

  Common common;
  Bench bench;
  GeneratorOptions gen;
  std::string output;

  auto addSolverFlags = [&](CLI::App* sub) {
    sub->add_option("--max-cells", common.maxCellsFlag, "cell and region budget per arrangement (default 200000)");
    sub->add_option("--algorithm", common.algorithm, "auto | diagonal | block")
        ->check(CLI::IsMember({"auto", "diagonal", "block"}));
    sub->add_option("--refinement", common.refinement, "lazy | full")->check(CLI::IsMember({"lazy", "full"}));
    sub->add_flag("--extended", common.extendedSpace,
                  "with one lambda, cut the extended space S instead of sweeping the lambda line");
  };
  auto addOracleFlags = [&](CLI::App* sub) {
    sub->add_option("--max-oracle", common.maxOracleFlag, "oracle support budget (default 1000000)");
  };

  auto* solveCmd = app.add_subcommand("solve", "solve an instance file");
  solveCmd->add_option("path", common.path, "instance file")->required();
  solveCmd->add_flag("--json", common.json, "machine-readable report");
  addSolverFlags(solveCmd);

  auto* oracleCmd = app.add_subcommand("oracle", "brute-force an instance file");
  oracleCmd->add_option("path", common.path, "instance file")->required();
  oracleCmd->add_flag("--json", common.json, "machine-readable report");
  addOracleFlags(oracleCmd);

  auto* compareCmd = app.add_subcommand("compare", "solve and brute-force, PASS iff the objectives are equal");
  compareCmd->add_option("path", common.path, "instance file")->required();
  compareCmd->add_flag("--json", common.json, "machine-readable report");
  addSolverFlags(compareCmd);
  addOracleFlags(compareCmd);

  auto* genCmd = app.add_subcommand("gen", "write a random instance");
  addGenerator(genCmd, gen);
  genCmd->add_option("-o,--output", output, "output file (default stdout)");

  auto* benchCmd = app.add_subcommand("bench", "time the solver on generated instances");
  addGenerator(benchCmd, bench.gen);
  benchCmd->add_option("--count", bench.count, "number of seeds")->capture_default_str();
  benchCmd->add_flag("--compare", bench.compare, "also check every objective against the oracle");
  benchCmd->add_flag("--json", common.json, "one JSON object per run");
  addSolverFlags(benchCmd);
  addOracleFlags(benchCmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : BadInput;
  }

  try {
    // Flags win over the environment, which wins over the defaults.
    common.maxCells = common.maxCellsFlag.value_or(envBudget("SUBSEL_MAX_CELLS", common.maxCells));
    common.maxOracle = common.maxOracleFlag.value_or(envBudget("SUBSEL_MAX_ORACLE", common.maxOracle));

    if (*solveCmd) return runSolve(common);
    if (*oracleCmd) return runOracle(common);
    if (*compareCmd) return runCompare(common);
    if (*benchCmd) return runBench(common, bench);
    if (*genCmd) {
      const std::string text = writeInstance(generateInstance(gen));
      if (output.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(output);
        if (!out) throw InputError("cannot write " + output);
        out << text;
      }
      return Ok;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return OverBudget;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return BadInput;
  }
  return Ok;
}
