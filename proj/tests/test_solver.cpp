#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "subsel/errors.hpp"
#include "subsel/instance_io.hpp"
#include "subsel/oracle.hpp"
#include "subsel/solver.hpp"

#include <algorithm>
#include <optional>

using namespace subsel;
using testing::mat;
using testing::R;
using testing::vec;

namespace {

Instance identityPlusOnes(int sigma) {
  Instance inst;
  inst.blocks = {mat({{R(1)}}), mat({{R(1)}})};
  inst.coupling = {vec({R(1), R(1)})};
  inst.b = vec({R(2), R(1)});
  inst.sigma = sigma;
  return inst;
}

ReducedProblem reduced(std::vector<RatMatrix> blocks, RatVector b, std::vector<RatVector> lambdaCols, int sigmaPrime) {
  ReducedProblem rp;
  rp.blocks = std::move(blocks);
  rp.b = std::move(b);
  rp.lambdaCols = std::move(lambdaCols);
  rp.sigmaPrime = sigmaPrime;
  for (std::size_t l = 0; l < rp.lambdaCols.size(); ++l)
    rp.liftMap.push_back({LambdaSource::Kind::Coupling, static_cast<int>(l)});
  for (std::size_t l = 0; l < rp.lambdaCols.size(); ++l) rp.couplingSubset.push_back(static_cast<int>(l));
  return rp;
}

/// min over x supported on `support` and free lambda, by the test oracle.
Rational jointValue(const ReducedProblem& rp, const std::vector<int>& support) {
  RatMatrix A = RatMatrix::Zero(rp.b.size(), rp.blockColumnCount());
  Index r = 0, c = 0;
  for (const auto& B : rp.blocks) {
    A.block(r, c, B.rows(), B.cols()) = B;
    r += B.rows();
    c += B.cols();
  }
  RatMatrix design(A.rows(), static_cast<Index>(support.size()) + rp.lambdaDim());
  design.leftCols(static_cast<Index>(support.size())) = testing::columns(A, support);
  for (Index l = 0; l < rp.lambdaDim(); ++l)
    design.col(static_cast<Index>(support.size()) + l) = rp.lambdaCols[static_cast<std::size_t>(l)];
  return testing::residual2(design, rp.b);
}

Rational exhaustiveReduced(const ReducedProblem& rp) {
  const int n = static_cast<int>(rp.blockColumnCount());
  Rational best = -1;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > rp.sigmaPrime) continue;
    std::vector<int> s;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) s.push_back(j);
    const Rational v = jointValue(rp, s);
    if (best < 0 || v < best) best = v;
  }
  return best;
}

std::vector<std::vector<int>> subsetsOfSize(int n, int j) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask)
    if (std::popcount(mask) == j) {
      out.emplace_back();
      for (int c = 0; c < n; ++c)
        if (mask >> c & 1u) out.back().push_back(c);
    }
  return out;
}

/// The candidate of a recorded cell is optimal at the cell's witness: its
/// per-block values sum to the DP optimum of the table built at the witness.
void checkCellAtWitness(const ReducedProblem& rp, const CellRecord& cell) {
  if (cell.space != CellRecord::Space::Extended) {
    CHECK(cell.containsLambda(cell.witness));
    CHECK(supportValueAt(rp, cell.candidate, cell.witness) ==
          fixedLambdaOpt(rp, cell.witness, rp.sigmaPrime));
    return;
  }
  const auto Cb = rp.lambdaMatrixByBlock();
  const auto bb = rp.bByBlock();
  std::vector<std::vector<Rational>> values;
  Rational candidateValue = 0;
  int offset = 0;
  for (std::size_t i = 0; i < rp.blocks.size(); ++i) {
    const int n = static_cast<int>(rp.blocks[i].cols());
    auto value = [&](const std::vector<int>& s) {
      return linearize(residualQuadratic<Rational>(rp.blocks[i], bb[i], Cb[i], s))(cell.witness);
    };
    values.emplace_back();
    for (int j = 0; j <= n; ++j) {
      // values off the variety can be negative
      std::optional<Rational> best;
      for (const auto& s : subsetsOfSize(n, j)) {
        const Rational v = value(s);
        if (!best || v < *best) best = v;
      }
      values.back().push_back(*best);
    }
    std::vector<int> local;
    for (int c : cell.candidate)
      if (c >= offset && c < offset + n) local.push_back(c - offset);
    candidateValue += value(local);
    offset += n;
  }
  CHECK(candidateValue == dpSolve(ValTable(values), rp.sigmaPrime).objective);
}

GeneratorOptions gen(std::uint64_t seed, int blocks, int cols, int rows, int coupling, bool intercept) {
  GeneratorOptions o;
  o.seed = seed;
  o.blocks = blocks;
  o.blockCols = cols;
  o.blockRows = rows;
  o.coupling = coupling;
  o.intercept = intercept;
  return o;
}

}  // namespace

TEST_CASE("reduce") {
  auto inst = identityPlusOnes(1);
  auto rps = reduce(inst);
  REQUIRE(rps.size() == 2);
  CHECK(rps[0].couplingSubset.empty());
  CHECK(rps[0].lambdaDim() == 0);
  CHECK(rps[0].sigmaPrime == 1);
  CHECK(rps[1].couplingSubset == std::vector<int>{0});
  CHECK(rps[1].lambdaDim() == 1);
  CHECK(rps[1].sigmaPrime == 0);

  inst.coupling.clear();
  inst.intercept = vec({R(1), R(1)});
  rps = reduce(inst);
  REQUIRE(rps.size() == 1);
  CHECK(rps[0].lambdaDim() == 1);
  CHECK(rps[0].liftMap[0].kind == LambdaSource::Kind::Intercept);

  inst = identityPlusOnes(1);
  inst.coupling.push_back(vec({R(1), R(-1)}));
  rps = reduce(inst);
  CHECK(rps.size() == 3);
  inst.sigma = 3;
  rps = reduce(inst);
  REQUIRE(rps.size() == 4);
  CHECK(rps[3].couplingSubset == std::vector<int>{0, 1});
  CHECK(rps[0].sigmaPrime == 2);  // clamped to the block column count
  CHECK(rps[3].sigmaPrime == 1);
}

TEST_CASE("diagonal algorithm on the line example") {
  const auto rp = reduced({mat({{R(1)}}), mat({{R(1)}})}, vec({R(1), R(0)}), {vec({R(1), R(-1)})}, 1);
  SolveOptions o;
  o.recordCells = true;
  const auto res = solveDiagonal(rp, o);
  CHECK(res.candidates == CandidateSet{{0}, {1}});
  CHECK(res.report.baseCells == 4);
  CHECK(res.best.objective == exhaustiveReduced(rp));
  for (const auto& cell : res.report.cells) checkCellAtWitness(rp, cell);

  auto zero = rp;
  zero.sigmaPrime = 0;
  const auto z = solveDiagonal(zero);
  CHECK(z.candidates == CandidateSet{{}});
  CHECK(z.best.objective == testing::residual2(mat({{R(1)}, {R(-1)}}), vec({R(1), R(0)})));
}

TEST_CASE("without lambda the diagonal algorithm is the greedy") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 50; ++t) {
    const int n = testing::randomInt(rng, 1, 6);
    std::vector<RatMatrix> blocks;
    std::vector<Rational> a, bv;
    RatVector b(n);
    for (int i = 0; i < n; ++i) {
      a.push_back(testing::randomRational(rng, 3));
      bv.push_back(testing::randomRational(rng, 3));
      blocks.push_back(mat({{a.back()}}));
      b[i] = bv.back();
    }
    const auto rp = reduced(blocks, b, {}, testing::randomInt(rng, 0, n));
    const auto res = solveDiagonal(rp);
    const auto g = diagGreedy(a, bv, rp.sigmaPrime);
    CHECK(res.best.objective == g.objective);
    CHECK(res.candidates.size() == 1);
    CHECK(solveBlock(rp).best.objective == g.objective);
  }
}

TEST_CASE("support tables") {
  const auto single = reduced({mat({{R(1)}})}, vec({R(1)}), {vec({R(1)})}, 1);
  auto cells = buildSupportTables(single);
  CHECK(cells.blockHyperplanes == std::vector<std::size_t>{0});

  const auto two = reduced({mat({{R(1), R(2)}, {R(1), R(-1)}})}, vec({R(1), R(3)}), {vec({R(1), R(0)})}, 1);
  cells = buildSupportTables(two);
  CHECK(cells.blockHyperplanes == std::vector<std::size_t>{1});
  CHECK(cells.dim == 2);

  std::mt19937_64 rng(52);
  for (int t = 0; t < 30; ++t) {
    const Index m = testing::randomInt(rng, 1, 3);
    const RatMatrix A = testing::randomMatrix(rng, m, 2, 3);
    const RatVector b = testing::randomVector(rng, m, 3);
    const RatVector c = testing::randomVector(rng, m, 3);
    const auto rp = reduced({A}, b, {c}, 1);
    const auto sc = buildSupportTables(rp);
    REQUIRE(sc.tables.size() == sc.cells.size());
    for (std::size_t i = 0; i < sc.cells.size(); ++i) {
      const auto& chosen = sc.tables[i].upsilon[0][1];
      REQUIRE(chosen.size() == 1);
      const auto f0 = linearize(residualQuadratic<Rational>(A, b, RatMatrix(c), std::vector<int>{0}));
      const auto f1 = linearize(residualQuadratic<Rational>(A, b, RatMatrix(c), std::vector<int>{1}));
      const Rational v0 = f0(sc.cells[i].witness), v1 = f1(sc.cells[i].witness);
      CHECK((chosen[0] == 0 ? v0 <= v1 : v1 <= v0));
      for (int j = 0; j <= 2; ++j) CHECK(sc.tables[i].upsilon[0][static_cast<std::size_t>(j)].size() == static_cast<std::size_t>(j));
    }
  }
}

TEST_CASE("block algorithm examples") {
  const RatMatrix col = mat({{R(1)}, {R(1)}});
  const auto rp = reduced({col, col}, vec({R(0), R(2), R(0), R(2)}), {vec({R(1), R(0), R(1), R(0)})}, 1);
  CHECK(solveBlock(rp).best.objective == exhaustiveReduced(rp));
  SolveOptions ext;
  ext.lineSweep = false;
  CHECK(solveBlock(rp, ext).best.objective == exhaustiveReduced(rp));

  std::mt19937_64 rng(53);
  for (int t = 0; t < 20; ++t) {
    std::vector<RatMatrix> blocks;
    Index m = 0;
    for (int i = testing::randomInt(rng, 1, 3); i > 0; --i) {
      blocks.push_back(testing::randomMatrix(rng, testing::randomInt(rng, 1, 2), testing::randomInt(rng, 1, 2), 3));
      m += blocks.back().rows();
    }
    auto plain = reduced(blocks, testing::randomVector(rng, m, 3), {}, 0);
    plain.sigmaPrime = testing::randomInt(rng, 0, static_cast<int>(plain.blockColumnCount()));
    const auto table = fixedLambdaTable(plain, RatVector(0));
    CHECK(solveBlock(plain).best.objective == dpSolve(table, plain.sigmaPrime).objective);
    CHECK(solveBlock(plain).best.objective == exhaustiveReduced(plain));
  }
}

TEST_CASE("finish") {
  const auto none = reduced({mat({{R(1)}}), mat({{R(1)}})}, vec({R(3), R(4)}), {}, 1);
  CHECK(finish(CandidateSet{{}}, none).objective == 25);
  const auto best = finish(CandidateSet{{0}, {1}}, none);
  CHECK(best.objective == 9);
  CHECK(best.support == std::vector<int>{1});

  const auto joint = reduced({mat({{R(1)}}), mat({{R(1)}})}, vec({R(2), R(1)}), {vec({R(1), R(1)})}, 1);
  const auto j = finish(CandidateSet{{0}}, joint);
  CHECK(j.x == vec({R(1), R(0)}));
  CHECK(j.lambda == vec({R(1)}));
  CHECK(j.objective == 0);
}

TEST_CASE("solve examples") {
  auto s = solve(identityPlusOnes(1));
  CHECK(s.objective == R("1/2"));
  CHECK(s.support() == std::vector<int>{2});
  CHECK(s.x[2] == R("3/2"));
  s = solve(identityPlusOnes(2));
  CHECK(s.objective == 0);
  CHECK(s.support().size() <= 2);
  s = solve(identityPlusOnes(0));
  CHECK(s.objective == 5);
  CHECK(s.x.isZero());

  for (int sigma = 0; sigma <= 3; ++sigma) {
    const auto inst = identityPlusOnes(sigma);
    const auto sol = solve(inst);
    CHECK(sol.objective == testing::exhaustiveObjective(inst));
    CHECK(objectiveOf(inst, sol.x, sol.mu) == sol.objective);
  }

  auto bad = identityPlusOnes(1);
  bad.b = vec({R(1)});
  CHECK_THROWS_AS(solve(bad), InputError);
}

TEST_CASE("solver matches exhaustive search") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto base = generateInstance(gen(seed, 1 + static_cast<int>(seed % 3), 2, 2, static_cast<int>(seed % 2), seed % 4 == 1));
    Rational previous = -1;
    for (int sigma = 0; sigma <= base.variableCount(); ++sigma) {
      auto inst = base;
      inst.sigma = sigma;
      const auto res = solveDetailed(inst);
      const Rational expected = testing::exhaustiveObjective(inst);
      CHECK(res.solution.objective == expected);
      CHECK(objectiveOf(inst, res.solution.x, res.solution.mu) == res.solution.objective);
      CHECK(static_cast<int>(res.solution.support().size()) <= sigma);
      if (previous >= 0) CHECK(res.solution.objective <= previous);
      previous = res.solution.objective;
    }
  }
}

TEST_CASE("algorithm variants agree") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = generateInstance(gen(seed, 2, 2, 2, 1, seed % 2 == 0));
    const Rational expected = solve(inst).objective;
    SolveOptions o;
    o.refinement = SolveOptions::Refinement::Full;
    CHECK(solve(inst, o).objective == expected);
    o = SolveOptions{};
    o.algorithm = SolveOptions::Algorithm::Block;
    o.lineSweep = false;
    CHECK(solve(inst, o).objective == expected);
  }
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = generateInstance(gen(seed, 5, 1, 1, 1, seed % 2 == 0));
    const Rational expected = solve(inst).objective;
    SolveOptions o;
    o.algorithm = SolveOptions::Algorithm::Block;
    CHECK(solve(inst, o).objective == expected);
    o.algorithm = SolveOptions::Algorithm::Diagonal;
    CHECK(solve(inst, o).objective == expected);
  }
}

TEST_CASE("candidate sets contain an optimal support") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto inst = generateInstance(gen(seed, 3, 2, 2, 1, false));
    const Rational best = testing::exhaustiveObjective(inst);
    const RatMatrix M = inst.denseMatrix();
    const int n = static_cast<int>(inst.blockColumnCount());
    const int d = static_cast<int>(inst.variableCount());
    const auto rps = reduce(inst);
    std::vector<CandidateSet> sets;
    for (const auto& rp : rps) sets.push_back((rp.isDiagonal() ? solveDiagonal(rp) : solveBlock(rp)).candidates);
    bool covered = false;
    for (unsigned mask = 0; mask < (1u << d) && !covered; ++mask) {
      if (std::popcount(mask) > inst.sigma) continue;
      std::vector<int> s;
      for (int j = 0; j < d; ++j)
        if (mask >> j & 1u) s.push_back(j);
      if (testing::residual2(testing::columns(M, s), inst.b) != best) continue;
      std::vector<int> blockPart, couplingPart;
      for (int j : s) (j < n ? blockPart : couplingPart).push_back(j < n ? j : j - n);
      for (std::size_t p = 0; p < rps.size(); ++p) {
        if (rps[p].couplingSubset != couplingPart) continue;
        for (const auto& chi : sets[p])
          covered = covered || std::includes(chi.begin(), chi.end(), blockPart.begin(), blockPart.end());
      }
    }
    CHECK(covered);
  }
}

TEST_CASE("recorded cells are valid at their witnesses") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto inst = generateInstance(gen(seed, 2, 2, 2, 1, seed % 2 == 0));
    for (bool line : {true, false}) {
      SolveOptions o;
      o.recordCells = true;
      o.lineSweep = line;
      o.algorithm = SolveOptions::Algorithm::Block;
      const auto rps = reduce(inst);
      for (const auto& rp : rps) {
        if (rp.lambdaDim() == 0) continue;
        const auto res = solveBlock(rp, o);
        CHECK_FALSE(res.report.cells.empty());
        INFO("seed " << seed << " line " << line << " method " << res.report.method << " L " << describeSubset(rp.couplingSubset));
        for (const auto& cell : res.report.cells) checkCellAtWitness(rp, cell);
        if (res.report.method == "block-extended") {
          const Index dim = extendedDim(rp.lambdaDim());
          CHECK(Integer(static_cast<long>(res.report.baseCells)) <=
                genericCellCount(static_cast<int>(res.report.hyperplanes), static_cast<int>(dim)));
        }
        for (std::size_t i = 0; i < res.report.blockHyperplanes.size(); ++i)
          CHECK(res.report.blockHyperplanes[i] <= (std::size_t{1} << (2 * rp.blocks[i].cols())));
      }
    }
  }
}

TEST_CASE("budgets name the subproblem") {
  const auto inst = generateInstance(gen(6, 4, 2, 3, 1, true));
  SolveOptions o;
  o.arrangement.maxCells = 2;
  try {
    solve(inst, o);
    FAIL("expected a budget failure");
  } catch (const BudgetExceeded& e) {
    CHECK(std::string(e.what()).find("subproblem") != std::string::npos);
  }
}

TEST_CASE("lift") {
  const auto inst = identityPlusOnes(1);
  const auto rps = reduce(inst);
  const auto r = finish(CandidateSet{{}}, rps[1]);
  const auto s = lift(inst, rps[1], r);
  CHECK(s.x.size() == 3);
  CHECK(s.x[2] == r.lambda[0]);
  CHECK(s.objective == r.objective);
  CHECK(describeSubset({}) == "L={}");
}
