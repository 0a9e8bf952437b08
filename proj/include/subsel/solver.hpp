#pragma once

#include "subsel/arrangement.hpp"
#include "subsel/model.hpp"
#include "subsel/separable.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace subsel {

/// One reduced problem per subset L of the coupling columns with |L| <= sigma,
/// in increasing bitmask order. Lambda columns are the intercept (if any)
/// followed by c_l, l in L; sigma' = min(sigma - |L|, n).
std::vector<ReducedProblem> reduce(const Instance& instance);

/// Supports over the block columns 0..n-1 of a reduced problem, deduplicated
/// and in lexicographic order.
using CandidateSet = std::set<std::vector<int>>;

struct ReducedSolution {
  std::vector<int> support;  // chosen candidate
  RatVector x;               // length n
  RatVector lambda;          // length k'
  Rational objective;
};

/// A closed region of the parameter space together with the candidate support
/// derived from it. Regions live in lambda space (diagonal algorithm), in the
/// extended space S (block algorithm), or on the lambda line as an interval
/// between two breakpoints (block algorithm with one lambda).
struct CellRecord {
  enum class Space { Lambda, Extended, Interval };
  Space space = Space::Lambda;
  std::vector<LinearFunctional<Rational>> constraints;  // f >= 0
  std::optional<RealRoot> lower, upper;                 // Interval only; absent = unbounded
  RatVector witness;
  std::vector<int> candidate;

  /// Whether the lambda point (or ext(lambda)) lies in the closed region.
  bool containsLambda(const RatVector& lambda) const;
};

struct SolveOptions {
  enum class Algorithm { Auto, Diagonal, Block };
  enum class Refinement { Lazy, Full };
  Algorithm algorithm = Algorithm::Auto;
  /// Lazy splits a support cell only along comparisons the chain actually
  /// makes; Full cuts it by every pairwise difference of D first.
  Refinement refinement = Refinement::Lazy;
  /// With a single lambda, sweep the lambda line instead of the plane S.
  bool lineSweep = true;
  ArrangementOptions arrangement;
  bool recordCells = false;
};

struct SubproblemReport {
  std::vector<int> couplingSubset;
  int lambdaDim = 0;
  int sigmaPrime = 0;
  std::string method;                     // "diagonal", "block-numeric", "block-sweep", "block-extended"
  std::size_t hyperplanes = 0;            // distinct hyperplanes of the first arrangement
  std::vector<std::size_t> blockHyperplanes;  // nonzero same-cardinality comparisons per block
  std::size_t baseCells = 0;              // cells (or intervals) of the first arrangement
  std::size_t refinedCells = 0;           // regions after refinement by D comparisons
  std::size_t maxD = 0;                   // largest |D| over support cells
  std::size_t candidates = 0;
  std::vector<CellRecord> cells;          // when SolveOptions::recordCells
};

struct SubproblemResult {
  CandidateSet candidates;
  ReducedSolution best;
  SubproblemReport report;
};

/// Least squares over (x_chi, lambda) for each candidate; the smallest
/// objective wins, ties to the lexicographically smallest support.
ReducedSolution finish(const CandidateSet& candidates, const ReducedProblem& rp);

/// Diagonal algorithm: every block is 1 x 1.
SubproblemResult solveDiagonal(const ReducedProblem& rp, const SolveOptions& options = {});

/// v(i; j) for every block i and j in 0..n_i: block-local column indices.
struct SupportTable {
  std::vector<std::vector<std::vector<int>>> upsilon;
};

/// Cells of the arrangement in S comparing same-cardinality supports of each
/// block, with the support table each cell induces.
struct SupportCells {
  Index dim = 0;
  std::vector<Hyperplane> hyperplanes;        // merged
  std::vector<std::size_t> blockHyperplanes;  // before merging
  std::vector<Cell> cells;
  std::vector<SupportTable> tables;
};

SupportCells buildSupportTables(const ReducedProblem& rp, const ArrangementOptions& options = {});

/// General block algorithm.
SubproblemResult solveBlock(const ReducedProblem& rp, const SolveOptions& options = {});

/// min over x supported on `support` of ||A x - (b - C lambda)||^2 for fixed lambda.
Rational supportValueAt(const ReducedProblem& rp, const std::vector<int>& support,
                        const RatVector& lambda);

struct SolveResult {
  Solution solution;
  std::size_t bestSubproblem = 0;
  std::vector<SubproblemReport> subproblems;
  std::size_t candidateCount = 0;
};

/// Solves every reduced problem and lifts the best back to (x, mu). Budget
/// failures are rethrown with the offending subproblem named.
SolveResult solveDetailed(const Instance& instance, const SolveOptions& options = {});

inline Solution solve(const Instance& instance, const SolveOptions& options = {}) {
  return solveDetailed(instance, options).solution;
}

/// Lifts a reduced solution to the original variables by zero padding.
Solution lift(const Instance& instance, const ReducedProblem& rp, const ReducedSolution& reduced);

std::string describeSubset(const std::vector<int>& couplingSubset);

}  // namespace subsel
