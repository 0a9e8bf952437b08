#pragma once

#include "subsel/model.hpp"
#include "subsel/separable.hpp"

#include <cstdint>
#include <vector>

namespace subsel {

struct OracleOptions {
  std::uint64_t maxSupports = 1000000;
};

struct OracleResult {
  Solution solution;
  std::vector<int> support;  // over all d variables
  std::uint64_t supportsTried = 0;
};

/// sum_{s <= sigma} C(d, s), saturating at UINT64_MAX.
std::uint64_t supportCount(int d, int sigma);

/// Exhaustive ground truth for the original problem: least squares on every
/// support of size <= sigma over all d variables (mu always free). Throws
/// BudgetExceeded when supportCount(d, sigma) passes options.maxSupports.
OracleResult bruteForce(const Instance& instance, const OracleOptions& options = {});

/// val(i; j) at a fixed lambda: the best size-j support of each block.
ValTable fixedLambdaTable(const ReducedProblem& rp, const RatVector& lambda);

/// opt(sigma')|lambda via the allocation DP on fixedLambdaTable.
Rational fixedLambdaOpt(const ReducedProblem& rp, const RatVector& lambda, int sigmaPrime);

/// Every allocation enumerated: the optimum for each total s and all
/// allocations attaining it.
struct AllocationOptima {
  std::vector<Rational> best;                             // [s]
  std::vector<std::vector<AllocationVector>> optimal;     // [s]
};

AllocationOptima exhaustiveAllocations(const ValTable& table);

}  // namespace subsel
