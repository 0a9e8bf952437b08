#include "subsel/oracle.hpp"

#include "subsel/errors.hpp"
#include "subsel/linalg.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace subsel {

std::uint64_t supportCount(int d, int sigma) {
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  Integer binom = 1;  // C(d, s)
  for (int s = 0; s <= std::min(sigma, d); ++s) {
    if (binom >= Integer(cap - total)) return cap;
    total += binom.convert_to<std::uint64_t>();
    binom = binom * (d - s) / (s + 1);
  }
  return total;
}

namespace {

bool nextCombination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

OracleResult bruteForce(const Instance& instance, const OracleOptions& options) {
  if (const auto violations = validate(instance); !violations.empty()) throw InputError(violations.front());
  const int d = static_cast<int>(instance.variableCount());
  const std::uint64_t count = supportCount(d, instance.sigma);
  if (count > options.maxSupports)
    throw BudgetExceeded("oracle would enumerate " + std::to_string(count) + " supports, over the budget of " +
                         std::to_string(options.maxSupports) + " (raise --max-oracle)");

  const RatMatrix M = instance.denseMatrix();
  const Index m = M.rows();
  const Index extra = instance.intercept ? 1 : 0;
  OracleResult result;
  std::optional<Rational> best;
  for (int s = 0; s <= instance.sigma; ++s) {
    std::vector<int> support(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) support[static_cast<std::size_t>(i)] = i;
    do {
      RatMatrix A(m, s + extra);
      for (int c = 0; c < s; ++c) A.col(c) = M.col(support[static_cast<std::size_t>(c)]);
      if (instance.intercept) A.col(s) = *instance.intercept;
      auto ls = leastSquares<Rational>(A, instance.b);
      ++result.supportsTried;
      if (best && !(ls.res2 < *best)) continue;
      best = ls.res2;
      result.support = support;
      result.solution.x = RatVector::Zero(d);
      for (int c = 0; c < s; ++c) result.solution.x[support[static_cast<std::size_t>(c)]] = ls.x[c];
      result.solution.mu = instance.intercept ? ls.x[s] : Rational(0);
      result.solution.objective = ls.res2;
    } while (nextCombination(support, d));
  }
  return result;
}

ValTable fixedLambdaTable(const ReducedProblem& rp, const RatVector& lambda) {
  if (lambda.size() != rp.lambdaDim())
    throw std::invalid_argument("fixedLambdaTable: lambda has dimension " + std::to_string(lambda.size()) +
                                ", expected " + std::to_string(rp.lambdaDim()));
  const auto bs = rp.bByBlock();
  const auto cs = rp.lambdaMatrixByBlock();
  std::vector<std::vector<Rational>> values;
  for (std::size_t i = 0; i < rp.blocks.size(); ++i) {
    const int n = static_cast<int>(rp.blocks[i].cols());
    auto& row = values.emplace_back();
    for (int j = 0; j <= n; ++j) {
      std::optional<Rational> best;
      std::vector<int> support(static_cast<std::size_t>(j));
      for (int c = 0; c < j; ++c) support[static_cast<std::size_t>(c)] = c;
      do {
        Rational value = evalForm(residualQuadratic<Rational>(rp.blocks[i], bs[i], cs[i], support), lambda);
        if (!best || value < *best) best = std::move(value);
      } while (nextCombination(support, n));
      row.push_back(*best);
    }
  }
  return ValTable(std::move(values));
}

Rational fixedLambdaOpt(const ReducedProblem& rp, const RatVector& lambda, int sigmaPrime) {
  return dpSolve(fixedLambdaTable(rp, lambda), sigmaPrime).objective;
}

AllocationOptima exhaustiveAllocations(const ValTable& table) {
  const auto structure = table.structure();
  const int total = structure.totalColumns();
  AllocationOptima out;
  out.best.resize(static_cast<std::size_t>(total) + 1);
  out.optimal.resize(static_cast<std::size_t>(total) + 1);
  std::vector<bool> seen(static_cast<std::size_t>(total) + 1, false);
  auto j = AllocationVector::zeros(table.blocks());
  for (;;) {
    const auto s = static_cast<std::size_t>(j.sum());
    Rational value = table.total(j);
    if (!seen[s] || value < out.best[s]) {
      seen[s] = true;
      out.best[s] = std::move(value);
      out.optimal[s] = {j};
    } else if (value == out.best[s]) {
      out.optimal[s].push_back(j);
    }
    // Odometer over 0..n_i, last block fastest, so each list stays lexicographic.
    std::size_t i = table.blocks();
    while (i > 0 && j[i - 1] == table.columns(i - 1)) j[--i] = 0;
    if (i == 0) break;
    ++j[i - 1];
  }
  return out;
}

}  // namespace subsel
