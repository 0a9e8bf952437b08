#pragma once

#include "subsel/rational.hpp"

#include <compare>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsel {

/// Subset Selection instance: minimise ||M x + c mu - b||^2 over x with at most
/// `sigma` nonzeros, where M = (A | C), A = diag(A^1, ..., A^h) and
/// C = (c_1 | ... | c_k). The intercept column c is optional (mu is free).
struct Instance {
  std::vector<RatMatrix> blocks;
  std::vector<RatVector> coupling;
  std::optional<RatVector> intercept;
  RatVector b;
  int sigma = 0;

  Index blockCount() const { return static_cast<Index>(blocks.size()); }
  Index couplingCount() const { return static_cast<Index>(coupling.size()); }
  /// m = sum of block rows.
  Index rowCount() const;
  /// n = sum of block columns (the A-part of x).
  Index blockColumnCount() const;
  /// d = n + k.
  Index variableCount() const { return blockColumnCount() + couplingCount(); }

  std::vector<Index> rowSizes() const;
  std::vector<Index> columnSizes() const;

  /// The dense m x d matrix M = (A | C).
  RatMatrix denseMatrix() const;
};

/// Every violated Instance invariant, one description each; empty when valid.
std::vector<std::string> validate(const Instance& instance);

/// ||M x + c mu - b||^2 evaluated exactly.
Rational objectiveOf(const Instance& instance, const RatVector& x, const Rational& mu);

/// Splits a length-m vector into consecutive pieces of the given sizes.
template <typename Scalar>
std::vector<Vector<Scalar>> sliceByBlock(const Vector<Scalar>& v, std::span<const Index> sizes) {
  Index total = 0;
  for (Index s : sizes) total += s;
  if (total != v.size())
    throw std::invalid_argument("sliceByBlock: vector length " + std::to_string(v.size()) +
                                " does not match block rows " + std::to_string(total));
  std::vector<Vector<Scalar>> out;
  out.reserve(sizes.size());
  Index offset = 0;
  for (Index s : sizes) {
    out.emplace_back(v.segment(offset, s));
    offset += s;
  }
  return out;
}

/// Where a lambda coordinate of a reduced problem comes from.
struct LambdaSource {
  enum class Kind { Intercept, Coupling };
  Kind kind = Kind::Intercept;
  int coupling = -1;  // 0-based coupling column index when kind == Coupling
};

/// Separable subproblem: min ||A x - (b - sum_l c'_l lambda_l)||^2 with the
/// support bound only on x. One exists per subset L of the coupling columns.
struct ReducedProblem {
  std::vector<RatMatrix> blocks;
  RatVector b;
  std::vector<RatVector> lambdaCols;
  int sigmaPrime = 0;
  std::vector<int> couplingSubset;  // L, 0-based, increasing
  std::vector<LambdaSource> liftMap;

  Index lambdaDim() const { return static_cast<Index>(lambdaCols.size()); }
  Index blockCount() const { return static_cast<Index>(blocks.size()); }
  Index blockColumnCount() const;
  std::vector<Index> rowSizes() const;
  std::vector<int> columnSizes() const;
  bool isDiagonal() const;

  /// m x k' matrix (c'_1 | ... | c'_k').
  RatMatrix lambdaMatrix() const;
  /// Rows of the lambda matrix belonging to block i.
  std::vector<RatMatrix> lambdaMatrixByBlock() const;
  std::vector<RatVector> bByBlock() const;
};

/// Per-block support budgets j = (j_1, ..., j_h).
class AllocationVector {
 public:
  AllocationVector() = default;
  explicit AllocationVector(std::vector<int> j) : j_(std::move(j)) {}
  static AllocationVector zeros(std::size_t h) { return AllocationVector(std::vector<int>(h, 0)); }

  std::size_t size() const { return j_.size(); }
  int operator[](std::size_t i) const { return j_[i]; }
  int& operator[](std::size_t i) { return j_[i]; }
  int sum() const;
  const std::vector<int>& values() const { return j_; }

  auto operator<=>(const AllocationVector&) const = default;
  bool operator==(const AllocationVector&) const = default;

 private:
  std::vector<int> j_;
};

std::string toString(const AllocationVector& j);

/// Column counts per block with theta = max n_i and
/// thetaBar = (theta - 1) theta (theta + 1) / 2.
struct BlockStructure {
  int h = 0;
  std::vector<int> nVec;
  int theta = 0;
  int thetaBar = 0;

  static BlockStructure fromSizes(std::vector<int> sizes);
  int totalColumns() const;
  bool feasible(const AllocationVector& j) const;
};

/// Sorted column indices, 0-based, into either the A-part of x (0..n-1) or
/// the full variable range (0..d-1).
struct Support {
  enum class Range { BlockColumns, AllVariables };
  Range range = Range::BlockColumns;
  std::vector<int> indices;

  static Support make(Range range, std::vector<int> indices, int bound);
  std::size_t size() const { return indices.size(); }
  auto operator<=>(const Support&) const = default;
  bool operator==(const Support&) const = default;
};

struct Solution {
  RatVector x;  // length d
  Rational mu;  // zero without an intercept
  Rational objective;

  std::vector<int> support() const;
};

}  // namespace subsel
