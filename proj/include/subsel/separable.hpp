#pragma once

#include "subsel/linalg.hpp"
#include "subsel/model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace subsel {

/// val(i; j) for every block i and every j in 0..n_i.
class ValTable {
 public:
  ValTable() = default;
  explicit ValTable(std::vector<std::vector<Rational>> values);

  std::size_t blocks() const { return values_.size(); }
  int columns(std::size_t i) const { return static_cast<int>(values_[i].size()) - 1; }
  const Rational& operator()(std::size_t i, int j) const {
    return values_[i][static_cast<std::size_t>(j)];
  }
  BlockStructure structure() const;
  /// sum_i val(i; j_i)
  Rational total(const AllocationVector& j) const;

 private:
  std::vector<std::vector<Rational>> values_;
};

// ---------------------------------------------------------------------------
// Diagonal case

struct DiagGreedyResult {
  std::vector<int> K;  // 0-based, increasing
  RatVector x;
  Rational objective;
};

/// Optimal solution of min sum_j (a_jj x_j - b'_j)^2 with at most sigma
/// nonzeros: keep the min(sigma, |H|) largest |b'_j| among H = {a_jj != 0},
/// ties broken by smaller index.
DiagGreedyResult diagGreedy(std::span<const Rational> aDiag, std::span<const Rational> bPrime,
                            int sigma);

// ---------------------------------------------------------------------------
// Successor allocations

/// q such that `next` is q-close to `current`, or nullopt when `next` is not a
/// successor (sums do not differ by exactly one, or sizes differ).
std::optional<int> qCloseness(const AllocationVector& current, const AllocationVector& next);

/// The change between consecutive allocations: I+, I- and the closeness q.
struct DeltaPattern {
  AllocationVector from;
  AllocationVector to;
  std::vector<int> iPlus;
  std::vector<int> iMinus;
  int q = 0;

  /// Throws std::invalid_argument when `to` is not a successor of `from`.
  static DeltaPattern between(const AllocationVector& from, const AllocationVector& to);

  /// (block, old, new) for every changed block: the part d depends on.
  std::vector<std::array<int, 3>> changes() const;
};

template <typename Value>
struct DeltaExpr {
  DeltaPattern pattern;
  Value value;
};

/// aug(j^s): feasible successors that are q-close for some q <= thetaBar, in
/// lexicographic order. Generated block by block from the I+/I- compositions.
std::vector<AllocationVector> augSet(const AllocationVector& current, const BlockStructure& structure);

/// d(j^s, j^{s+1}) = sum over changed blocks of val(i; new) - val(i; old).
DeltaExpr<Rational> deltaValue(const AllocationVector& current, const AllocationVector& next,
                               const ValTable& table);

/// Per-block quadratic forms opt(i; j)|lambda, j in 0..n_i.
using FormTable = std::vector<std::vector<QuadraticForm<Rational>>>;

/// Every distinct restricted change pattern {(i, old_i, new_i)} arising from a
/// feasible j^s and a successor in aug(j^s), for some level s. The returned
/// patterns carry representative from/to allocations.
std::vector<DeltaPattern> enumerateDeltaPatterns(const BlockStructure& structure);

/// The set D with numeric values, deduplicated by (value, pattern).
std::vector<DeltaExpr<Rational>> buildD(const BlockStructure& structure, const ValTable& table);

/// The set D with symbolic forms, deduplicated by the form coefficients.
std::vector<DeltaExpr<QuadraticForm<Rational>>> buildD(const BlockStructure& structure,
                                                       const FormTable& forms);

/// binom(q + p - 1, p - 1)
std::uint64_t weakCompositionCount(int q, int p);

/// sum_{q <= thetaBar} C(q+h, q+1) C(q+h-1, q) theta^(2q+1)
Integer deltaPatternBound(int h, int theta);

// ---------------------------------------------------------------------------
// Solvers for val(sigma)

struct AllocationResult {
  AllocationVector j;
  Rational objective;
};

/// Strict weak order over d-expressions; `less(a, b)` means a is preferred.
using DeltaComparator =
    std::function<bool(const DeltaExpr<Rational>&, const DeltaExpr<Rational>&)>;

/// Smaller value first, ties to the lexicographically smaller successor.
bool valueThenSuccessor(const DeltaExpr<Rational>& a, const DeltaExpr<Rational>& b);

/// One step of the augmentation chain: the candidates D(j^s) and the choice.
struct ChainStep {
  AllocationVector from;
  std::vector<DeltaExpr<Rational>> candidates;
  std::size_t chosen = 0;
};

/// Starting from j^0 = 0, moves sigma times to a minimal element of D(j^s).
AllocationResult chainSolve(const ValTable& table, int sigma,
                            const DeltaComparator& less = valueThenSuccessor,
                            std::vector<ChainStep>* trace = nullptr);

/// opt(1..i; j) = min_t opt(1..i-1; j - t) + val(i; t).
AllocationResult dpSolve(const ValTable& table, int sigma);

}  // namespace subsel
