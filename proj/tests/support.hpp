#pragma once

// Helpers shared by the test executables: literal builders, seeded random
// data, and a small exact least-squares oracle that does not go through the
// library's linalg (plain Gauss-Jordan on the normal equations).

#include "subsel/model.hpp"
#include "subsel/rational.hpp"

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace testing {

using subsel::Index;
using subsel::RatMatrix;
using subsel::Rational;
using subsel::RatVector;

inline Rational R(const std::string& text) { return subsel::parseRational(text); }
inline Rational R(long value) { return Rational(value); }

inline RatVector vec(std::initializer_list<Rational> values) {
  RatVector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (const auto& x : values) v[i++] = x;
  return v;
}

inline RatMatrix mat(std::initializer_list<std::initializer_list<Rational>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows.begin()->size());
  RatMatrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (const auto& x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Rational randomRational(std::mt19937_64& rng, int range) {
  std::uniform_int_distribution<int> num(-range, range);
  std::uniform_int_distribution<int> den(1, range);
  return Rational(num(rng), den(rng));
}

inline RatMatrix randomMatrix(std::mt19937_64& rng, Index rows, Index cols, int range) {
  RatMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = randomRational(rng, range);
  return m;
}

inline RatVector randomVector(std::mt19937_64& rng, Index size, int range) {
  RatVector v(size);
  for (Index i = 0; i < size; ++i) v[i] = randomRational(rng, range);
  return v;
}

inline int randomInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Rank of a rational matrix by row reduction.
inline Index rankOf(RatMatrix m) {
  Index rank = 0;
  for (Index c = 0; c < m.cols() && rank < m.rows(); ++c) {
    Index pivot = rank;
    while (pivot < m.rows() && m(pivot, c) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    m.row(rank).swap(m.row(pivot));
    for (Index r = 0; r < m.rows(); ++r) {
      if (r == rank || m(r, c) == 0) continue;
      const Rational f = m(r, c) / m(rank, c);
      m.row(r) -= f * m.row(rank);
    }
    ++rank;
  }
  return rank;
}

/// Some minimiser of ||A x - y||^2: Gauss-Jordan on A^T A x = A^T y with free
/// unknowns fixed at zero.
inline RatVector normalSolve(const RatMatrix& A, const RatVector& y) {
  const Index n = A.cols();
  RatMatrix aug(n, n + 1);
  aug.leftCols(n) = A.transpose() * A;
  aug.col(n) = A.transpose() * y;
  std::vector<Index> pivotCol;
  Index row = 0;
  for (Index c = 0; c < n && row < n; ++c) {
    Index p = row;
    while (p < n && aug(p, c) == 0) ++p;
    if (p == n) continue;
    aug.row(row).swap(aug.row(p));
    const Rational inv = 1 / aug(row, c);
    aug.row(row) *= inv;
    for (Index r = 0; r < n; ++r)
      if (r != row && aug(r, c) != 0) {
        const Rational f = aug(r, c);
        aug.row(r) -= f * aug.row(row);
      }
    pivotCol.push_back(c);
    ++row;
  }
  RatVector x = RatVector::Zero(n);
  for (std::size_t r = 0; r < pivotCol.size(); ++r) x[pivotCol[r]] = aug(static_cast<Index>(r), n);
  return x;
}

inline Rational residual2(const RatMatrix& A, const RatVector& y) {
  if (A.cols() == 0) return y.squaredNorm();
  return (A * normalSolve(A, y) - y).squaredNorm();
}

inline RatMatrix columns(const RatMatrix& A, const std::vector<int>& idx) {
  RatMatrix out(A.rows(), static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Index>(c)) = A.col(idx[c]);
  return out;
}

/// M with the intercept column appended last when present.
inline RatMatrix fullDesign(const subsel::Instance& inst) {
  RatMatrix M = inst.denseMatrix();
  if (!inst.intercept) return M;
  RatMatrix out(M.rows(), M.cols() + 1);
  out.leftCols(M.cols()) = M;
  out.col(M.cols()) = *inst.intercept;
  return out;
}

/// Exhaustive optimum over supports of size <= sigma (intercept always free).
inline Rational exhaustiveObjective(const subsel::Instance& inst) {
  const RatMatrix M = inst.denseMatrix();
  const int d = static_cast<int>(M.cols());
  Rational best = -1;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    if (std::popcount(mask) > inst.sigma) continue;
    std::vector<int> idx;
    for (int j = 0; j < d; ++j)
      if (mask >> j & 1u) idx.push_back(j);
    RatMatrix A = columns(M, idx);
    if (inst.intercept) {
      RatMatrix withC(A.rows(), A.cols() + 1);
      withC.leftCols(A.cols()) = A;
      withC.col(A.cols()) = *inst.intercept;
      A = withC;
    }
    const Rational value = residual2(A, inst.b);
    if (best < 0 || value < best) best = value;
  }
  return best;
}

}  // namespace testing
