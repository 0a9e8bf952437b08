#pragma once

#include "subsel/rational.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsel {

// ---------------------------------------------------------------------------
// Extended-space layout: coordinates lambda_1..lambda_k followed by the
// products lambda_a * lambda_b, a <= b, in lexicographic order of (a, b).

inline Index extendedDim(Index k) { return k + k * (k + 1) / 2; }

inline Index productIndex(Index k, Index a, Index b) {
  if (a > b) std::swap(a, b);
  Index offset = k;
  for (Index row = 0; row < a; ++row) offset += k - row;
  return offset + (b - a);
}

// ---------------------------------------------------------------------------

/// q(lambda) = lambda^T P lambda + r^T lambda + s0 with P symmetric.
template <typename Scalar>
struct QuadraticForm {
  Matrix<Scalar> P;
  Vector<Scalar> r;
  Scalar s0{};

  static QuadraticForm zero(Index dim) {
    return QuadraticForm{Matrix<Scalar>::Zero(dim, dim), Vector<Scalar>::Zero(dim), Scalar(0)};
  }

  Index dim() const { return r.size(); }

  bool isZero() const {
    return s0 == Scalar(0) && (P.array() == Scalar(0)).all() && (r.array() == Scalar(0)).all();
  }

  QuadraticForm& operator+=(const QuadraticForm& other) {
    P += other.P;
    r += other.r;
    s0 += other.s0;
    return *this;
  }
  QuadraticForm& operator-=(const QuadraticForm& other) {
    P -= other.P;
    r -= other.r;
    s0 -= other.s0;
    return *this;
  }
  friend QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
  friend QuadraticForm operator-(QuadraticForm a, const QuadraticForm& b) { return a -= b; }

  friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) {
    return a.dim() == b.dim() && a.s0 == b.s0 && a.P == b.P && a.r == b.r;
  }
};

/// Affine functional x -> coeffs . x + constant.
template <typename Scalar>
struct LinearFunctional {
  Vector<Scalar> coeffs;
  Scalar constant{};

  static LinearFunctional zero(Index dim) {
    return LinearFunctional{Vector<Scalar>::Zero(dim), Scalar(0)};
  }

  Index dim() const { return coeffs.size(); }

  Scalar operator()(const Vector<Scalar>& point) const {
    if (point.size() != coeffs.size())
      throw std::invalid_argument("functional of dimension " + std::to_string(coeffs.size()) +
                                  " evaluated at a point of dimension " +
                                  std::to_string(point.size()));
    return coeffs.dot(point) + constant;
  }

  /// True when every coefficient vanishes (the functional is a constant).
  bool isConstant() const { return (coeffs.array() == Scalar(0)).all(); }
  bool isZero() const { return isConstant() && constant == Scalar(0); }

  LinearFunctional operator-() const { return LinearFunctional{-coeffs, -constant}; }
  LinearFunctional& operator+=(const LinearFunctional& o) {
    coeffs += o.coeffs;
    constant += o.constant;
    return *this;
  }
  LinearFunctional& operator-=(const LinearFunctional& o) {
    coeffs -= o.coeffs;
    constant -= o.constant;
    return *this;
  }
  friend LinearFunctional operator+(LinearFunctional a, const LinearFunctional& b) { return a += b; }
  friend LinearFunctional operator-(LinearFunctional a, const LinearFunctional& b) { return a -= b; }
  friend bool operator==(const LinearFunctional& a, const LinearFunctional& b) {
    return a.dim() == b.dim() && a.constant == b.constant && a.coeffs == b.coeffs;
  }
};

// ---------------------------------------------------------------------------
// Orthogonalisation

/// Pairwise-orthogonal (not normalised) basis of the column span, together
/// with the input column indices that contributed a basis vector. Columns that
/// are dependent on earlier ones are dropped in input order.
template <typename Scalar>
struct OrthogonalBasis {
  std::vector<Vector<Scalar>> vectors;
  std::vector<Index> kept;

  Index rank() const { return static_cast<Index>(vectors.size()); }
};

/// v minus its projection onto span(basis), using <v,u>/<u,u> weights.
template <typename Scalar>
Vector<Scalar> projectOut(const std::vector<Vector<Scalar>>& basis, const Vector<Scalar>& v) {
  Vector<Scalar> out = v;
  for (const auto& u : basis) {
    const Scalar w = u.dot(v) / u.squaredNorm();
    if (w != Scalar(0)) out -= w * u;
  }
  return out;
}

template <typename Scalar>
OrthogonalBasis<Scalar> orthogonalize(const Matrix<Scalar>& columns) {
  OrthogonalBasis<Scalar> basis;
  for (Index c = 0; c < columns.cols(); ++c) {
    Vector<Scalar> v = projectOut(basis.vectors, Vector<Scalar>(columns.col(c)));
    if ((v.array() != Scalar(0)).any()) {
      basis.vectors.push_back(std::move(v));
      basis.kept.push_back(c);
    }
  }
  return basis;
}

template <typename Scalar>
std::vector<Vector<Scalar>> orthogonalize(std::span<const Vector<Scalar>> columns) {
  if (columns.empty()) return {};
  Matrix<Scalar> M(columns.front().size(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != M.rows())
      throw std::invalid_argument("orthogonalize: columns of unequal length");
    M.col(static_cast<Index>(c)) = columns[c];
  }
  return orthogonalize(M).vectors;
}

// ---------------------------------------------------------------------------
// Fraction-free elimination

namespace detail {

// Maps an augmented system into the ring where Bareiss elimination runs.
template <typename Scalar>
struct EliminationRing {
  using Ring = Scalar;
  static Matrix<Ring> toRing(const Matrix<Scalar>& m) { return m; }
  static Scalar fraction(const Ring& num, const Ring& den) { return num / den; }
  static Scalar lift(const Ring& value) { return value; }
  static bool smaller(const Ring& a, const Ring& b) { return abs(a) > abs(b); }
};

// Rational rows are scaled by the lcm of their denominators so elimination
// runs over the integers.
template <>
struct EliminationRing<Rational> {
  using Ring = Integer;
  static Matrix<Integer> toRing(const Matrix<Rational>& m) {
    Matrix<Integer> out(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i) {
      Integer l = 1;
      for (Index j = 0; j < m.cols(); ++j) l = lcm(l, Integer(denominator(m(i, j))));
      for (Index j = 0; j < m.cols(); ++j)
        out(i, j) = numerator(m(i, j)) * (l / denominator(m(i, j)));
    }
    return out;
  }
  static Rational fraction(const Integer& num, const Integer& den) { return Rational(num, den); }
  static Rational lift(const Integer& value) { return Rational(value); }
  // Prefer the smallest nonzero magnitude to limit coefficient growth.
  static bool smaller(const Integer& a, const Integer& b) { return abs(a) < abs(b); }
};

}  // namespace detail

/// Solves a nonsingular square system by Bareiss elimination with full
/// pivoting. Throws std::domain_error when the matrix is singular.
template <typename Scalar>
Vector<Scalar> solveNonsingular(const Matrix<Scalar>& A, const Vector<Scalar>& y) {
  using Ring = typename detail::EliminationRing<Scalar>::Ring;
  using Ops = detail::EliminationRing<Scalar>;
  const Index n = A.rows();
  if (A.cols() != n || y.size() != n)
    throw std::invalid_argument("solveNonsingular: dimension mismatch");
  Matrix<Scalar> augmented(n, n + 1);
  augmented << A, y;
  Matrix<Ring> M = Ops::toRing(augmented);
  std::vector<Index> colOrder(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) colOrder[static_cast<std::size_t>(j)] = j;

  Ring previous(1);
  for (Index k = 0; k < n; ++k) {
    Index pr = -1, pc = -1;
    for (Index i = k; i < n; ++i)
      for (Index j = k; j < n; ++j)
        if (M(i, j) != Ring(0) && (pr < 0 || Ops::smaller(M(i, j), M(pr, pc)))) {
          pr = i;
          pc = j;
        }
    if (pr < 0) throw std::domain_error("solveNonsingular: singular matrix");
    if (pr != k) M.row(pr).swap(M.row(k));
    if (pc != k) {
      M.col(pc).swap(M.col(k));
      std::swap(colOrder[static_cast<std::size_t>(pc)], colOrder[static_cast<std::size_t>(k)]);
    }
    for (Index i = k + 1; i < n; ++i) {
      for (Index j = k + 1; j <= n; ++j) M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / previous;
      M(i, k) = Ring(0);
    }
    previous = M(k, k);
  }

  Vector<Scalar> permuted(n);
  for (Index k = n - 1; k >= 0; --k) {
    Scalar acc = Ops::lift(M(k, n));
    for (Index j = k + 1; j < n; ++j) acc -= Ops::lift(M(k, j)) * permuted[j];
    permuted[k] = acc / Ops::lift(M(k, k));
  }
  Vector<Scalar> x(n);
  for (Index k = 0; k < n; ++k) x[colOrder[static_cast<std::size_t>(k)]] = permuted[k];
  return x;
}

// ---------------------------------------------------------------------------
// Least squares

template <typename Scalar>
struct LeastSquaresResult {
  Vector<Scalar> x;
  Scalar res2{};
};

/// Minimises ||A x - y||^2. Columns dropped as dependent during
/// orthogonalisation get coordinate 0 in the returned minimiser.
template <typename Scalar>
LeastSquaresResult<Scalar> leastSquares(const Matrix<Scalar>& A, const Vector<Scalar>& y) {
  if (A.rows() != y.size()) throw std::invalid_argument("leastSquares: row count mismatch");
  LeastSquaresResult<Scalar> result{Vector<Scalar>::Zero(A.cols()), Scalar(0)};
  const auto basis = orthogonalize(A);
  if (basis.rank() > 0) {
    Matrix<Scalar> independent(A.rows(), basis.rank());
    for (Index c = 0; c < basis.rank(); ++c)
      independent.col(c) = A.col(basis.kept[static_cast<std::size_t>(c)]);
    const Matrix<Scalar> normal = independent.transpose() * independent;
    const Vector<Scalar> rhs = independent.transpose() * y;
    const Vector<Scalar> xKept = solveNonsingular<Scalar>(normal, rhs);
    for (Index c = 0; c < basis.rank(); ++c) result.x[basis.kept[static_cast<std::size_t>(c)]] = xKept[c];
  }
  result.res2 = (A * result.x - y).squaredNorm();
  return result;
}

// ---------------------------------------------------------------------------
// Residual quadratic forms

/// Minimal squared residual of one block as a function of lambda:
///   q(lambda) = min { ||A z - (b - C lambda)||^2 : supp(z) within `support` }.
/// `coupling` holds the block's rows of the lambda columns (m_i x k').
template <typename Scalar>
QuadraticForm<Scalar> residualQuadratic(const Matrix<Scalar>& block, const Vector<Scalar>& bBlock,
                                        const Matrix<Scalar>& coupling,
                                        std::span<const int> support) {
  if (bBlock.size() != block.rows() || coupling.rows() != block.rows())
    throw std::invalid_argument("residualQuadratic: row count mismatch");
  Matrix<Scalar> chosen(block.rows(), static_cast<Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    if (support[c] < 0 || support[c] >= block.cols())
      throw std::invalid_argument("residualQuadratic: support index out of range");
    chosen.col(static_cast<Index>(c)) = block.col(support[c]);
  }
  const auto basis = orthogonalize(chosen).vectors;
  const Vector<Scalar> bPerp = projectOut(basis, bBlock);
  Matrix<Scalar> cPerp(coupling.rows(), coupling.cols());
  for (Index l = 0; l < coupling.cols(); ++l)
    cPerp.col(l) = projectOut(basis, Vector<Scalar>(coupling.col(l)));

  QuadraticForm<Scalar> q;
  q.P = cPerp.transpose() * cPerp;
  q.r = Scalar(-2) * (cPerp.transpose() * bPerp);
  q.s0 = bPerp.squaredNorm();
  return q;
}

template <typename Scalar>
Scalar evalForm(const QuadraticForm<Scalar>& q, const Vector<Scalar>& lambda) {
  if (lambda.size() != q.dim())
    throw std::invalid_argument("evalForm: lambda has dimension " + std::to_string(lambda.size()) +
                                ", form has dimension " + std::to_string(q.dim()));
  if (q.dim() == 0) return q.s0;
  return lambda.dot(q.P * lambda) + q.r.dot(lambda) + q.s0;
}

/// The same quadratic as an affine functional over the extended space.
template <typename Scalar>
LinearFunctional<Scalar> linearize(const QuadraticForm<Scalar>& q) {
  const Index k = q.dim();
  auto f = LinearFunctional<Scalar>::zero(extendedDim(k));
  for (Index l = 0; l < k; ++l) f.coeffs[l] = q.r[l];
  for (Index a = 0; a < k; ++a)
    for (Index b = a; b < k; ++b)
      f.coeffs[productIndex(k, a, b)] = a == b ? q.P(a, a) : Scalar(q.P(a, b) + q.P(b, a));
  f.constant = q.s0;
  return f;
}

}  // namespace subsel
