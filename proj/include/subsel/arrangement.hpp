#pragma once

#include "subsel/errors.hpp"
#include "subsel/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace subsel {

/// ext(lambda): the point of the extended space holding lambda_1..lambda_k and
/// every product lambda_a lambda_b with a <= b (see productIndex).
template <typename Scalar>
Vector<Scalar> ext(const Vector<Scalar>& lambda) {
  const Index k = lambda.size();
  Vector<Scalar> point(extendedDim(k));
  point.head(k) = lambda;
  for (Index a = 0; a < k; ++a)
    for (Index b = a; b < k; ++b) point[productIndex(k, a, b)] = lambda[a] * lambda[b];
  return point;
}

enum class Sign : std::int8_t { Negative = -1, Zero = 0, Positive = 1 };

inline Sign signOf(const LinearFunctional<Rational>& f, const RatVector& point) {
  return static_cast<Sign>(f(point).sign());
}

struct Hyperplane {
  LinearFunctional<Rational> functional;
  std::string provenance;
};

/// Exact sign of the hyperplane's functional at `point`; throws
/// std::invalid_argument on a dimension mismatch.
Sign signAt(const Hyperplane& h, const RatVector& point);

/// Positive rescaling to coprime integer coefficients (constant included).
LinearFunctional<Rational> primitive(const LinearFunctional<Rational>& f);

/// Full-dimensional cell: the closed region where sign_i * h_i >= 0 for all i,
/// with a rational witness at which every sign is strict.
struct Cell {
  std::vector<Sign> signs;
  RatVector witness;

  bool containsClosed(std::span<const Hyperplane> hyperplanes, const RatVector& point) const;
};

/// Hyperplanes merged up to nonzero scaling. `orientation[i]` is +1 or -1 when
/// input i maps to unique[index[i]] with that scaling, and 0 with
/// index[i] == -1 when input i was constant (it never splits anything).
struct MergedHyperplanes {
  std::vector<Hyperplane> unique;
  std::vector<int> index;
  std::vector<int> orientation;
};

MergedHyperplanes mergeHyperplanes(std::span<const Hyperplane> hyperplanes);

struct ArrangementOptions {
  enum class Strategy { Auto, Incremental };
  std::size_t maxCells = 200000;
  Strategy strategy = Strategy::Auto;
};

/// Sum_{i <= dim} C(n, i): the cell count of n generic hyperplanes.
Integer genericCellCount(int n, int dim);

/// Every full-dimensional cell of the arrangement (optionally restricted to
/// the closed region `within`, given by half-spaces f >= 0), each exactly once.
/// Dimension 1 and 2 arrangements without a region use direct sweeps; the
/// general path inserts hyperplanes one at a time and splits a cell only when
/// an exact interior-point test admits both sides. Throws BudgetExceeded when
/// the cell count passes options.maxCells.
std::vector<Cell> enumerateCells(std::span<const Hyperplane> hyperplanes, Index dim,
                                 const ArrangementOptions& options = {},
                                 std::span<const LinearFunctional<Rational>> within = {});

/// Closed region {f >= 0 for every constraint} with a strictly interior point.
struct Region {
  std::vector<LinearFunctional<Rational>> constraints;
  RatVector witness;

  bool containsClosed(const RatVector& point) const;
};

// ---------------------------------------------------------------------------
// Univariate sweep

/// Real root of a polynomial of degree <= 2 with rational coefficients:
/// either rational, or an irrational root of the monic irreducible
/// x^2 + p x + q isolated in the open interval (lower, upper).
class RealRoot {
 public:
  static RealRoot rational(Rational value);
  static RealRoot quadratic(Rational p, Rational q, bool largerRoot);

  bool isRational() const { return rational_; }
  const Rational& lower() const { return lo_; }
  const Rational& upper() const { return hi_; }
  /// Halves the isolating interval (no-op for rational roots).
  void refine() const;
  /// sign(root - x), exact.
  int compare(const Rational& x) const;
  double approx() const;
  std::string str() const;

  friend int compare(const RealRoot& a, const RealRoot& b);

 private:
  bool rational_ = true;
  bool larger_ = false;
  Rational p_, q_;
  mutable Rational lo_, hi_;
  int loSign_ = 0;  // sign of x^2 + p x + q at lower()
};

int compare(const RealRoot& a, const RealRoot& b);
inline bool operator<(const RealRoot& a, const RealRoot& b) { return compare(a, b) < 0; }
inline bool operator==(const RealRoot& a, const RealRoot& b) { return compare(a, b) == 0; }

/// Real roots of a univariate quadratic form (dimension 1), sorted, distinct.
/// Throws std::invalid_argument for the zero form.
std::vector<RealRoot> realRoots(const QuadraticForm<Rational>& form);

/// A simple rational strictly between two roots (a < b required).
Rational rationalBetween(const RealRoot& a, const RealRoot& b);
Rational rationalBelow(const RealRoot& a);
Rational rationalAbove(const RealRoot& a);

struct Sweep {
  std::vector<RealRoot> breakpoints;  // sorted, distinct
  std::vector<Rational> witnesses;    // one per open interval, breakpoints + 1 of them
};

/// Breakpoints are the real roots of all the given univariate differences;
/// every difference has constant sign on each open interval between them.
Sweep sweep1D(std::span<const QuadraticForm<Rational>> differences);

/// Sorted distinct breakpoints and interval witnesses from a set of roots.
Sweep sweepRoots(std::vector<RealRoot> roots);

}  // namespace subsel
