#include "subsel/lp.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace subsel {

namespace {

int sgn(const Rational& x) { return x.sign(); }
int sgn(double x) { return x > 1e-11 ? 1 : (x < -1e-11 ? -1 : 0); }

// Dictionary form: every basic variable is written as
//   x_B[r] = beta[r] + sum_j T(r, j) * x_N[j].
// Variables 0..dim-1 are free (y), dim is tau >= 0, the rest are slacks >= 0.
template <typename Scalar>
class MarginSimplex {
 public:
  MarginSimplex(std::span<const LinearFunctional<Scalar>> halfspaces, Index dim)
      : dim_(dim), rows_(static_cast<Index>(halfspaces.size()) + 1) {
    t0_ = Scalar(1);
    for (const auto& f : halfspaces)
      if (f.constant < t0_) t0_ = f.constant;

    const Index cols = dim_ + 1;
    T_ = Matrix<Scalar>::Zero(rows_, cols);
    beta_ = Vector<Scalar>(rows_);
    gamma_ = Vector<Scalar>::Zero(cols);
    gamma_[dim_] = 1;
    z0_ = 0;
    nonbasic_.resize(static_cast<std::size_t>(cols));
    basic_.resize(static_cast<std::size_t>(rows_));
    for (Index j = 0; j < cols; ++j) nonbasic_[static_cast<std::size_t>(j)] = j;
    for (Index r = 0; r + 1 < rows_; ++r) {
      const auto& f = halfspaces[static_cast<std::size_t>(r)];
      if (f.dim() != dim_) throw std::invalid_argument("findInteriorPoint: dimension mismatch");
      T_.row(r).head(dim_) = f.coeffs.transpose();
      T_(r, dim_) = -1;
      beta_[r] = f.constant - t0_;
      basic_[static_cast<std::size_t>(r)] = cols + r;
    }
    T_(rows_ - 1, dim_) = -1;
    beta_[rows_ - 1] = 1 - t0_;
    basic_[static_cast<std::size_t>(rows_ - 1)] = cols + rows_ - 1;
  }

  // False when the iteration cap is hit (only plausible in floating point).
  bool run() {
    for (int iteration = 0; iteration < 20000; ++iteration) {
      const Index e = entering();
      if (e < 0) return true;
      const int dir = isFree(nonbasic_[static_cast<std::size_t>(e)]) ? sgn(gamma_[e]) : 1;
      Index leave = -1;
      Scalar bestRatio{};
      for (Index r = 0; r < rows_; ++r) {
        if (isFree(basic_[static_cast<std::size_t>(r)])) continue;
        const Scalar a = dir > 0 ? T_(r, e) : Scalar(-T_(r, e));
        if (sgn(a) >= 0) continue;
        Scalar ratio = beta_[r] / -a;
        if (leave < 0 || ratio < bestRatio ||
            (ratio == bestRatio && basic_[static_cast<std::size_t>(r)] < basic_[static_cast<std::size_t>(leave)])) {
          leave = r;
          bestRatio = std::move(ratio);
        }
      }
      if (leave < 0) return false;  // unbounded: impossible with the cap row
      pivot(leave, e);
    }
    return false;
  }

  Scalar margin() const { return t0_ + value(dim_); }

  Vector<Scalar> point() const {
    Vector<Scalar> y(dim_);
    for (Index v = 0; v < dim_; ++v) y[v] = value(v);
    return y;
  }

  /// Optimal dual multiplier of each half-space (the cap row excluded).
  std::vector<Scalar> duals() const {
    std::vector<Scalar> u(static_cast<std::size_t>(rows_ - 1), Scalar(0));
    for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
      const Index r = nonbasic_[j] - (dim_ + 1);
      if (r >= 0 && r < rows_ - 1) u[static_cast<std::size_t>(r)] = -gamma_[static_cast<Index>(j)];
    }
    return u;
  }

 private:
  bool isFree(Index variable) const { return variable < dim_; }

  Scalar value(Index variable) const {
    for (Index r = 0; r < rows_; ++r)
      if (basic_[static_cast<std::size_t>(r)] == variable) return beta_[r];
    return Scalar(0);
  }

  // Bland's rule: the eligible nonbasic variable with the smallest index.
  Index entering() const {
    Index best = -1;
    for (Index j = 0; j < static_cast<Index>(nonbasic_.size()); ++j) {
      const Index variable = nonbasic_[static_cast<std::size_t>(j)];
      const int s = sgn(gamma_[j]);
      const bool eligible = isFree(variable) ? s != 0 : s > 0;
      if (eligible && (best < 0 || variable < nonbasic_[static_cast<std::size_t>(best)])) best = j;
    }
    return best;
  }

  void pivot(Index r, Index e) {
    const Scalar a = T_(r, e);
    const Index cols = T_.cols();
    // Solve row r for the entering variable.
    Vector<Scalar> newRow(cols);
    for (Index j = 0; j < cols; ++j) newRow[j] = j == e ? Scalar(1 / a) : Scalar(-T_(r, j) / a);
    const Scalar newBeta = -beta_[r] / a;

    for (Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const Scalar coef = T_(i, e);
      if (coef == 0) continue;
      beta_[i] += coef * newBeta;
      for (Index j = 0; j < cols; ++j) T_(i, j) = j == e ? Scalar(coef * newRow[j]) : Scalar(T_(i, j) + coef * newRow[j]);
    }
    const Scalar g = gamma_[e];
    if (g != 0) {
      z0_ += g * newBeta;
      for (Index j = 0; j < cols; ++j) gamma_[j] = j == e ? Scalar(g * newRow[j]) : Scalar(gamma_[j] + g * newRow[j]);
    }
    T_.row(r) = newRow.transpose();
    beta_[r] = newBeta;
    std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(e)]);
  }

  Index dim_;
  Index rows_;
  Scalar t0_;
  Matrix<Scalar> T_;
  Vector<Scalar> beta_;
  Vector<Scalar> gamma_;
  Scalar z0_;
  std::vector<Index> basic_;
  std::vector<Index> nonbasic_;
};

// Replaces each coordinate by the simplest rational nearby while keeping every
// half-space value at least half the margin.
RatVector simplify(std::span<const LinearFunctional<Rational>> halfspaces, const RatVector& y,
                   const Rational& margin) {
  Rational maxNorm = 0;
  for (const auto& f : halfspaces) {
    Rational norm = 0;
    for (Index j = 0; j < f.dim(); ++j) norm += abs(f.coeffs[j]);
    if (norm > maxNorm) maxNorm = norm;
  }
  if (maxNorm.sign() == 0) return RatVector::Zero(y.size());
  const Rational radius = margin / (2 * maxNorm);
  RatVector out(y.size());
  for (Index j = 0; j < y.size(); ++j) out[j] = simplestBetween(y[j] - radius, y[j] + radius);
  return out;
}

// Some solution of K u = e (free unknowns set to zero), or nullopt when the
// system is inconsistent. Columns are scaled to integers and eliminated
// fraction-free (Bareiss), which avoids a gcd per operation.
std::optional<RatVector> solveConsistent(const RatMatrix& K, const RatVector& e) {
  const Index rows = K.rows();
  const Index cols = K.cols();
  Matrix<Integer> M(rows, cols + 1);
  std::vector<Integer> scale(static_cast<std::size_t>(cols + 1));
  for (Index c = 0; c <= cols; ++c) {
    Integer l = 1;
    for (Index r = 0; r < rows; ++r) {
      const Integer& d = denominator(c < cols ? K(r, c) : e[r]);
      if (d != 1) l = boost::multiprecision::lcm(l, d);
    }
    scale[static_cast<std::size_t>(c)] = l;
    for (Index r = 0; r < rows; ++r) {
      const Rational& v = c < cols ? K(r, c) : e[r];
      M(r, c) = numerator(v) * (l / denominator(v));
    }
  }
  std::vector<Index> pivotCol;
  Integer previous = 1;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index p = r;
    while (p < rows && M(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r) M.row(p).swap(M.row(r));
    for (Index i = r + 1; i < rows; ++i) {
      for (Index j = c + 1; j <= cols; ++j) M(i, j) = (M(r, c) * M(i, j) - M(i, c) * M(r, j)) / previous;
      M(i, c) = 0;
    }
    previous = M(r, c);
    pivotCol.push_back(c);
    ++r;
  }
  for (Index i = r; i < rows; ++i)
    if (M(i, cols) != 0) return std::nullopt;
  // Scaled unknowns: K u = e becomes M' u' = e' with u_c = u'_c * scale_rhs / scale_c.
  RatVector u = RatVector::Zero(cols);
  for (Index i = r - 1; i >= 0; --i) {
    Rational acc(M(i, cols));
    for (Index t = i + 1; t < r; ++t) {
      const Index c = pivotCol[static_cast<std::size_t>(t)];
      if (M(i, c) != 0) acc -= Rational(M(i, c)) * u[c];
    }
    const Index c = pivotCol[static_cast<std::size_t>(i)];
    u[c] = acc / Rational(M(i, c));
  }
  for (Index c = 0; c < cols; ++c)
    if (u[c].sign() != 0)
      u[c] = u[c] * Rational(scale[static_cast<std::size_t>(c)]) / Rational(scale[static_cast<std::size_t>(cols)]);
  return u;
}

// Floating-point pass over rows scaled to unit max-norm. Its answer is only a
// hint: it is turned into an exact certificate or discarded.
std::optional<InteriorPoint> certifiedFromFloat(std::span<const LinearFunctional<Rational>> halfspaces,
                                                Index dim) {
  std::vector<LinearFunctional<double>> scaled;
  scaled.reserve(halfspaces.size());
  for (const auto& f : halfspaces) {
    LinearFunctional<double> g{Vector<double>(dim), toDouble(f.constant)};
    double norm = std::abs(g.constant);
    for (Index j = 0; j < dim; ++j) {
      g.coeffs[j] = toDouble(f.coeffs[j]);
      norm = std::max(norm, std::abs(g.coeffs[j]));
    }
    if (norm == 0 || !std::isfinite(norm)) return std::nullopt;
    g.coeffs /= norm;
    g.constant /= norm;
    scaled.push_back(std::move(g));
  }
  MarginSimplex<double> lp(scaled, dim);
  if (!lp.run()) return std::nullopt;

  if (lp.margin() > 1e-9) {
    // Round the float point and check every half-space exactly.
    const Vector<double> yf = lp.point();
    RatVector y(dim);
    for (Index j = 0; j < dim; ++j) y[j] = Rational(yf[j]);
    Rational margin;
    for (std::size_t i = 0; i < halfspaces.size(); ++i) {
      Rational v = halfspaces[i](y);
      if (v.sign() <= 0) return std::nullopt;
      if (i == 0 || v < margin) margin = std::move(v);
    }
    return InteriorPoint{true, simplify(halfspaces, y, margin), margin};
  }

  // Farkas: u >= 0 with sum u_i a_i = 0, sum u_i = 1 and sum u_i c_i <= 0
  // proves there is no interior point. Solve for u exactly on the support of
  // the float duals.
  const auto uf = lp.duals();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < uf.size(); ++i)
    if (uf[i] > 1e-9) support.push_back(i);
  if (support.empty()) return std::nullopt;
  RatMatrix K(dim + 1, static_cast<Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    K.col(static_cast<Index>(c)).head(dim) = halfspaces[support[c]].coeffs;
    K(dim, static_cast<Index>(c)) = 1;
  }
  RatVector e = RatVector::Zero(dim + 1);
  e[dim] = 1;
  const auto u = solveConsistent(K, e);
  if (!u) return std::nullopt;
  Rational bound = 0;
  for (std::size_t c = 0; c < support.size(); ++c) {
    if ((*u)[static_cast<Index>(c)].sign() < 0) return std::nullopt;
    bound += (*u)[static_cast<Index>(c)] * halfspaces[support[c]].constant;
  }
  if (bound.sign() > 0) return std::nullopt;
  return InteriorPoint{false, RatVector(), bound};
}

}  // namespace

InteriorPoint findInteriorPoint(std::span<const LinearFunctional<Rational>> halfspaces, Index dim) {
  if (halfspaces.empty()) return {true, RatVector::Zero(dim), Rational(1)};
  for (const auto& f : halfspaces)
    if (f.dim() != dim) throw std::invalid_argument("findInteriorPoint: dimension mismatch");
  if (auto quick = certifiedFromFloat(halfspaces, dim)) return std::move(*quick);
  return findInteriorPointExact(halfspaces, dim);
}

InteriorPoint findInteriorPointExact(std::span<const LinearFunctional<Rational>> halfspaces, Index dim) {
  if (halfspaces.empty()) return {true, RatVector::Zero(dim), Rational(1)};
  MarginSimplex<Rational> lp(halfspaces, dim);
  if (!lp.run()) throw std::logic_error("findInteriorPoint: exact simplex did not terminate");
  InteriorPoint result;
  result.margin = lp.margin();
  result.fullDimensional = result.margin.sign() > 0;
  if (result.fullDimensional) result.point = simplify(halfspaces, lp.point(), result.margin);
  return result;
}

}  // namespace subsel
