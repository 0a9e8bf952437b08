#include "subsel/arrangement.hpp"

#include "subsel/lp.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace subsel {

Sign signAt(const Hyperplane& h, const RatVector& point) {
  return static_cast<Sign>(h.functional(point).sign());
}

LinearFunctional<Rational> primitive(const LinearFunctional<Rational>& f) {
  Integer l = denominator(f.constant);
  for (Index j = 0; j < f.dim(); ++j) l = lcm(l, Integer(denominator(f.coeffs[j])));
  Integer g = abs(numerator(f.constant) * (l / denominator(f.constant)));
  for (Index j = 0; j < f.dim(); ++j) g = gcd(g, Integer(numerator(f.coeffs[j]) * (l / denominator(f.coeffs[j]))));
  if (g == 0) return f;
  const Rational scale(l, g);
  return LinearFunctional<Rational>{f.coeffs * scale, f.constant * scale};
}

bool Cell::containsClosed(std::span<const Hyperplane> hyperplanes, const RatVector& point) const {
  if (hyperplanes.size() != signs.size())
    throw std::invalid_argument("Cell::containsClosed: sign vector does not match hyperplanes");
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (static_cast<int>(signs[i]) * hyperplanes[i].functional(point).sign() < 0) return false;
  return true;
}

bool Region::containsClosed(const RatVector& point) const {
  for (const auto& f : constraints)
    if (f(point).sign() < 0) return false;
  return true;
}

namespace {

std::string functionalKey(const LinearFunctional<Rational>& f) {
  std::string key = f.constant.str();
  for (Index j = 0; j < f.dim(); ++j) {
    key += ',';
    key += f.coeffs[j].str();
  }
  return key;
}

}  // namespace

MergedHyperplanes mergeHyperplanes(std::span<const Hyperplane> hyperplanes) {
  MergedHyperplanes merged;
  std::map<std::string, int> seen;
  for (const auto& h : hyperplanes) {
    if (h.functional.isConstant()) {
      merged.index.push_back(-1);
      merged.orientation.push_back(0);
      continue;
    }
    auto f = primitive(h.functional);
    int orientation = 1;
    for (Index j = 0; j < f.dim(); ++j)
      if (f.coeffs[j].sign() != 0) {
        if (f.coeffs[j].sign() < 0) {
          f = -f;
          orientation = -1;
        }
        break;
      }
    auto [it, inserted] = seen.emplace(functionalKey(f), static_cast<int>(merged.unique.size()));
    if (inserted) merged.unique.push_back(Hyperplane{std::move(f), h.provenance});
    merged.index.push_back(it->second);
    merged.orientation.push_back(orientation);
  }
  return merged;
}

Integer genericCellCount(int n, int dim) {
  Integer total = 0;
  Integer binom = 1;  // C(n, i)
  for (int i = 0; i <= std::min(n, dim); ++i) {
    total += binom;
    binom = binom * (n - i) / (i + 1);
  }
  return total;
}

namespace {

void checkBudget(std::size_t count, const ArrangementOptions& options) {
  if (count > options.maxCells)
    throw BudgetExceeded("arrangement has more than " + std::to_string(options.maxCells) +
                         " cells (raise --max-cells)");
}

std::vector<Sign> signsAt(std::span<const Hyperplane> hyperplanes, const RatVector& point) {
  std::vector<Sign> signs;
  signs.reserve(hyperplanes.size());
  for (const auto& h : hyperplanes) signs.push_back(signAt(h, point));
  return signs;
}

std::vector<Rational> intervalWitnesses(std::vector<Rational> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Rational> witnesses;
  if (points.empty()) {
    witnesses.emplace_back(0);
    return witnesses;
  }
  witnesses.push_back(simplestBetween(points.front() - 1, points.front()));
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    witnesses.push_back(simplestBetween(points[i], points[i + 1]));
  witnesses.push_back(simplestBetween(points.back(), points.back() + 1));
  return witnesses;
}

std::vector<Cell> enumerateLine(std::span<const Hyperplane> hyperplanes,
                                const ArrangementOptions& options) {
  std::vector<Rational> points;
  for (const auto& h : hyperplanes) points.push_back(-h.functional.constant / h.functional.coeffs[0]);
  std::vector<Cell> cells;
  for (const auto& x : intervalWitnesses(std::move(points))) {
    RatVector w(1);
    w[0] = x;
    cells.push_back(Cell{signsAt(hyperplanes, w), w});
    checkBudget(cells.size(), options);
  }
  return cells;
}

// Vertical slabs between consecutive critical abscissae: inside a slab no two
// lines cross, so the cells met by the slab are the gaps between the lines
// sorted by height.
std::vector<Cell> enumeratePlane(std::span<const Hyperplane> hyperplanes,
                                 const ArrangementOptions& options) {
  struct Line {
    std::size_t index;
    Rational slope, intercept;  // y = slope * x + intercept
    int bSign;
  };
  std::vector<Line> lines;
  std::vector<std::size_t> vertical;
  std::vector<Rational> critical;
  for (std::size_t i = 0; i < hyperplanes.size(); ++i) {
    const auto& f = hyperplanes[i].functional;
    const Rational& a = f.coeffs[0];
    const Rational& b = f.coeffs[1];
    if (b.sign() == 0) {
      vertical.push_back(i);
      critical.push_back(-f.constant / a);
    } else {
      lines.push_back(Line{i, -a / b, -f.constant / b, b.sign()});
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j)
      if (lines[i].slope != lines[j].slope)
        critical.push_back((lines[j].intercept - lines[i].intercept) / (lines[i].slope - lines[j].slope));

  std::vector<Cell> cells;
  std::unordered_set<std::string> seen;
  std::vector<std::pair<Rational, std::size_t>> heights(lines.size());
  for (const auto& x : intervalWitnesses(std::move(critical))) {
    std::string base(hyperplanes.size(), '\0');
    for (std::size_t v : vertical) {
      const auto& f = hyperplanes[v].functional;
      base[v] = static_cast<char>((f.coeffs[0] * x + f.constant).sign());
    }
    for (std::size_t l = 0; l < lines.size(); ++l)
      heights[l] = {lines[l].slope * x + lines[l].intercept, l};
    std::sort(heights.begin(), heights.end());
    std::vector<Rational> levels;
    for (const auto& [y, l] : heights)
      if (levels.empty() || levels.back() != y) levels.push_back(y);
    const auto gaps = intervalWitnesses(levels);
    // Gap g lies above the first g distinct levels.
    std::string key = base;
    for (const auto& line : lines) key[line.index] = static_cast<char>(-line.bSign);
    std::size_t cursor = 0;
    for (std::size_t g = 0; g < gaps.size(); ++g) {
      if (g > 0) {
        const Rational& level = levels[g - 1];
        while (cursor < heights.size() && heights[cursor].first == level) {
          const auto& line = lines[heights[cursor].second];
          key[line.index] = static_cast<char>(line.bSign);
          ++cursor;
        }
      }
      if (!seen.insert(key).second) continue;
      RatVector w(2);
      w << x, gaps[g];
      Cell cell;
      for (char c : key) cell.signs.push_back(static_cast<Sign>(c));
      cell.witness = std::move(w);
      cells.push_back(std::move(cell));
      checkBudget(cells.size(), options);
    }
  }
  return cells;
}

std::vector<Cell> enumerateIncremental(std::span<const Hyperplane> hyperplanes, Index dim,
                                       const ArrangementOptions& options,
                                       std::span<const LinearFunctional<Rational>> within) {
  std::vector<LinearFunctional<Rational>> region;
  for (const auto& f : within) region.push_back(primitive(f));
  std::vector<LinearFunctional<Rational>> oriented;
  for (const auto& h : hyperplanes) oriented.push_back(primitive(h.functional));

  const auto start = findInteriorPoint(region, dim);
  if (!start.fullDimensional) return {};
  std::vector<Cell> cells{Cell{{}, start.point}};

  std::vector<LinearFunctional<Rational>> constraints;
  auto interiorWith = [&](const Cell& cell, std::size_t k, int side) {
    constraints = region;
    for (std::size_t i = 0; i < k; ++i)
      constraints.push_back(static_cast<int>(cell.signs[i]) > 0 ? oriented[i] : -oriented[i]);
    constraints.push_back(side > 0 ? oriented[k] : -oriented[k]);
    return findInteriorPoint(constraints, dim);
  };

  for (std::size_t k = 0; k < hyperplanes.size(); ++k) {
    std::vector<Cell> next;
    next.reserve(cells.size());
    for (auto& cell : cells) {
      const int s = oriented[k](cell.witness).sign();
      if (s != 0) {
        const auto other = interiorWith(cell, k, -s);
        Cell kept = cell;
        kept.signs.push_back(static_cast<Sign>(s));
        next.push_back(std::move(kept));
        if (other.fullDimensional) {
          Cell split{cell.signs, other.point};
          split.signs.push_back(static_cast<Sign>(-s));
          next.push_back(std::move(split));
        }
      } else {
        for (int side : {1, -1}) {
          const auto part = interiorWith(cell, k, side);
          if (!part.fullDimensional) continue;
          Cell split{cell.signs, part.point};
          split.signs.push_back(static_cast<Sign>(side));
          next.push_back(std::move(split));
        }
      }
      checkBudget(next.size(), options);
    }
    cells = std::move(next);
  }
  return cells;
}

}  // namespace

std::vector<Cell> enumerateCells(std::span<const Hyperplane> hyperplanes, Index dim,
                                 const ArrangementOptions& options,
                                 std::span<const LinearFunctional<Rational>> within) {
  for (const auto& h : hyperplanes) {
    if (h.functional.dim() != dim)
      throw std::invalid_argument("enumerateCells: hyperplane dimension mismatch");
    if (h.functional.isConstant())
      throw std::invalid_argument("enumerateCells: constant functional is not a hyperplane");
  }
  if (dim == 0) {
    if (!within.empty() && !findInteriorPoint(within, 0).fullDimensional) return {};
    return {Cell{{}, RatVector(0)}};
  }
  const bool direct = options.strategy == ArrangementOptions::Strategy::Auto && within.empty();
  if (direct && dim == 1) return enumerateLine(hyperplanes, options);
  if (direct && dim == 2) return enumeratePlane(hyperplanes, options);
  return enumerateIncremental(hyperplanes, dim, options, within);
}

// ---------------------------------------------------------------------------
// RealRoot

namespace {

Rational evalMonic(const Rational& p, const Rational& q, const Rational& x) { return x * x + p * x + q; }

bool isSquare(const Integer& n, Integer& root) {
  if (n.sign() < 0) return false;
  root = sqrt(n);
  return root * root == n;
}

}  // namespace

RealRoot RealRoot::rational(Rational value) {
  RealRoot r;
  r.rational_ = true;
  r.lo_ = value;
  r.hi_ = std::move(value);
  return r;
}

RealRoot RealRoot::quadratic(Rational p, Rational q, bool largerRoot) {
  const Rational disc = p * p - 4 * q;
  if (disc.sign() <= 0) throw std::invalid_argument("RealRoot::quadratic: no irrational real roots");
  const Integer nm = numerator(disc) * denominator(disc);
  Integer s;
  if (isSquare(nm, s)) throw std::invalid_argument("RealRoot::quadratic: roots are rational");
  const Rational sqrtLo(s, Integer(denominator(disc)));
  const Rational sqrtHi(Integer(s + 1), Integer(denominator(disc)));
  RealRoot r;
  r.rational_ = false;
  r.larger_ = largerRoot;
  if (largerRoot) {
    r.lo_ = (-p + sqrtLo) / 2;
    r.hi_ = (-p + sqrtHi) / 2;
  } else {
    r.lo_ = (-p - sqrtHi) / 2;
    r.hi_ = (-p - sqrtLo) / 2;
  }
  r.loSign_ = evalMonic(p, q, r.lo_).sign();
  r.p_ = std::move(p);
  r.q_ = std::move(q);
  return r;
}

void RealRoot::refine() const {
  if (rational_) return;
  const Rational mid = (lo_ + hi_) / 2;
  if (evalMonic(p_, q_, mid).sign() == loSign_)
    lo_ = mid;
  else
    hi_ = mid;
}

int RealRoot::compare(const Rational& x) const {
  if (rational_) return lo_ < x ? -1 : (lo_ > x ? 1 : 0);
  if (x <= lo_) return 1;
  if (x >= hi_) return -1;
  // x is inside the isolating interval and is not the root.
  return evalMonic(p_, q_, x).sign() == loSign_ ? 1 : -1;
}

double RealRoot::approx() const {
  if (rational_) return toDouble(lo_);
  for (int i = 0; i < 60 && toDouble(hi_) - toDouble(lo_) > 1e-15 * (1 + std::abs(toDouble(lo_))); ++i)
    refine();
  return toDouble((lo_ + hi_) / 2);
}

std::string RealRoot::str() const {
  if (rational_) return lo_.str();
  // (-p +- sqrt(p^2 - 4q)) / 2
  const Rational disc = p_ * p_ - 4 * q_;
  return "(" + Rational(-p_).str() + (larger_ ? " + " : " - ") + "sqrt(" + disc.str() + "))/2";
}

int compare(const RealRoot& a, const RealRoot& b) {
  if (a.isRational()) return -b.compare(a.lower());
  if (b.isRational()) return a.compare(b.lower());
  if (a.p_ == b.p_ && a.q_ == b.q_ && a.larger_ == b.larger_) return 0;
  for (;;) {
    if (a.hi_ <= b.lo_) return -1;
    if (b.hi_ <= a.lo_) return 1;
    a.refine();
    b.refine();
  }
}

std::vector<RealRoot> realRoots(const QuadraticForm<Rational>& form) {
  if (form.dim() != 1) throw std::invalid_argument("realRoots: form must be univariate");
  if (form.isZero()) throw std::invalid_argument("realRoots: zero form");
  const Rational& a = form.P(0, 0);
  const Rational& b = form.r[0];
  const Rational& c = form.s0;
  std::vector<RealRoot> roots;
  if (a.sign() == 0) {
    if (b.sign() != 0) roots.push_back(RealRoot::rational(-c / b));
    return roots;
  }
  const Rational p = b / a;
  const Rational q = c / a;
  const Rational disc = p * p - 4 * q;
  if (disc.sign() < 0) return roots;
  if (disc.sign() == 0) {
    roots.push_back(RealRoot::rational(-p / 2));
    return roots;
  }
  Integer sn, sd;
  if (isSquare(Integer(numerator(disc)), sn) && isSquare(Integer(denominator(disc)), sd)) {
    const Rational root(sn, sd);
    roots.push_back(RealRoot::rational((-p - root) / 2));
    roots.push_back(RealRoot::rational((-p + root) / 2));
    return roots;
  }
  roots.push_back(RealRoot::quadratic(p, q, false));
  roots.push_back(RealRoot::quadratic(p, q, true));
  return roots;
}

Rational rationalBelow(const RealRoot& a) { return simplestBetween(a.lower() - 1, a.lower()); }
Rational rationalAbove(const RealRoot& a) { return simplestBetween(a.upper(), a.upper() + 1); }

Rational rationalBetween(const RealRoot& a, const RealRoot& b) {
  for (;;) {
    if (a.upper() < b.lower()) return simplestBetween(a.upper(), b.lower());
    if (compare(a, b) >= 0) throw std::invalid_argument("rationalBetween: requires a < b");
    a.refine();
    b.refine();
  }
}

Sweep sweepRoots(std::vector<RealRoot> roots) {
  std::sort(roots.begin(), roots.end(), [](const RealRoot& x, const RealRoot& y) { return compare(x, y) < 0; });
  Sweep sweep;
  for (auto& r : roots)
    if (sweep.breakpoints.empty() || compare(sweep.breakpoints.back(), r) != 0)
      sweep.breakpoints.push_back(std::move(r));
  if (sweep.breakpoints.empty()) {
    sweep.witnesses.emplace_back(0);
    return sweep;
  }
  sweep.witnesses.push_back(rationalBelow(sweep.breakpoints.front()));
  for (std::size_t i = 0; i + 1 < sweep.breakpoints.size(); ++i)
    sweep.witnesses.push_back(rationalBetween(sweep.breakpoints[i], sweep.breakpoints[i + 1]));
  sweep.witnesses.push_back(rationalAbove(sweep.breakpoints.back()));
  return sweep;
}

Sweep sweep1D(std::span<const QuadraticForm<Rational>> differences) {
  std::vector<RealRoot> roots;
  for (const auto& d : differences)
    for (auto& r : realRoots(d)) roots.push_back(std::move(r));
  return sweepRoots(std::move(roots));
}

}  // namespace subsel
