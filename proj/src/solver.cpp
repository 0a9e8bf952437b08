#include "subsel/solver.hpp"

#include "subsel/lp.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace subsel {

std::vector<ReducedProblem> reduce(const Instance& instance) {
  const int k = static_cast<int>(instance.couplingCount());
  if (k > 24) throw InputError("too many coupling columns: " + std::to_string(k));
  const int n = static_cast<int>(instance.blockColumnCount());
  std::vector<ReducedProblem> out;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const int size = std::popcount(mask);
    if (size > instance.sigma) continue;
    ReducedProblem rp;
    rp.blocks = instance.blocks;
    rp.b = instance.b;
    if (instance.intercept) {
      rp.lambdaCols.push_back(*instance.intercept);
      rp.liftMap.push_back({LambdaSource::Kind::Intercept, -1});
    }
    for (int l = 0; l < k; ++l)
      if (mask & (1u << l)) {
        rp.couplingSubset.push_back(l);
        rp.lambdaCols.push_back(instance.coupling[static_cast<std::size_t>(l)]);
        rp.liftMap.push_back({LambdaSource::Kind::Coupling, l});
      }
    rp.sigmaPrime = std::min(instance.sigma - size, n);
    out.push_back(std::move(rp));
  }
  return out;
}

std::string describeSubset(const std::vector<int>& couplingSubset) {
  std::string out = "L={";
  for (std::size_t i = 0; i < couplingSubset.size(); ++i)
    out += (i ? "," : "") + std::to_string(couplingSubset[i] + 1);
  return out + "}";
}

bool CellRecord::containsLambda(const RatVector& lambda) const {
  switch (space) {
    case Space::Lambda:
      return std::all_of(constraints.begin(), constraints.end(),
                         [&](const auto& f) { return f(lambda).sign() >= 0; });
    case Space::Extended: {
      const RatVector point = ext(lambda);
      return std::all_of(constraints.begin(), constraints.end(),
                         [&](const auto& f) { return f(point).sign() >= 0; });
    }
    case Space::Interval:
      if (lambda.size() != 1) throw std::invalid_argument("CellRecord: interval needs one lambda");
      return (!lower || lower->compare(lambda[0]) <= 0) && (!upper || upper->compare(lambda[0]) >= 0);
  }
  return false;
}

namespace {

void combinations(int n, int j, int start, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == j) {
    out.push_back(current);
    return;
  }
  for (int c = start; c <= n - (j - static_cast<int>(current.size())); ++c) {
    current.push_back(c);
    combinations(n, j, c + 1, current, out);
    current.pop_back();
  }
}

// Every support of every cardinality of one block, with its residual form.
struct BlockData {
  std::vector<std::vector<std::vector<int>>> supports;  // [j][s]
  std::vector<std::vector<QuadraticForm<Rational>>> forms;
  std::vector<std::vector<LinearFunctional<Rational>>> linear;
};

std::vector<BlockData> blockData(const ReducedProblem& rp) {
  const auto bs = rp.bByBlock();
  const auto cs = rp.lambdaMatrixByBlock();
  std::vector<BlockData> out(rp.blocks.size());
  for (std::size_t i = 0; i < rp.blocks.size(); ++i) {
    const int n = static_cast<int>(rp.blocks[i].cols());
    auto& d = out[i];
    for (int j = 0; j <= n; ++j) {
      std::vector<int> current;
      auto& supports = d.supports.emplace_back();
      combinations(n, j, 0, current, supports);
      auto& forms = d.forms.emplace_back();
      auto& linear = d.linear.emplace_back();
      for (const auto& s : supports) {
        forms.push_back(residualQuadratic<Rational>(rp.blocks[i], bs[i], cs[i], s));
        linear.push_back(linearize(forms.back()));
      }
    }
  }
  return out;
}

std::vector<int> blockOffsets(const ReducedProblem& rp) {
  std::vector<int> offsets;
  int offset = 0;
  for (const auto& block : rp.blocks) {
    offsets.push_back(offset);
    offset += static_cast<int>(block.cols());
  }
  return offsets;
}

// Index of the chosen support of each cardinality, per block.
using Choice = std::vector<std::vector<std::size_t>>;

// valueOf(i, j, s): the value of support s of size j in block i at the witness.
template <typename ValueOf>
Choice chooseSupports(const std::vector<BlockData>& data, ValueOf valueOf) {
  Choice choice(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < data[i].supports.size(); ++j) {
      std::size_t best = 0;
      Rational bestValue = valueOf(i, j, 0);
      for (std::size_t s = 1; s < data[i].supports[j].size(); ++s) {
        Rational value = valueOf(i, j, s);
        if (value < bestValue) {
          best = s;
          bestValue = std::move(value);
        }
      }
      choice[i].push_back(best);
    }
  return choice;
}

template <typename ValueOf>
ValTable tableFor(const std::vector<BlockData>& data, const Choice& choice, ValueOf valueOf) {
  std::vector<std::vector<Rational>> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < choice[i].size(); ++j) values[i].push_back(valueOf(i, j, choice[i][j]));
  return ValTable(std::move(values));
}

SupportTable toSupportTable(const std::vector<BlockData>& data, const Choice& choice) {
  SupportTable table;
  table.upsilon.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < choice[i].size(); ++j)
      table.upsilon[i].push_back(data[i].supports[j][choice[i][j]]);
  return table;
}

std::vector<int> expand(const std::vector<BlockData>& data, const Choice& choice,
                        const std::vector<int>& offsets, const AllocationVector& allocation) {
  std::vector<int> chi;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto j = static_cast<std::size_t>(allocation[i]);
    for (int c : data[i].supports[j][choice[i][j]]) chi.push_back(offsets[i] + c);
  }
  return chi;
}

// The symbolic d of a pattern under the chosen supports. formOf(i, j, s)
// returns the block form (quadratic on the lambda line, linear in S).
template <typename Form, typename FormOf>
Form deltaForm(const DeltaPattern& pattern, const Choice& choice, FormOf formOf, const Form& zero) {
  Form form = zero;
  for (const auto& [i, oldValue, newValue] : pattern.changes()) {
    const auto bi = static_cast<std::size_t>(i);
    form += formOf(bi, static_cast<std::size_t>(newValue), choice[bi][static_cast<std::size_t>(newValue)]);
    form -= formOf(bi, static_cast<std::size_t>(oldValue), choice[bi][static_cast<std::size_t>(oldValue)]);
  }
  return form;
}

// Differences d(other) - d(chosen) for every comparison the chain made.
template <typename Form, typename FormOf>
std::vector<Form> usedDifferences(const std::vector<ChainStep>& trace, const Choice& choice,
                                  FormOf formOf, const Form& zero) {
  std::vector<Form> out;
  for (const auto& step : trace) {
    const Form chosen = deltaForm(step.candidates[step.chosen].pattern, choice, formOf, zero);
    for (std::size_t c = 0; c < step.candidates.size(); ++c) {
      if (c == step.chosen) continue;
      Form g = deltaForm(step.candidates[c].pattern, choice, formOf, zero);
      g -= chosen;
      if (!g.isZero()) out.push_back(std::move(g));
    }
  }
  return out;
}

std::string constraintKey(const LinearFunctional<Rational>& f) {
  std::string key = f.constant.str();
  for (Index j = 0; j < f.dim(); ++j) key += ',' + f.coeffs[j].str();
  return key;
}

std::string formKey(const LinearFunctional<Rational>& f) { return constraintKey(f); }
std::string formKey(const QuadraticForm<Rational>& q) { return constraintKey(linearize(q)); }

// Differences between every two members of the symbolic D set.
template <typename Form, typename FormOf>
std::vector<Form> allDifferences(const BlockStructure& structure, const Choice& choice, FormOf formOf,
                                 const Form& zero, std::size_t& dSize) {
  std::vector<Form> members;
  std::set<std::string> seen;
  for (const auto& pattern : enumerateDeltaPatterns(structure)) {
    Form form = deltaForm(pattern, choice, formOf, zero);
    if (seen.insert(formKey(form)).second) members.push_back(std::move(form));
  }
  dSize = members.size();
  std::vector<Form> out;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      Form g = members[a];
      g -= members[b];
      if (!g.isZero()) out.push_back(std::move(g));
    }
  return out;
}

void checkRegions(std::size_t count, const ArrangementOptions& options) {
  if (count > options.maxCells)
    throw BudgetExceeded("refinement has more than " + std::to_string(options.maxCells) +
                         " regions (raise --max-cells)");
}

std::string supportText(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i] + 1);
  return out + "}";
}

struct ExtendedTables {
  std::vector<Hyperplane> hyperplanes;
  std::vector<std::size_t> blockHyperplanes;
  std::vector<Cell> cells;
  std::vector<Choice> choices;
};

ExtendedTables extendedTables(const std::vector<BlockData>& data, Index k,
                              const ArrangementOptions& options) {
  ExtendedTables out;
  std::vector<Hyperplane> raw;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < data[i].linear.size(); ++j)
      for (std::size_t s = 0; s < data[i].linear[j].size(); ++s)
        for (std::size_t t = s + 1; t < data[i].linear[j].size(); ++t) {
          auto g = data[i].linear[j][s] - data[i].linear[j][t];
          if (g.isConstant()) continue;
          ++count;
          raw.push_back({std::move(g), "block " + std::to_string(i + 1) + ": " +
                                           supportText(data[i].supports[j][s]) + " vs " +
                                           supportText(data[i].supports[j][t])});
        }
    out.blockHyperplanes.push_back(count);
  }
  out.hyperplanes = mergeHyperplanes(raw).unique;
  out.cells = enumerateCells(out.hyperplanes, extendedDim(k), options);
  for (const auto& cell : out.cells)
    out.choices.push_back(chooseSupports(data, [&](std::size_t i, std::size_t j, std::size_t s) {
      return data[i].linear[j][s](cell.witness);
    }));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ReducedSolution finish(const CandidateSet& candidates, const ReducedProblem& rp) {
  if (candidates.empty()) throw std::invalid_argument("finish: empty candidate set");
  const Index m = rp.b.size();
  const Index n = rp.blockColumnCount();
  const Index k = rp.lambdaDim();
  RatMatrix A = RatMatrix::Zero(m, n);
  Index row = 0;
  Index col = 0;
  for (const auto& block : rp.blocks) {
    A.block(row, col, block.rows(), block.cols()) = block;
    row += block.rows();
    col += block.cols();
  }
  const RatMatrix C = rp.lambdaMatrix();

  std::optional<ReducedSolution> best;
  for (const auto& chi : candidates) {
    const Index width = static_cast<Index>(chi.size());
    RatMatrix M(m, width + k);
    for (Index c = 0; c < width; ++c) M.col(c) = A.col(chi[static_cast<std::size_t>(c)]);
    if (k > 0) M.rightCols(k) = C;
    auto ls = leastSquares<Rational>(M, rp.b);
    if (best && !(ls.res2 < best->objective)) continue;
    ReducedSolution s;
    s.support = chi;
    s.x = RatVector::Zero(n);
    for (Index c = 0; c < width; ++c) s.x[chi[static_cast<std::size_t>(c)]] = ls.x[c];
    s.lambda = ls.x.tail(k);
    s.objective = std::move(ls.res2);
    best = std::move(s);
  }
  return *best;
}

Rational supportValueAt(const ReducedProblem& rp, const std::vector<int>& support,
                        const RatVector& lambda) {
  const auto bs = rp.bByBlock();
  const auto cs = rp.lambdaMatrixByBlock();
  const auto offsets = blockOffsets(rp);
  Rational total = 0;
  for (std::size_t i = 0; i < rp.blocks.size(); ++i) {
    std::vector<int> local;
    for (int c : support)
      if (c >= offsets[i] && c < offsets[i] + rp.blocks[i].cols()) local.push_back(c - offsets[i]);
    total += evalForm(residualQuadratic<Rational>(rp.blocks[i], bs[i], cs[i], local), lambda);
  }
  return total;
}

SubproblemResult solveDiagonal(const ReducedProblem& rp, const SolveOptions& options) {
  if (!rp.isDiagonal()) throw std::invalid_argument("solveDiagonal: every block must be 1 x 1");
  const Index n = rp.blockCount();
  const Index k = rp.lambdaDim();
  const RatMatrix C = rp.lambdaMatrix();

  // b'_i(lambda) = b_i - c_i . lambda as an affine functional on lambda space.
  std::vector<LinearFunctional<Rational>> bPrime;
  std::vector<int> active;
  for (Index i = 0; i < n; ++i) {
    bPrime.push_back(LinearFunctional<Rational>{-C.row(i).transpose(), rp.b[i]});
    if (rp.blocks[static_cast<std::size_t>(i)](0, 0).sign() != 0) active.push_back(static_cast<int>(i));
  }

  std::vector<Hyperplane> raw;
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t c = a + 1; c < active.size(); ++c) {
      const auto& fi = bPrime[static_cast<std::size_t>(active[a])];
      const auto& fj = bPrime[static_cast<std::size_t>(active[c])];
      const std::string pair = std::to_string(active[a] + 1) + "," + std::to_string(active[c] + 1);
      for (auto [f, tag] : {std::pair{fi, "b'_i = 0"}, std::pair{fj, "b'_j = 0"},
                            std::pair{fi - fj, "b'_i = b'_j"}, std::pair{fi + fj, "b'_i = -b'_j"}})
        if (!f.isConstant()) raw.push_back({f, std::string(tag) + " (" + pair + ")"});
    }
  const auto hyperplanes = mergeHyperplanes(raw).unique;
  const auto cells = enumerateCells(hyperplanes, k, options.arrangement);

  SubproblemResult result;
  auto& report = result.report;
  report.couplingSubset = rp.couplingSubset;
  report.lambdaDim = static_cast<int>(k);
  report.sigmaPrime = rp.sigmaPrime;
  report.method = "diagonal";
  report.hyperplanes = hyperplanes.size();
  report.baseCells = report.refinedCells = cells.size();

  const std::size_t keep = std::min(static_cast<std::size_t>(rp.sigmaPrime), active.size());
  for (const auto& cell : cells) {
    std::vector<Rational> magnitude(static_cast<std::size_t>(n));
    for (int i : active) magnitude[static_cast<std::size_t>(i)] = abs(bPrime[static_cast<std::size_t>(i)](cell.witness));
    std::vector<int> order = active;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return magnitude[static_cast<std::size_t>(x)] > magnitude[static_cast<std::size_t>(y)];
    });
    std::vector<int> chi(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(chi.begin(), chi.end());
    if (options.recordCells) {
      CellRecord record;
      record.space = CellRecord::Space::Lambda;
      for (std::size_t h = 0; h < hyperplanes.size(); ++h)
        record.constraints.push_back(cell.signs[h] == Sign::Positive ? hyperplanes[h].functional
                                                                     : -hyperplanes[h].functional);
      record.witness = cell.witness;
      record.candidate = chi;
      report.cells.push_back(std::move(record));
    }
    result.candidates.insert(std::move(chi));
  }
  report.candidates = result.candidates.size();
  result.best = finish(result.candidates, rp);
  return result;
}

SupportCells buildSupportTables(const ReducedProblem& rp, const ArrangementOptions& options) {
  const auto data = blockData(rp);
  auto tables = extendedTables(data, rp.lambdaDim(), options);
  SupportCells out;
  out.dim = extendedDim(rp.lambdaDim());
  out.hyperplanes = std::move(tables.hyperplanes);
  out.blockHyperplanes = std::move(tables.blockHyperplanes);
  out.cells = std::move(tables.cells);
  for (const auto& choice : tables.choices) out.tables.push_back(toSupportTable(data, choice));
  return out;
}

namespace {

class BlockSolver {
 public:
  BlockSolver(const ReducedProblem& rp, const SolveOptions& options)
      : rp_(rp),
        options_(options),
        data_(blockData(rp)),
        offsets_(blockOffsets(rp)),
        structure_(BlockStructure::fromSizes(rp.columnSizes())),
        k_(rp.lambdaDim()) {
    result_.report.couplingSubset = rp.couplingSubset;
    result_.report.lambdaDim = static_cast<int>(k_);
    result_.report.sigmaPrime = rp.sigmaPrime;
  }

  SubproblemResult run() {
    if (k_ == 0)
      runNumeric();
    else if (k_ == 1 && options_.lineSweep)
      runLine();
    else
      runExtended();
    auto& report = result_.report;
    report.candidates = result_.candidates.size();
    result_.best = finish(result_.candidates, rp_);
    return std::move(result_);
  }

 private:
  void addLeaf(CellRecord record) {
    ++result_.report.refinedCells;
    checkRegions(result_.report.refinedCells, options_.arrangement);
    result_.candidates.insert(record.candidate);
    if (options_.recordCells) result_.report.cells.push_back(std::move(record));
  }

  // Numeric values of each support at a lambda-line or S witness.
  auto lineValue(const RatVector& w) const {
    return [this, &w](std::size_t i, std::size_t j, std::size_t s) {
      return evalForm(data_[i].forms[j][s], w);
    };
  }
  auto extendedValue(const RatVector& w) const {
    return [this, &w](std::size_t i, std::size_t j, std::size_t s) { return data_[i].linear[j][s](w); };
  }
  auto quadraticOf() const {
    return [this](std::size_t i, std::size_t j, std::size_t s) -> const QuadraticForm<Rational>& {
      return data_[i].forms[j][s];
    };
  }
  auto linearOf() const {
    return [this](std::size_t i, std::size_t j, std::size_t s) -> const LinearFunctional<Rational>& {
      return data_[i].linear[j][s];
    };
  }

  AllocationResult chain(const ValTable& table, std::vector<ChainStep>* trace) const {
    return chainSolve(table, rp_.sigmaPrime, valueThenSuccessor, trace);
  }

  void runNumeric() {
    result_.report.method = "block-numeric";
    const RatVector none(0);
    const Choice choice = chooseSupports(data_, lineValue(none));
    const auto allocation = chain(tableFor(data_, choice, lineValue(none)), nullptr);
    result_.report.baseCells = 1;
    CellRecord record;
    record.space = CellRecord::Space::Lambda;
    record.witness = none;
    record.candidate = expand(data_, choice, offsets_, allocation.j);
    addLeaf(std::move(record));
  }

  // ---- one lambda: intervals of the lambda line -------------------------

  struct Interval {
    std::optional<RealRoot> lo, hi;
    Rational witness;
  };

  static RatVector pointOnLine(const Rational& y) {
    RatVector w(1);
    w[0] = y;
    return w;
  }

  bool inside(const Interval& span, const RealRoot& r) const {
    return (!span.lo || compare(*span.lo, r) < 0) && (!span.hi || compare(r, *span.hi) < 0);
  }

  std::vector<Interval> split(const Interval& span, const std::vector<QuadraticForm<Rational>>& diffs) const {
    std::vector<RealRoot> roots;
    for (const auto& g : diffs)
      for (auto& r : realRoots(g))
        if (inside(span, r)) roots.push_back(std::move(r));
    if (roots.empty()) return {};
    const Sweep sweep = sweepRoots(std::move(roots));
    const auto& bp = sweep.breakpoints;
    std::vector<Interval> parts;
    parts.push_back({span.lo, bp.front(), span.lo ? rationalBetween(*span.lo, bp.front()) : rationalBelow(bp.front())});
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) parts.push_back({bp[i], bp[i + 1], sweep.witnesses[i + 1]});
    parts.push_back({bp.back(), span.hi, span.hi ? rationalBetween(bp.back(), *span.hi) : rationalAbove(bp.back())});
    return parts;
  }

  void runLine() {
    result_.report.method = "block-sweep";
    std::vector<QuadraticForm<Rational>> diffs;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      std::size_t count = 0;
      for (const auto& forms : data_[i].forms)
        for (std::size_t s = 0; s < forms.size(); ++s)
          for (std::size_t t = s + 1; t < forms.size(); ++t) {
            auto g = forms[s] - forms[t];
            if (g.isZero()) continue;
            ++count;
            diffs.push_back(std::move(g));
          }
      result_.report.blockHyperplanes.push_back(count);
    }
    const Sweep base = sweep1D(diffs);
    result_.report.hyperplanes = base.breakpoints.size();
    result_.report.baseCells = base.witnesses.size();
    const auto zero = QuadraticForm<Rational>::zero(1);

    for (std::size_t c = 0; c < base.witnesses.size(); ++c) {
      Interval cell{c > 0 ? std::optional<RealRoot>(base.breakpoints[c - 1]) : std::nullopt,
                    c < base.breakpoints.size() ? std::optional<RealRoot>(base.breakpoints[c]) : std::nullopt,
                    base.witnesses[c]};
      const Choice choice = chooseSupports(data_, lineValue(pointOnLine(cell.witness)));

      if (options_.refinement == SolveOptions::Refinement::Full) {
        std::size_t dSize = 0;
        auto parts = split(cell, allDifferences(structure_, choice, quadraticOf(), zero, dSize));
        result_.report.maxD = std::max(result_.report.maxD, dSize);
        if (parts.empty()) parts.push_back(cell);
        for (auto& part : parts) leafOnLine(part, choice, nullptr);
        continue;
      }
      std::vector<Interval> stack{std::move(cell)};
      while (!stack.empty()) {
        Interval span = std::move(stack.back());
        stack.pop_back();
        std::vector<QuadraticForm<Rational>> used;
        leafOnLine(span, choice, &used);
        if (used.empty()) continue;
        for (auto& part : split(span, used)) stack.push_back(std::move(part));
        checkRegions(result_.report.refinedCells + stack.size(), options_.arrangement);
      }
    }
  }

  // Runs the chain at the interval witness. With `used`, a split is pending
  // when some used comparison changes sign inside the interval: the
  // comparisons are returned instead of recording a leaf.
  void leafOnLine(const Interval& span, const Choice& choice, std::vector<QuadraticForm<Rational>>* used) {
    const RatVector w = pointOnLine(span.witness);
    std::vector<ChainStep> trace;
    const auto allocation = chain(tableFor(data_, choice, lineValue(w)), used ? &trace : nullptr);
    if (used) {
      auto diffs = usedDifferences(trace, choice, quadraticOf(), QuadraticForm<Rational>::zero(1));
      bool splits = false;
      for (const auto& g : diffs) {
        for (const auto& r : realRoots(g))
          if (inside(span, r)) splits = true;
        if (splits) break;
      }
      if (splits) {
        *used = std::move(diffs);
        return;
      }
      used->clear();
    }
    CellRecord record;
    record.space = CellRecord::Space::Interval;
    record.lower = span.lo;
    record.upper = span.hi;
    record.witness = w;
    record.candidate = expand(data_, choice, offsets_, allocation.j);
    addLeaf(std::move(record));
  }

  // ---- general: cells of the extended space S ---------------------------

  struct Region {
    std::vector<LinearFunctional<Rational>> constraints;
    RatVector witness;
  };

  void recordExtended(const Region& region, const Choice& choice, const AllocationVector& j) {
    CellRecord record;
    record.space = CellRecord::Space::Extended;
    record.constraints = region.constraints;
    record.witness = region.witness;
    record.candidate = expand(data_, choice, offsets_, j);
    addLeaf(std::move(record));
  }

  void runExtended() {
    result_.report.method = "block-extended";
    const auto tables = extendedTables(data_, k_, options_.arrangement);
    result_.report.hyperplanes = tables.hyperplanes.size();
    result_.report.blockHyperplanes = tables.blockHyperplanes;
    result_.report.baseCells = tables.cells.size();
    const Index dim = extendedDim(k_);
    const auto zero = LinearFunctional<Rational>::zero(dim);

    for (std::size_t c = 0; c < tables.cells.size(); ++c) {
      const auto& cell = tables.cells[c];
      const auto& choice = tables.choices[c];
      Region base;
      for (std::size_t h = 0; h < tables.hyperplanes.size(); ++h)
        base.constraints.push_back(cell.signs[h] == Sign::Positive ? tables.hyperplanes[h].functional
                                                                    : -tables.hyperplanes[h].functional);
      base.witness = cell.witness;

      if (options_.refinement == SolveOptions::Refinement::Full) {
        std::size_t dSize = 0;
        std::vector<Hyperplane> raw;
        for (auto& g : allDifferences(structure_, choice, linearOf(), zero, dSize))
          if (!g.isConstant()) raw.push_back({std::move(g), "d comparison"});
        result_.report.maxD = std::max(result_.report.maxD, dSize);
        const auto hyperplanes = mergeHyperplanes(raw).unique;
        for (const auto& sub : enumerateCells(hyperplanes, dim, options_.arrangement, base.constraints)) {
          Region region{base.constraints, sub.witness};
          for (std::size_t h = 0; h < hyperplanes.size(); ++h)
            region.constraints.push_back(sub.signs[h] == Sign::Positive ? hyperplanes[h].functional
                                                                         : -hyperplanes[h].functional);
          const auto allocation = chain(tableFor(data_, choice, extendedValue(region.witness)), nullptr);
          recordExtended(region, choice, allocation.j);
        }
        continue;
      }

      std::vector<Region> stack{std::move(base)};
      while (!stack.empty()) {
        Region region = std::move(stack.back());
        stack.pop_back();
        refine(std::move(region), choice, zero, stack);
        checkRegions(result_.report.refinedCells + stack.size(), options_.arrangement);
      }
    }
  }

  // Walks the chain at the witness and adds each comparison it made to the
  // region, pushing the opposite side when that side is full-dimensional.
  void refine(Region region, const Choice& choice, const LinearFunctional<Rational>& zero,
              std::vector<Region>& stack) {
    std::vector<ChainStep> trace;
    const auto allocation = chain(tableFor(data_, choice, extendedValue(region.witness)), &trace);
    std::unordered_set<std::string> known;
    for (const auto& f : region.constraints) known.insert(constraintKey(f));
    for (auto& raw : usedDifferences(trace, choice, linearOf(), zero)) {
      if (raw.isConstant()) continue;
      auto g = primitive(raw);
      const std::string key = constraintKey(g);
      if (known.contains(key)) continue;
      const int side = g(region.witness).sign();
      if (side == 0) {
        for (const auto& half : {g, -g}) {
          auto constraints = region.constraints;
          constraints.push_back(half);
          auto interior = findInteriorPoint(constraints, zero.dim());
          if (interior.fullDimensional) stack.push_back({std::move(constraints), std::move(interior.point)});
        }
        return;
      }
      // The chain chose the minimum, so g is positive at the witness.
      auto constraints = region.constraints;
      constraints.push_back(-g);
      auto interior = findInteriorPoint(constraints, zero.dim());
      if (interior.fullDimensional) stack.push_back({std::move(constraints), std::move(interior.point)});
      region.constraints.push_back(std::move(g));
      known.insert(key);
    }
    recordExtended(region, choice, allocation.j);
  }

  const ReducedProblem& rp_;
  const SolveOptions& options_;
  std::vector<BlockData> data_;
  std::vector<int> offsets_;
  BlockStructure structure_;
  Index k_;
  SubproblemResult result_;
};

}  // namespace

SubproblemResult solveBlock(const ReducedProblem& rp, const SolveOptions& options) {
  return BlockSolver(rp, options).run();
}

Solution lift(const Instance& instance, const ReducedProblem& rp, const ReducedSolution& reduced) {
  const Index n = instance.blockColumnCount();
  Solution s;
  s.x = RatVector::Zero(instance.variableCount());
  s.x.head(n) = reduced.x;
  s.mu = 0;
  for (std::size_t t = 0; t < rp.liftMap.size(); ++t) {
    const auto& source = rp.liftMap[t];
    const Rational& value = reduced.lambda[static_cast<Index>(t)];
    if (source.kind == LambdaSource::Kind::Intercept)
      s.mu = value;
    else
      s.x[n + source.coupling] = value;
  }
  s.objective = reduced.objective;
  return s;
}

SolveResult solveDetailed(const Instance& instance, const SolveOptions& options) {
  if (const auto violations = validate(instance); !violations.empty()) throw InputError(violations.front());
  SolveResult out;
  std::optional<Solution> best;
  const auto problems = reduce(instance);
  for (std::size_t p = 0; p < problems.size(); ++p) {
    const auto& rp = problems[p];
    SubproblemResult sub;
    try {
      bool diagonal = false;
      switch (options.algorithm) {
        case SolveOptions::Algorithm::Auto: diagonal = rp.isDiagonal(); break;
        case SolveOptions::Algorithm::Diagonal: diagonal = true; break;
        case SolveOptions::Algorithm::Block: diagonal = false; break;
      }
      sub = diagonal ? solveDiagonal(rp, options) : solveBlock(rp, options);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(e.what(), "subproblem " + describeSubset(rp.couplingSubset));
    }
    out.candidateCount += sub.candidates.size();
    if (!best || sub.best.objective < best->objective) {
      best = lift(instance, rp, sub.best);
      out.bestSubproblem = p;
    }
    out.subproblems.push_back(std::move(sub.report));
  }
  out.solution = std::move(*best);
  return out;
}

}  // namespace subsel
