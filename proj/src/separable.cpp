#include "subsel/separable.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace subsel {

ValTable::ValTable(std::vector<std::vector<Rational>> values) : values_(std::move(values)) {
  for (const auto& row : values_)
    if (row.size() < 2) throw std::invalid_argument("ValTable: every block needs n_i >= 1");
}

BlockStructure ValTable::structure() const {
  std::vector<int> sizes;
  for (std::size_t i = 0; i < values_.size(); ++i) sizes.push_back(columns(i));
  return BlockStructure::fromSizes(std::move(sizes));
}

Rational ValTable::total(const AllocationVector& j) const {
  if (j.size() != values_.size()) throw std::invalid_argument("ValTable::total: size mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < j.size(); ++i) sum += (*this)(i, j[i]);
  return sum;
}

DiagGreedyResult diagGreedy(std::span<const Rational> aDiag, std::span<const Rational> bPrime,
                            int sigma) {
  if (aDiag.size() != bPrime.size()) throw std::invalid_argument("diagGreedy: length mismatch");
  if (sigma < 0) throw std::invalid_argument("diagGreedy: negative sigma");
  std::vector<int> usable;
  for (std::size_t j = 0; j < aDiag.size(); ++j)
    if (aDiag[j].sign() != 0) usable.push_back(static_cast<int>(j));
  std::stable_sort(usable.begin(), usable.end(), [&](int a, int b) {
    return abs(bPrime[static_cast<std::size_t>(a)]) > abs(bPrime[static_cast<std::size_t>(b)]);
  });
  const std::size_t keep = std::min(static_cast<std::size_t>(sigma), usable.size());

  DiagGreedyResult result;
  result.K.assign(usable.begin(), usable.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(result.K.begin(), result.K.end());
  result.x = RatVector::Zero(static_cast<Index>(aDiag.size()));
  std::vector<bool> inK(aDiag.size(), false);
  for (int j : result.K) {
    inK[static_cast<std::size_t>(j)] = true;
    result.x[j] = bPrime[static_cast<std::size_t>(j)] / aDiag[static_cast<std::size_t>(j)];
  }
  result.objective = 0;
  for (std::size_t j = 0; j < aDiag.size(); ++j)
    if (!inK[j]) result.objective += bPrime[j] * bPrime[j];
  return result;
}

std::optional<int> qCloseness(const AllocationVector& current, const AllocationVector& next) {
  if (current.size() != next.size() || next.sum() != current.sum() + 1) return std::nullopt;
  int minus = 0;
  int plus = 0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (next[i] < current[i]) minus += current[i] - next[i];
    if (next[i] > current[i]) plus += next[i] - current[i];
  }
  if (plus != minus + 1) return std::nullopt;
  return minus;
}

DeltaPattern DeltaPattern::between(const AllocationVector& from, const AllocationVector& to) {
  const auto q = qCloseness(from, to);
  if (!q)
    throw std::invalid_argument("allocation " + toString(to) + " is not a successor of " +
                                toString(from));
  DeltaPattern p{from, to, {}, {}, *q};
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (to[i] > from[i]) p.iPlus.push_back(static_cast<int>(i));
    if (to[i] < from[i]) p.iMinus.push_back(static_cast<int>(i));
  }
  return p;
}

std::vector<std::array<int, 3>> DeltaPattern::changes() const {
  std::vector<std::array<int, 3>> out;
  for (std::size_t i = 0; i < from.size(); ++i)
    if (from[i] != to[i]) out.push_back({static_cast<int>(i), from[i], to[i]});
  return out;
}

namespace {

// Block-by-block generation of successors: each block moves by delta, the
// positive moves sum to plus, the negative ones to minus; a successor needs
// plus == minus + 1 and minus <= thetaBar.
void generateSuccessors(const AllocationVector& current, const BlockStructure& s, std::size_t i,
                        int plus, int minus, std::vector<int>& next,
                        std::vector<AllocationVector>& out) {
  const std::size_t h = current.size();
  if (i == h) {
    if (plus == minus + 1) out.emplace_back(next);
    return;
  }
  const int lo = -std::min(current[i], s.thetaBar - minus);
  const int hi = std::min(s.nVec[i] - current[i], s.thetaBar + 1 - plus);
  for (int delta = lo; delta <= hi; ++delta) {
    next[i] = current[i] + delta;
    generateSuccessors(current, s, i + 1, plus + std::max(delta, 0), minus + std::max(-delta, 0),
                       next, out);
  }
}

// Restricted patterns: each block is unchanged or moves from `old` to `new`.
void generatePatterns(const BlockStructure& s, std::size_t i, int plus, int minus,
                      std::vector<int>& from, std::vector<int>& to,
                      std::vector<DeltaPattern>& out) {
  const std::size_t h = s.nVec.size();
  if (i == h) {
    if (plus == minus + 1)
      out.push_back(DeltaPattern::between(AllocationVector(from), AllocationVector(to)));
    return;
  }
  from[i] = to[i] = 0;
  generatePatterns(s, i + 1, plus, minus, from, to, out);
  for (int oldValue = 0; oldValue <= s.nVec[i]; ++oldValue)
    for (int newValue = 0; newValue <= s.nVec[i]; ++newValue) {
      if (oldValue == newValue) continue;
      const int up = std::max(newValue - oldValue, 0);
      const int down = std::max(oldValue - newValue, 0);
      if (plus + up > s.thetaBar + 1 || minus + down > s.thetaBar) continue;
      from[i] = oldValue;
      to[i] = newValue;
      generatePatterns(s, i + 1, plus + up, minus + down, from, to, out);
    }
  from[i] = to[i] = 0;
}

std::string formKey(const QuadraticForm<Rational>& q) {
  const auto f = linearize(q);
  std::string key = f.constant.str();
  for (Index c = 0; c < f.dim(); ++c) {
    key += ',';
    key += f.coeffs[c].str();
  }
  return key;
}

}  // namespace

std::vector<AllocationVector> augSet(const AllocationVector& current,
                                     const BlockStructure& structure) {
  if (!structure.feasible(current)) throw std::invalid_argument("augSet: infeasible allocation");
  std::vector<AllocationVector> out;
  std::vector<int> next(current.size(), 0);
  generateSuccessors(current, structure, 0, 0, 0, next, out);
  return out;
}

DeltaExpr<Rational> deltaValue(const AllocationVector& current, const AllocationVector& next,
                               const ValTable& table) {
  const auto structure = table.structure();
  if (!structure.feasible(current) || !structure.feasible(next))
    throw std::invalid_argument("deltaValue: infeasible allocation");
  auto pattern = DeltaPattern::between(current, next);
  if (pattern.q > structure.thetaBar)
    throw std::invalid_argument("deltaValue: " + toString(next) + " is not in aug(" +
                                toString(current) + ")");
  Rational value = 0;
  for (const auto& [i, oldValue, newValue] : pattern.changes())
    value += table(static_cast<std::size_t>(i), newValue) -
             table(static_cast<std::size_t>(i), oldValue);
  return {std::move(pattern), value};
}

std::vector<DeltaPattern> enumerateDeltaPatterns(const BlockStructure& structure) {
  std::vector<DeltaPattern> out;
  std::vector<int> from(structure.nVec.size(), 0);
  std::vector<int> to(structure.nVec.size(), 0);
  generatePatterns(structure, 0, 0, 0, from, to, out);
  return out;
}

std::vector<DeltaExpr<Rational>> buildD(const BlockStructure& structure, const ValTable& table) {
  std::vector<DeltaExpr<Rational>> out;
  std::set<std::pair<std::string, std::vector<std::array<int, 3>>>> seen;
  for (auto& pattern : enumerateDeltaPatterns(structure)) {
    auto expr = deltaValue(pattern.from, pattern.to, table);
    if (seen.emplace(expr.value.str(), expr.pattern.changes()).second) out.push_back(std::move(expr));
  }
  return out;
}

std::vector<DeltaExpr<QuadraticForm<Rational>>> buildD(const BlockStructure& structure,
                                                       const FormTable& forms) {
  if (forms.size() != structure.nVec.size()) throw std::invalid_argument("buildD: form table size");
  std::vector<DeltaExpr<QuadraticForm<Rational>>> out;
  std::set<std::string> seen;
  for (auto& pattern : enumerateDeltaPatterns(structure)) {
    const Index dim = forms.front().front().dim();
    auto form = QuadraticForm<Rational>::zero(dim);
    for (const auto& [i, oldValue, newValue] : pattern.changes()) {
      const auto& row = forms[static_cast<std::size_t>(i)];
      form += row[static_cast<std::size_t>(newValue)];
      form -= row[static_cast<std::size_t>(oldValue)];
    }
    if (seen.insert(formKey(form)).second) out.push_back({std::move(pattern), std::move(form)});
  }
  return out;
}

std::uint64_t weakCompositionCount(int q, int p) {
  if (q < 0 || p < 1) throw std::invalid_argument("weakCompositionCount: need q >= 0, p >= 1");
  // C(q + p - 1, p - 1), built up multiplicatively so every step is exact.
  const int k = std::min(p - 1, q);
  const int n = q + p - 1;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return result;
}

namespace {
Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}
}  // namespace

Integer deltaPatternBound(int h, int theta) {
  const int thetaBar = (theta - 1) * theta * (theta + 1) / 2;
  Integer total = 0;
  for (int q = 0; q <= thetaBar; ++q) {
    Integer power = 1;
    for (int e = 0; e < 2 * q + 1; ++e) power *= theta;
    total += binomial(q + h, q + 1) * binomial(q + h - 1, q) * power;
  }
  return total;
}

bool valueThenSuccessor(const DeltaExpr<Rational>& a, const DeltaExpr<Rational>& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.pattern.to < b.pattern.to;
}

AllocationResult chainSolve(const ValTable& table, int sigma, const DeltaComparator& less,
                            std::vector<ChainStep>* trace) {
  const auto structure = table.structure();
  if (sigma < 0 || sigma > structure.totalColumns())
    throw std::invalid_argument("chainSolve: sigma " + std::to_string(sigma) +
                                " outside 0.." + std::to_string(structure.totalColumns()));
  auto current = AllocationVector::zeros(table.blocks());
  for (int s = 0; s < sigma; ++s) {
    std::vector<DeltaExpr<Rational>> candidates;
    for (const auto& next : augSet(current, structure))
      candidates.push_back(deltaValue(current, next, table));
    if (candidates.empty()) throw std::logic_error("chainSolve: no successor allocation");
    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c)
      if (less(candidates[c], candidates[best])) best = c;
    AllocationVector next = candidates[best].pattern.to;
    if (trace) trace->push_back(ChainStep{current, std::move(candidates), best});
    current = std::move(next);
  }
  return {current, table.total(current)};
}

AllocationResult dpSolve(const ValTable& table, int sigma) {
  const auto structure = table.structure();
  if (sigma < 0 || sigma > structure.totalColumns())
    throw std::invalid_argument("dpSolve: sigma " + std::to_string(sigma) + " outside 0.." +
                                std::to_string(structure.totalColumns()));
  const std::size_t h = table.blocks();
  // best[i][s]: optimum over blocks 0..i-1 using exactly s columns.
  std::vector<std::vector<std::optional<Rational>>> best(
      h + 1, std::vector<std::optional<Rational>>(static_cast<std::size_t>(sigma) + 1));
  std::vector<std::vector<int>> choice(h + 1, std::vector<int>(static_cast<std::size_t>(sigma) + 1, 0));
  best[0][0] = Rational(0);
  for (std::size_t i = 1; i <= h; ++i)
    for (int s = 0; s <= sigma; ++s)
      for (int t = 0; t <= std::min(s, table.columns(i - 1)); ++t) {
        const auto& prev = best[i - 1][static_cast<std::size_t>(s - t)];
        if (!prev) continue;
        Rational candidate = *prev + table(i - 1, t);
        auto& slot = best[i][static_cast<std::size_t>(s)];
        if (!slot || candidate < *slot) {
          slot = candidate;
          choice[i][static_cast<std::size_t>(s)] = t;
        }
      }
  AllocationVector j = AllocationVector::zeros(h);
  int remaining = sigma;
  for (std::size_t i = h; i >= 1; --i) {
    j[i - 1] = choice[i][static_cast<std::size_t>(remaining)];
    remaining -= j[i - 1];
  }
  return {j, *best[h][static_cast<std::size_t>(sigma)]};
}

}  // namespace subsel
