#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "subsel/oracle.hpp"
#include "subsel/separable.hpp"

#include <algorithm>
#include <set>

using namespace subsel;
using testing::R;

namespace {

ValTable table2() { return ValTable({{R(5), R(1)}, {R(4), R(3)}}); }

ValTable randomTable(std::mt19937_64& rng, int maxBlocks, int maxCols) {
  std::vector<std::vector<Rational>> values(static_cast<std::size_t>(testing::randomInt(rng, 1, maxBlocks)));
  for (auto& row : values) {
    const int n = testing::randomInt(rng, 1, maxCols);
    // small integers make ties (and so several optimal allocations) common
    for (int j = 0; j <= n; ++j) row.push_back(Rational(testing::randomInt(rng, 0, 6)));
    std::sort(row.rbegin(), row.rend());
  }
  return ValTable(std::move(values));
}

void forEachAllocation(const std::vector<int>& n, const std::function<void(const AllocationVector&)>& f) {
  std::vector<int> j(n.size(), 0);
  while (true) {
    f(AllocationVector(j));
    std::size_t i = 0;
    while (i < j.size() && j[i] == n[i]) j[i++] = 0;
    if (i == j.size()) return;
    ++j[i];
  }
}

/// Feasible successors with at most thetaBar decrements, lexicographic.
std::vector<AllocationVector> successorsByFilter(const AllocationVector& from, const BlockStructure& s) {
  std::vector<AllocationVector> out;
  forEachAllocation(s.nVec, [&](const AllocationVector& to) {
    if (to.sum() != from.sum() + 1) return;
    int q = 0;
    for (std::size_t i = 0; i < from.size(); ++i) q += std::max(0, from[i] - to[i]);
    if (q <= s.thetaBar) out.push_back(to);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Rational> bestBySum(const ValTable& t) {
  const auto s = t.structure();
  std::vector<Rational> best(static_cast<std::size_t>(s.totalColumns() + 1), Rational(-1));
  forEachAllocation(s.nVec, [&](const AllocationVector& j) {
    auto& b = best[static_cast<std::size_t>(j.sum())];
    const Rational v = t.total(j);
    if (b < 0 || v < b) b = v;
  });
  return best;
}

}  // namespace

TEST_CASE("diagGreedy") {
  const std::vector<Rational> a{R(1), R(2), R(0)}, b{R(3), R(-5), R(7)};
  auto g = diagGreedy(a, b, 1);
  CHECK(g.K == std::vector<int>{1});
  CHECK(g.x == testing::vec({R(0), R("-5/2"), R(0)}));
  CHECK(g.objective == 58);
  g = diagGreedy(a, b, 0);
  CHECK(g.K.empty());
  CHECK(g.x.isZero());
  CHECK(g.objective == 83);
  g = diagGreedy(a, b, 3);
  CHECK(g.K == std::vector<int>{0, 1});
  CHECK(g.objective == 49);
}

TEST_CASE("diagGreedy equals brute force on random diagonal data") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const int n = testing::randomInt(rng, 1, 7);
    std::vector<Rational> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(testing::randomInt(rng, 0, 3) == 0 ? Rational(0) : testing::randomRational(rng, 3));
      b.push_back(testing::randomRational(rng, 3));
    }
    const int sigma = testing::randomInt(rng, 0, n);
    Rational best = -1;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) > sigma) continue;
      Rational v = 0;
      for (int i = 0; i < n; ++i)
        if (!(mask >> i & 1u) || a[static_cast<std::size_t>(i)] == 0) v += b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
      if (best < 0 || v < best) best = v;
    }
    const auto g = diagGreedy(a, b, sigma);
    CHECK(g.objective == best);
    Rational check = 0;
    for (int i = 0; i < n; ++i) {
      const Rational r = a[static_cast<std::size_t>(i)] * g.x[i] - b[static_cast<std::size_t>(i)];
      check += r * r;
    }
    CHECK(check == g.objective);
    CHECK(static_cast<int>(g.K.size()) <= sigma);
  }
}

TEST_CASE("qCloseness") {
  using AV = AllocationVector;
  CHECK(qCloseness(AV({1, 0}), AV({2, 0})) == 0);
  CHECK(qCloseness(AV({1, 0}), AV({0, 2})) == 1);
  CHECK(qCloseness(AV({2, 0, 1}), AV({0, 2, 2})) == 2);
  CHECK_FALSE(qCloseness(AV({1, 0}), AV({1, 0})).has_value());
  CHECK_FALSE(qCloseness(AV({1, 0}), AV({3, 0})).has_value());
  CHECK_FALSE(qCloseness(AV({1, 0}), AV({1, 0, 1})).has_value());

  const auto p = DeltaPattern::between(AV({2, 0, 1}), AV({0, 2, 2}));
  CHECK(p.q == 2);
  CHECK(p.iMinus == std::vector<int>{0});
  CHECK(p.iPlus == std::vector<int>{1, 2});
  CHECK(p.changes().size() == 3);
  CHECK_THROWS_AS(DeltaPattern::between(AV({1, 0}), AV({1, 0})), std::invalid_argument);
}

TEST_CASE("augSet examples") {
  using AV = AllocationVector;
  const auto s1 = BlockStructure::fromSizes({1, 1, 1});
  CHECK(augSet(AV({1, 0, 0}), s1) == std::vector<AV>{AV({1, 0, 1}), AV({1, 1, 0})});
  CHECK(augSet(AV({1, 0, 0}), s1) == successorsByFilter(AV({1, 0, 0}), s1));

  const auto s2 = BlockStructure::fromSizes({2, 2});
  CHECK(augSet(AV({1, 0}), s2) == std::vector<AV>{AV({0, 2}), AV({1, 1}), AV({2, 0})});
  CHECK(augSet(AV({1, 0}), s2) == successorsByFilter(AV({1, 0}), s2));

  CHECK(augSet(AV({2, 2}), s2).empty());
}

TEST_CASE("augSet matches filtering every successor") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 60; ++t) {
    std::vector<int> n;
    for (int i = testing::randomInt(rng, 1, 4); i > 0; --i) n.push_back(testing::randomInt(rng, 1, 3));
    const auto s = BlockStructure::fromSizes(n);
    forEachAllocation(n, [&](const AllocationVector& j) {
      const auto aug = augSet(j, s);
      CHECK(aug == successorsByFilter(j, s));
      for (const auto& next : aug) {
        int l1 = 0;
        for (std::size_t i = 0; i < j.size(); ++i) l1 += std::abs(next[i] - j[i]);
        CHECK(l1 <= 2 * s.thetaBar + 1);
        const auto p = DeltaPattern::between(j, next);
        int down = 0, up = 0;
        for (int i : p.iMinus) down += j[static_cast<std::size_t>(i)] - next[static_cast<std::size_t>(i)];
        for (int i : p.iPlus) up += next[static_cast<std::size_t>(i)] - j[static_cast<std::size_t>(i)];
        CHECK(down == p.q);
        CHECK(up == p.q + 1);
      }
    });
  }
}

TEST_CASE("deltaValue") {
  using AV = AllocationVector;
  const auto t = table2();
  CHECK(deltaValue(AV({0, 0}), AV({1, 0}), t).value == -4);
  CHECK(deltaValue(AV({0, 0}), AV({0, 1}), t).value == -1);
  CHECK(deltaValue(AV({1, 0}), AV({1, 1}), t).value == -1);
}

TEST_CASE("delta patterns") {
  CHECK(enumerateDeltaPatterns(BlockStructure::fromSizes({1, 1})).size() == 2);
  CHECK(buildD(BlockStructure::fromSizes({1, 1}), table2()).size() == 2);
  CHECK(enumerateDeltaPatterns(BlockStructure::fromSizes({2})).size() == 2);

  for (const std::vector<int>& n : std::vector<std::vector<int>>{{2, 1}, {2, 2}, {3, 1}, {1, 2, 1}, {3, 2}}) {
    const auto s = BlockStructure::fromSizes(n);
    std::set<std::vector<std::array<int, 3>>> oracle;
    forEachAllocation(n, [&](const AllocationVector& j) {
      for (const auto& next : successorsByFilter(j, s)) {
        std::vector<std::array<int, 3>> changes;
        for (std::size_t i = 0; i < j.size(); ++i)
          if (j[i] != next[i]) changes.push_back({static_cast<int>(i), j[i], next[i]});
        oracle.insert(changes);
      }
    });
    const auto patterns = enumerateDeltaPatterns(s);
    CHECK(patterns.size() == oracle.size());
    std::set<std::vector<std::array<int, 3>>> seen;
    for (const auto& p : patterns) seen.insert(p.changes());
    CHECK(seen == oracle);
    CHECK(Integer(static_cast<long>(patterns.size())) <= deltaPatternBound(s.h, s.theta));
  }
}

TEST_CASE("weak compositions") {
  CHECK(weakCompositionCount(2, 3) == 6);
  CHECK(weakCompositionCount(0, 4) == 1);
  CHECK(weakCompositionCount(5, 1) == 1);
  // brute force: tuples of p naturals summing to q
  for (int p = 1; p <= 4; ++p)
    for (int q = 0; q <= 5; ++q) {
      std::uint64_t count = 0;
      std::vector<int> t(static_cast<std::size_t>(p), 0);
      while (true) {
        int sum = 0;
        for (int v : t) sum += v;
        if (sum == q) ++count;
        std::size_t i = 0;
        while (i < t.size() && t[i] == q) t[i++] = 0;
        if (i == t.size()) break;
        ++t[i];
      }
      CHECK(weakCompositionCount(q, p) == count);
    }
  CHECK(deltaPatternBound(2, 1) == 2);
}

TEST_CASE("chain and DP solvers") {
  const auto t = table2();
  auto r = chainSolve(t, 1);
  CHECK(r.j == AllocationVector({1, 0}));
  CHECK(r.objective == 5);
  r = chainSolve(t, 2);
  CHECK(r.j == AllocationVector({1, 1}));
  CHECK(r.objective == 4);
  r = chainSolve(t, 0);
  CHECK(r.j == AllocationVector({0, 0}));
  CHECK(r.objective == 9);

  CHECK(dpSolve(t, 1).objective == 5);
  CHECK(dpSolve(t, 0).objective == 9);
  const ValTable single({{R(7), R(3), R(2)}});
  for (int s = 0; s <= 2; ++s) CHECK(dpSolve(single, s).objective == single(0, s));
}

TEST_CASE("chain, DP and exhaustive enumeration agree") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 300; ++t) {
    const auto table = randomTable(rng, 4, 3);
    const auto best = bestBySum(table);
    for (int s = 0; s < static_cast<int>(best.size()); ++s) {
      std::vector<ChainStep> trace;
      const auto chain = chainSolve(table, s, valueThenSuccessor, &trace);
      const auto dp = dpSolve(table, s);
      CHECK(chain.objective == best[static_cast<std::size_t>(s)]);
      CHECK(dp.objective == best[static_cast<std::size_t>(s)]);
      CHECK(table.total(chain.j) == chain.objective);
      CHECK(table.total(dp.j) == dp.objective);
      CHECK(trace.size() == static_cast<std::size_t>(s));
      for (const auto& step : trace)
        for (const auto& c : step.candidates)
          CHECK_FALSE(valueThenSuccessor(c, step.candidates[step.chosen]));
    }
  }
}

TEST_CASE("optimal allocations have an optimal q-close successor") {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 200; ++t) {
    const auto table = randomTable(rng, 4, 3);
    const auto s = table.structure();
    const auto optima = exhaustiveAllocations(table);
    CHECK(optima.best == bestBySum(table));
    for (std::size_t level = 0; level + 1 < optima.optimal.size(); ++level)
      for (const auto& j : optima.optimal[level]) {
        bool found = false;
        for (const auto& next : optima.optimal[level + 1]) {
          const auto q = qCloseness(j, next);
          found = found || (q && *q <= s.thetaBar);
        }
        CHECK(found);
      }
  }
}

TEST_CASE("symbolic D") {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> n;
    for (int i = testing::randomInt(rng, 1, 3); i > 0; --i) n.push_back(testing::randomInt(rng, 1, 2));
    const auto s = BlockStructure::fromSizes(n);
    FormTable forms;
    for (int ni : n) {
      forms.emplace_back();
      for (int j = 0; j <= ni; ++j) {
        QuadraticForm<Rational> q = QuadraticForm<Rational>::zero(1);
        q.P(0, 0) = Rational(testing::randomInt(rng, 0, 2));
        q.r[0] = Rational(testing::randomInt(rng, -2, 2));
        q.s0 = Rational(testing::randomInt(rng, 0, 3));
        forms.back().push_back(q);
      }
    }
    const auto D = buildD(s, forms);
    CHECK(D.size() <= enumerateDeltaPatterns(s).size());
    for (const auto& e : D) {
      auto expected = QuadraticForm<Rational>::zero(1);
      for (const auto& [i, from, to] : e.pattern.changes())
        expected += forms[static_cast<std::size_t>(i)][static_cast<std::size_t>(to)] -
                    forms[static_cast<std::size_t>(i)][static_cast<std::size_t>(from)];
      CHECK(e.value == expected);
    }
    for (std::size_t a = 0; a < D.size(); ++a)
      for (std::size_t b = a + 1; b < D.size(); ++b) CHECK_FALSE(D[a].value == D[b].value);
  }
}
