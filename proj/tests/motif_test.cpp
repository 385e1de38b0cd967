#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "mixsat/ensemble.hpp"
#include "mixsat/motif.hpp"
#include "mixsat/snip.hpp"
#include "mixsat/theory.hpp"

using namespace mixsat;

namespace {

using EdgeList = std::vector<std::pair<Site, Site>>;

Instance quantum_graph(std::uint32_t n, const EdgeList& edges, std::uint64_t seed = 1) {
  RandomStream r(seed);
  std::vector<Clause> cs;
  for (auto [a, b] : edges) cs.push_back(Clause::quantum(a, b, haar_ray<4>(r)));
  return Instance(n, cs);
}

EdgeList cycle(Site first, Site len) {
  EdgeList e;
  for (Site k = 0; k < len; ++k) e.push_back({first + k, first + (k + 1) % len});
  return e;
}

// Reference label of a connected cyclomatic-2 graph with min degree 2:
// suppress degree-2 vertices and compare the multigraph on the branch
// vertices with the three possible shapes.
MotifClass reference_class(std::uint32_t n, const EdgeList& edges) {
  std::vector<std::vector<Site>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<Site> branch;
  for (Site v = 0; v < n; ++v)
    if (adj[v].size() >= 3) branch.push_back(v);
  if (branch.size() == 1) return MotifClass::FigureEight;
  const Site u = branch[0];
  int to_other = 0;
  for (Site first : adj[u]) {
    Site prev = u, cur = first;
    while (adj[cur].size() == 2) {
      const Site next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      prev = cur;
      cur = next;
    }
    to_other += cur != u;
  }
  return to_other == 3 ? MotifClass::LoopWithCrossLink : MotifClass::Dumbbell;
}

std::uint64_t brute_cycles(std::uint32_t n, const EdgeList& edges, int len) {
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  for (auto [x, y] : edges) a[x][y] = a[y][x] = true;
  std::uint64_t closed = 0;
  std::vector<Site> seq(len);
  // ordered sequences of distinct vertices
  std::function<void(int)> rec = [&](int d) {
    if (d == len) {
      closed += a[seq[len - 1]][seq[0]];
      return;
    }
    for (Site v = 0; v < n; ++v) {
      if (std::find(seq.begin(), seq.begin() + d, v) != seq.begin() + d) continue;
      if (d && !a[seq[d - 1]][v]) continue;
      seq[d] = v;
      rec(d + 1);
    }
  };
  rec(0);
  return closed / (2 * len);
}

}  // namespace

TEST(Classify, SingleCycle) {
  const auto cls = classify_components(quantum_graph(5, cycle(0, 5)));
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_EQ(cls[0].motif, MotifClass::UnsnippableLoop);
  EXPECT_EQ(cls[0].cyclomatic_number, 1);
  EXPECT_TRUE(cls[0].branch_sites.empty());
}

TEST(Classify, Chord) {
  auto e = cycle(0, 6);
  e.push_back({0, 3});
  const auto cls = classify_components(quantum_graph(6, e));
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_EQ(cls[0].motif, MotifClass::LoopWithCrossLink);
  EXPECT_EQ(cls[0].branch_sites.size(), 2u);
}

TEST(Classify, FigureEightAndDumbbell) {
  auto fig = cycle(0, 3);
  fig.push_back({0, 3});
  fig.push_back({3, 4});
  fig.push_back({4, 0});
  EXPECT_EQ(classify_components(quantum_graph(5, fig))[0].motif, MotifClass::FigureEight);

  auto bell = cycle(0, 3);
  for (auto [a, b] : cycle(3, 3)) bell.push_back({a, b});
  bell.push_back({0, 6});
  bell.push_back({6, 3});
  EXPECT_EQ(classify_components(quantum_graph(7, bell))[0].motif, MotifClass::Dumbbell);
}

TEST(Classify, RejectsNonCore) {
  EXPECT_THROW(classify_components(quantum_graph(3, {{0, 1}, {1, 2}})), NotACoreError);
  EXPECT_TRUE(classify_components(Instance(0, {})).empty());
}

TEST(Classify, AllSmallCyclomaticTwoGraphs) {
  std::uint64_t checked = 0;
  for (std::uint32_t n = 4; n <= 8; ++n) {
    std::vector<std::pair<Site, Site>> pairs;
    for (Site j = 1; j < n; ++j)
      for (Site i = 0; i < j; ++i) pairs.push_back({i, j});
    const int p = static_cast<int>(pairs.size()), m = static_cast<int>(n) + 1;
    if (m > p) continue;
    // Gosper's hack over m-subsets of the pairs
    std::uint64_t mask = (1ULL << m) - 1;
    const std::uint64_t stop = 1ULL << p;
    while (mask < stop) {
      std::array<int, 8> deg{};
      for (int k = 0; k < p; ++k)
        if (mask >> k & 1) {
          ++deg[pairs[k].first];
          ++deg[pairs[k].second];
        }
      bool ok = std::all_of(deg.begin(), deg.begin() + n, [](int d) { return d >= 2; });
      EdgeList edges;
      if (ok) {
        std::vector<Site> root(n);
        std::iota(root.begin(), root.end(), 0);
        auto find = [&](Site x) {
          while (root[x] != x) x = root[x] = root[root[x]];
          return x;
        };
        for (int k = 0; k < p; ++k)
          if (mask >> k & 1) {
            edges.push_back(pairs[k]);
            root[find(pairs[k].first)] = find(pairs[k].second);
          }
        for (Site v = 1; v < n; ++v) ok &= find(v) == find(0);
      }
      if (ok) {
        const auto cls = classify_components(quantum_graph(n, edges));
        ASSERT_EQ(cls.size(), 1u);
        ASSERT_EQ(cls[0].cyclomatic_number, 2);
        ASSERT_EQ(cls[0].motif, reference_class(n, edges)) << "n=" << n << " mask=" << mask;
        ++checked;
      }
      const std::uint64_t c = mask & -mask, r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Classify, CyclomaticSum) {
  EnsembleParams p;
  p.n_qubits = 2000;
  p.clause_density = 0.6;
  p.quantum_fraction = 0.6;
  for (std::uint64_t s = 0; s < 20; ++s) {
    p.seed = s;
    const auto core = snip_core(generate_instance(p)).core;
    std::int64_t total = 0;
    for (const auto& c : classify_components(core)) total += c.cyclomatic_number;
    const auto comps = connected_components(Adjacency(core), static_cast<std::uint32_t>(core.clause_count()));
    EXPECT_EQ(total, static_cast<std::int64_t>(core.clause_count()) - core.n_qubits() + comps.count);
  }
}

TEST(Walk, QuantumCycle) {
  RandomStream r(1);
  const auto t = walk_unsnippable(quantum_graph(6, cycle(0, 6)), 2, r);
  EXPECT_EQ(t.outcome, WalkOutcome::ClosedLoop);
  EXPECT_EQ(t.repeated, Site{2});
  EXPECT_EQ(t.walk_case, WalkCase::ReturnedAllDegreeTwo);
  EXPECT_EQ(t.path.size(), 7u);
  EXPECT_TRUE(t.closes_unsnippably);
}

TEST(Walk, LassoAtBranchSite) {
  // triangle 0-1-2, path 2-3-4, triangle 4-5-6; start in the middle of the path
  auto e = cycle(0, 3);
  e.push_back({2, 3});
  e.push_back({3, 4});
  e.push_back({4, 5});
  e.push_back({5, 6});
  e.push_back({6, 4});
  const auto core = quantum_graph(7, e);
  for (int s = 0; s < 20; ++s) {
    RandomStream r(s);
    const auto t = walk_unsnippable(core, 3, r);
    EXPECT_EQ(t.outcome, WalkOutcome::Lasso);
    ASSERT_TRUE(t.repeated.has_value());
    EXPECT_TRUE(*t.repeated == 2 || *t.repeated == 4);
    EXPECT_EQ(t.walk_case, WalkCase::SelfCrossing);
  }
}

TEST(Walk, TreeStartRejected) {
  RandomStream r(1);
  const Instance inst(3, {Clause::classical(0, 1, 0, 0)});
  EXPECT_THROW(walk_unsnippable(inst, 0, r), std::invalid_argument);
}

TEST(Walk, RandomCoresNeverStuck) {
  EnsembleParams p;
  p.n_qubits = 1000;
  p.quantum_fraction = 0.5;
  p.clause_density = critical_density(0.5);
  int walks = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    p.seed = s;
    const auto core = snip_core(generate_instance(p)).core;
    RandomStream r(s);
    for (const auto& c : classify_components(core)) {
      if (c.cyclomatic_number < 1) continue;
      const auto t = walk_unsnippable(core, c.sites[r.bounded(c.sites.size())], r);
      EXPECT_NE(t.outcome, WalkOutcome::Stuck) << s;
      ++walks;
    }
  }
  EXPECT_GT(walks, 50);
}

TEST(ShortCycles, CompleteGraphAndTree) {
  const EdgeList k4{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const Adjacency g(4, k4);
  EXPECT_EQ(count_short_cycles(g, 3), 4u);
  EXPECT_EQ(count_short_cycles(g, 4), 3u);
  const EdgeList tree{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}};
  const Adjacency t(6, tree);
  for (int l = 3; l <= 8; ++l) EXPECT_EQ(count_short_cycles(t, l), 0u);
  EXPECT_THROW(count_short_cycles(t, 2), std::invalid_argument);
}

TEST(ShortCycles, MatchesBruteForce) {
  RandomStream r(4);
  for (int t = 0; t < 30; ++t) {
    const std::uint32_t n = 7;
    EdgeList e;
    for (Site j = 1; j < n; ++j)
      for (Site i = 0; i < j; ++i)
        if (r.bernoulli(0.5)) e.push_back({i, j});
    const Adjacency g(n, e);
    for (int l = 3; l <= 7; ++l) EXPECT_EQ(count_short_cycles(g, l), brute_cycles(n, e, l)) << t << " " << l;
  }
}

TEST(ShortCycles, TrianglesMatchExpectation) {
  EnsembleParams p;
  p.n_qubits = 3000;
  p.clause_density = 0.4;
  const int samples = 1000;
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    RandomStream r(derive_key(5, s));
    const auto edges = sample_graph(p, r);
    EdgeList e;
    for (const auto& x : edges) e.push_back({x.i, x.j});
    sum += count_short_cycles(Adjacency(p.n_qubits, e), 3);
  }
  const double expect = expected_subgraph_count(3000, 3, 3, 6, 0.4);
  // triangle counts are close to Poisson here
  EXPECT_NEAR(sum / samples, expect, 3 * std::sqrt(expect / samples));
}

TEST(Census, Empty) {
  const auto c = motif_census(Instance(0, {}));
  EXPECT_EQ(c.components, 0u);
  for (auto k : c.counts) EXPECT_EQ(k, 0u);
  EXPECT_TRUE(c.candidate_unsat_components.empty());
}

TEST(Census, TwoChordsFlagged) {
  auto e = cycle(0, 6);
  e.push_back({0, 3});
  e.push_back({1, 4});
  const auto c = motif_census(quantum_graph(6, e));
  EXPECT_EQ(c.components, 1u);
  EXPECT_EQ(c.count(MotifClass::MultiCyclicOther), 1u);
  EXPECT_EQ(c.candidate_unsat_components.size(), 1u);
}

TEST(Census, QuantumCoreBelowThreshold) {
  EnsembleParams p;
  p.n_qubits = 4000;
  p.clause_density = 0.45;
  p.quantum_fraction = 1.0;
  int complex_components = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    p.seed = s;
    const auto census = motif_census(snip_core(generate_instance(p)).core);
    for (const auto& c : census.classes) complex_components += c.cyclomatic_number >= 2;
    EXPECT_EQ(census.count(MotifClass::Tree), 0u);
  }
  // O(1/N) per instance
  EXPECT_LE(complex_components, 3);
}

TEST(MotifSpecs, LoopAutomorphisms) {
  for (Site l = 3; l <= 7; ++l) {
    std::vector<Site> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    const auto e = cycle(0, l);
    std::uint64_t aut = 0;
    do {
      bool ok = true;
      for (auto [a, b] : e) {
        const Site x = perm[a], y = perm[b];
        ok &= (y == (x + 1) % l) || (x == (y + 1) % l);
      }
      aut += ok;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto spec = MotifSpec::loop(l);
    EXPECT_EQ(spec.automorphisms, aut);
    EXPECT_EQ(spec.cross_links(), 0);
  }
  EXPECT_EQ(MotifSpec::figure_eight(8).cross_links(), 1);
  EXPECT_EQ(MotifSpec::dumbbell(8).vertex_count, 7u);
}
