#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mixsat/ensemble.hpp"
#include "mixsat/graph.hpp"
#include "mixsat/rng.hpp"

namespace mixsat {

enum class MotifClass { Tree, UnsnippableLoop, LoopWithCrossLink, FigureEight, Dumbbell, MultiCyclicOther };
inline constexpr std::size_t kMotifClassCount = 6;

std::string_view to_string(MotifClass c);

/// Unsnippability of one elementary cycle of a cyclomatic-2 component: every
/// site on it is unsnippable with respect to its two cycle edges.
struct CycleNote {
  std::vector<Site> sites;
  bool unsnippable = false;
};

struct ComponentClass {
  std::uint32_t component = 0;
  std::vector<Site> sites;
  std::vector<std::uint32_t> clauses;
  /// edges - sites + 1.
  std::int64_t cyclomatic_number = 0;
  MotifClass motif = MotifClass::Tree;
  /// Sites of degree >= 3.
  std::vector<Site> branch_sites;
  /// Finer classification of cyclomatic-1 and -2 components; empty otherwise.
  std::vector<CycleNote> cycles;
};

class NotACoreError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// True when `site` is unsnippable with respect to the pair of incident
/// clauses (a, b): either is quantum, or both are classical and forbid
/// different bits at `site`.
bool unsnippable_through(const Instance& instance, Site site, std::uint32_t clause_a, std::uint32_t clause_b);

/// Labels every connected component of a snip-core. Throws NotACoreError if
/// any site is snippable. Isolated empty input yields an empty list.
std::vector<ComponentClass> classify_components(const Instance& core);

enum class WalkOutcome { ClosedLoop, Lasso, Stuck };
/// 1(a): returned to the start and every loop site has degree 2.
/// 1(b): returned to the start through a loop with a site of degree >= 3.
/// 2: crossed itself at a site other than the start.
enum class WalkCase { ReturnedAllDegreeTwo, ReturnedWithBranch, SelfCrossing, None };

struct WalkTrace {
  std::vector<Site> path;              // visited sites in order, repeated site last
  std::vector<std::uint32_t> clauses;  // clause used for each step
  std::optional<Site> repeated;
  WalkOutcome outcome = WalkOutcome::Stuck;
  WalkCase walk_case = WalkCase::None;
  /// For returns to the start: whether the start is unsnippable with respect
  /// to the closing and opening clauses.
  bool closes_unsnippably = false;
};

/// Walks from `start`, always leaving each site through a clause that keeps
/// it unsnippable with respect to the entry clause, until a site repeats.
/// Ties among valid continuations are broken with `rng`. Throws
/// std::invalid_argument if the start's component has no cycle.
WalkTrace walk_unsnippable(const Instance& core, Site start, RandomStream& rng);

/// Number of simple cycles of length L (3..8), each counted once.
std::uint64_t count_short_cycles(const Adjacency& graph, int length);

struct MotifCensus {
  std::array<std::uint64_t, kMotifClassCount> counts{};
  std::uint64_t components = 0;
  /// Fraction of components that are unsnippable loops.
  double loop_fraction = 0.0;
  /// Components containing a cycle decorated with at least two cross-links
  /// (a biconnected block of cyclomatic number >= 3).
  std::vector<std::uint32_t> candidate_unsat_components;
  std::vector<ComponentClass> classes;

  std::uint64_t count(MotifClass c) const { return counts[static_cast<std::size_t>(c)]; }
};

MotifCensus motif_census(const Instance& core);

enum class MotifKind { Loop, LoopWithCrossLink, FigureEight, Dumbbell };

/// Shape data for expected-count formulas: |A| vertices, e(A) edges,
/// Aut(A) automorphisms, cross-links m = e(A) - |A|, and the O(1)
/// unsnippability constant c (a free parameter, default 1).
struct MotifSpec {
  MotifKind kind = MotifKind::Loop;
  std::uint64_t vertex_count = 0;
  std::uint64_t edge_count = 0;
  std::uint64_t automorphisms = 1;
  double unsnippability_constant = 1.0;

  std::int64_t cross_links() const {
    return static_cast<std::int64_t>(edge_count) - static_cast<std::int64_t>(vertex_count);
  }

  /// Loop of L sites: |A| = e(A) = L, Aut = 2L.
  static MotifSpec loop(std::uint64_t length);
  /// Cyclomatic-2 motifs with L edges on L - 1 sites.
  static MotifSpec loop_with_cross_link(std::uint64_t length, double c = 1.0);
  static MotifSpec figure_eight(std::uint64_t length, double c = 1.0);
  static MotifSpec dumbbell(std::uint64_t length, double c = 1.0);
};

}  // namespace mixsat
