#pragma once

#include <cstdint>
#include <vector>

#include "mixsat/ensemble.hpp"
#include "mixsat/rng.hpp"

namespace mixsat {

/// One peeling step: a site and the clauses that were still attached to it
/// when it was removed (original clause indices).
struct SnipStep {
  Site site = 0;
  std::vector<std::uint32_t> clauses;
  friend bool operator==(const SnipStep&, const SnipStep&) = default;
};

inline constexpr std::int64_t kSnipped = -1;

struct CoreReport {
  /// Surviving sites and clauses, relabeled to 0..n_core-1 in original order.
  Instance core;
  std::vector<SnipStep> snip_sequence;
  /// Original site -> core site, or kSnipped.
  std::vector<std::int64_t> surviving_site_map;
  /// Core site -> original site.
  std::vector<Site> core_sites;
  /// Core clause -> original clause index.
  std::vector<std::uint32_t> core_clauses;

  bool empty() const { return core_sites.empty(); }
};

/// Degree 0 or 1, or every incident clause classical and all of them
/// forbidding the same bit at `site`.
bool is_snippable(const Instance& instance, Site site);

/// Unique maximal snip-core by iterative peeling. The result does not depend
/// on the order in which snippable sites are removed.
CoreReport snip_core(const Instance& instance);

/// Same core, but peels in an order chosen by `order`. Used to test
/// confluence.
CoreReport snip_core(const Instance& instance, RandomStream& order);

}  // namespace mixsat
