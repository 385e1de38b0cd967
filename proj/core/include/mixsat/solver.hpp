#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mixsat/ensemble.hpp"
#include "mixsat/snip.hpp"

namespace mixsat {

/// One ray per site.
using ProductState = std::vector<Ray2>;

enum class Status { SAT, UNSAT, UNKNOWN };

enum class Certificate { None, ClassicalImplicationCycle, ClosureInfeasible, OracleKernelZero, PenalizedLoop };

std::string_view to_string(Status s);
std::string_view to_string(Certificate c);

inline constexpr double kWitnessTolerance = 1e-9;
inline constexpr std::uint32_t kDefaultOracleCap = 14;

struct Verdict {
  Status status = Status::UNKNOWN;
  std::optional<ProductState> witness;
  Certificate certificate = Certificate::None;
  std::optional<std::string> unknown_reason;
  /// Sub-solvers that contributed, joined with '+' (snip, classical, product, oracle).
  std::string solver_path;
  /// Witness residual for SAT; worst closure residual of the best failed
  /// candidate otherwise.
  double residual = 0.0;
  /// For ClassicalImplicationCycle: a site whose two literals share a
  /// strongly connected component.
  std::optional<Site> conflict_site;
  /// Size of the snip-core that was searched.
  std::uint32_t core_sites = 0;
};

struct WitnessCheck {
  bool passed = false;
  double max_residual = 0.0;
};

/// max over clauses of |<phi| psi_i (tensor) psi_j>|; passes iff below 1e-9.
/// Throws std::invalid_argument if the state does not cover every site.
WitnessCheck verify_witness(const Instance& instance, std::span<const Ray2> state);

class NotClassicalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Implication-graph 2-SAT. Throws NotClassicalError on quantum clauses.
Verdict solve_classical(const Instance& instance);

struct ProductOptions {
  std::uint64_t seed = 0;
  /// Detached-subproblem recursions allowed per core component.
  int recursion_budget = 64;
  /// Components up to this many sites are referred to the oracle when the
  /// search is inconclusive; 0 disables escalation.
  std::uint32_t oracle_cap = kDefaultOracleCap;
};

/// Snips the instance, then decides every core component by closure-root
/// enumeration (or 2-SAT when the component is classical), and rebuilds the
/// snipped sites by replaying the peeling in reverse.
Verdict solve_product_state(const Instance& instance, const ProductOptions& options = {});

enum class Strategy { Auto, Classical, Product, Oracle };
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct SolveOptions {
  Strategy strategy = Strategy::Auto;
  std::uint32_t oracle_cap = kDefaultOracleCap;
  std::uint64_t seed = 0;
};

Verdict solve(const Instance& instance, const SolveOptions& options = {});

/// Extends a state on the core sites to the whole instance.
ProductState replay_snip(const Instance& instance, const CoreReport& report, std::span<const Ray2> core_state);

class OracleCapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// dim of the common kernel of all clause projectors, computed exactly by
/// rank-revealing factorization (relative tolerance 1e-9). Throws
/// OracleCapError when N > n_cap.
std::uint64_t exact_kernel_dimension(const Instance& instance, std::uint32_t n_cap = kDefaultOracleCap);

}  // namespace mixsat
