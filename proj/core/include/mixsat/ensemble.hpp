#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixsat/qalgebra.hpp"
#include "mixsat/rng.hpp"

namespace mixsat {

using Site = std::uint32_t;

enum class GraphModel { GNP, GNM };

std::string_view to_string(GraphModel model);
GraphModel graph_model_from_string(std::string_view name);

/// Parameters of the mixed ensemble: N qubits, clause density alpha,
/// quantum fraction beta.
struct EnsembleParams {
  std::uint32_t n_qubits = 0;
  double clause_density = 0.0;
  double quantum_fraction = 0.0;
  GraphModel graph_model = GraphModel::GNP;
  std::uint64_t seed = 0;

  /// Number of unordered site pairs, C(N, 2).
  std::uint64_t pair_count() const;
  /// GNP inclusion probability alpha * N / C(N, 2).
  double edge_probability() const;
  /// GNM edge count round(alpha * N).
  std::uint64_t target_edge_count() const;
  /// Largest alpha for which the chosen model is well defined at this N.
  double max_clause_density() const;
  /// Throws EnsembleError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const EnsembleParams&, const EnsembleParams&) = default;
};

class EnsembleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Instance invariant violated (duplicate edge, bad endpoint, bad ray).
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ClauseKind { Classical, Quantum };

/// Forbidden bit pair (b_i, b_j) of a classical clause.
struct ClassicalPayload {
  std::uint8_t bit_i = 0;
  std::uint8_t bit_j = 0;
  friend bool operator==(const ClassicalPayload&, const ClassicalPayload&) = default;
};

/// Penalized two-qubit ray, amplitude order |b_i b_j> with b_i major.
struct QuantumPayload {
  Ray4 ray;
  friend bool operator==(const QuantumPayload&, const QuantumPayload&) = default;
};

using ClausePayload = std::variant<ClassicalPayload, QuantumPayload>;

struct Clause {
  Site i = 0;
  Site j = 0;
  ClausePayload payload;

  /// Builds a clause between two distinct sites in either order; the payload
  /// is re-expressed so that the stored endpoints satisfy i < j.
  static Clause between(Site a, Site b, ClausePayload payload_ab);
  static Clause classical(Site a, Site b, int forbidden_a, int forbidden_b);
  static Clause quantum(Site a, Site b, const Ray4& ray_ab);

  ClauseKind kind() const;
  bool is_quantum() const { return kind() == ClauseKind::Quantum; }
  const ClassicalPayload& classical_payload() const { return std::get<ClassicalPayload>(payload); }
  /// Penalized ray; the computational basis ray for classical clauses.
  Ray4 ray() const;
  /// Bit disfavored at `site` by a classical clause.
  int forbidden_bit_at(Site site) const;
  Site other(Site site) const { return site == i ? j : i; }

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Random-number lineage of a generated instance: the master seed, and for
/// each clause the pair index whose counter-based stream produced its payload.
struct RngLineage {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> clause_streams;
  friend bool operator==(const RngLineage&, const RngLineage&) = default;
};

/// An N-qubit interaction graph with one clause per edge. Immutable after
/// construction; the constructor enforces all invariants.
class Instance {
 public:
  Instance() = default;
  Instance(std::uint32_t n_qubits, std::vector<Clause> clauses,
           std::optional<EnsembleParams> provenance = std::nullopt, RngLineage lineage = {});

  std::uint32_t n_qubits() const { return n_qubits_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t clause_count() const { return clauses_.size(); }
  /// Generating parameters; nullopt for handcrafted or derived instances.
  const std::optional<EnsembleParams>& provenance() const { return provenance_; }
  const RngLineage& lineage() const { return lineage_; }

  bool all_classical() const;
  bool all_quantum() const;
  std::size_t quantum_count() const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::uint32_t n_qubits_ = 0;
  std::vector<Clause> clauses_;
  std::optional<EnsembleParams> provenance_;
  RngLineage lineage_;
};

struct Edge {
  Site i = 0;
  Site j = 0;
  std::uint64_t pair_index = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Index of the unordered pair {i, j}, i < j, in colex order j(j-1)/2 + i.
std::uint64_t pair_index(Site i, Site j);
Edge pair_from_index(std::uint64_t index);

/// Smallest k with P[Binomial(n, p) <= k] > u. Monotone in p for fixed u,
/// which couples edge counts across clause densities.
std::uint64_t binomial_quantile(std::uint64_t n, double p, double u);

/// Random interaction graph. GNP: edge count ~ Binomial(C(N,2), p) followed
/// by a uniform subset of that size; GNM: a uniform round(alpha N)-subset.
/// Both take the first distinct pairs of one pair stream, so larger alpha
/// with the same stream yields a supergraph. Edges are sorted by (i, j).
std::vector<Edge> sample_graph(const EnsembleParams& params, RandomStream& rng);

/// Classical: uniform forbidden pair. Quantum: Haar-random two-qubit ray.
ClausePayload sample_clause(ClauseKind kind, RandomStream& rng);

/// Stream that drives the payload of the clause on pair `pair`. Depends only
/// on (seed, pair), so payloads do not depend on generation order.
RandomStream clause_stream(std::uint64_t seed, std::uint64_t pair);

/// Draws the kind and payload of one clause from its own stream.
Clause draw_clause(const Edge& edge, double quantum_fraction, std::uint64_t seed);

Instance generate_instance(const EnsembleParams& params);

}  // namespace mixsat
