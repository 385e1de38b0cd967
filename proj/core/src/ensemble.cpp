#include "mixsat/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

namespace mixsat {

std::string_view to_string(GraphModel model) { return model == GraphModel::GNP ? "GNP" : "GNM"; }

GraphModel graph_model_from_string(std::string_view name) {
  if (name == "GNP" || name == "gnp") return GraphModel::GNP;
  if (name == "GNM" || name == "gnm") return GraphModel::GNM;
  throw EnsembleError(fmt::format("unknown graph model '{}'", name));
}

std::uint64_t EnsembleParams::pair_count() const {
  const std::uint64_t n = n_qubits;
  return n < 2 ? 0 : n * (n - 1) / 2;
}

double EnsembleParams::edge_probability() const {
  const auto pairs = pair_count();
  if (pairs == 0) return 0.0;
  return clause_density * static_cast<double>(n_qubits) / static_cast<double>(pairs);
}

std::uint64_t EnsembleParams::target_edge_count() const {
  return static_cast<std::uint64_t>(std::llround(clause_density * static_cast<double>(n_qubits)));
}

double EnsembleParams::max_clause_density() const {
  if (n_qubits == 0) return 0.0;
  // Both models are bounded by C(N,2) edges, i.e. alpha <= (N - 1) / 2.
  return static_cast<double>(pair_count()) / static_cast<double>(n_qubits);
}

void EnsembleParams::validate() const {
  if (n_qubits == 0) throw EnsembleError("n_qubits must be positive");
  if (!std::isfinite(clause_density) || clause_density < 0.0)
    throw EnsembleError("clause_density must be a finite non-negative number");
  if (!std::isfinite(quantum_fraction) || quantum_fraction < 0.0 || quantum_fraction > 1.0)
    throw EnsembleError("quantum_fraction must lie in [0, 1]");
  if (clause_density == 0.0) return;
  if (graph_model == GraphModel::GNP) {
    const double p = edge_probability();
    if (pair_count() == 0 || p > 1.0)
      throw EnsembleError(fmt::format(
          "GNP edge probability {} exceeds 1 for N={}; maximal admissible alpha is {}", p,
          n_qubits, max_clause_density()));
  } else {
    if (target_edge_count() > pair_count())
      throw EnsembleError(fmt::format("GNM edge count {} exceeds C(N,2)={} for N={}; maximal admissible alpha is {}",
                                      target_edge_count(), pair_count(), n_qubits,
                                      max_clause_density()));
  }
}

Clause Clause::between(Site a, Site b, ClausePayload payload_ab) {
  if (a == b) throw InstanceError(fmt::format("self-loop on site {}", a));
  if (a < b) return Clause{a, b, std::move(payload_ab)};
  // Swap orientation: the forbidden bits swap, and the ray amplitudes
  // |b_a b_b> are re-indexed to |b_b b_a>.
  if (auto* c = std::get_if<ClassicalPayload>(&payload_ab)) {
    return Clause{b, a, ClassicalPayload{c->bit_j, c->bit_i}};
  }
  const auto& amps = std::get<QuantumPayload>(payload_ab).ray.amplitudes();
  const Vec4 swapped{amps[0], amps[2], amps[1], amps[3]};
  return Clause{b, a, QuantumPayload{Ray4::from_vector(swapped)}};
}

Clause Clause::classical(Site a, Site b, int forbidden_a, int forbidden_b) {
  if ((forbidden_a != 0 && forbidden_a != 1) || (forbidden_b != 0 && forbidden_b != 1))
    throw InstanceError("forbidden bits must be 0 or 1");
  return between(a, b, ClassicalPayload{static_cast<std::uint8_t>(forbidden_a),
                                        static_cast<std::uint8_t>(forbidden_b)});
}

Clause Clause::quantum(Site a, Site b, const Ray4& ray_ab) { return between(a, b, QuantumPayload{ray_ab}); }

ClauseKind Clause::kind() const {
  return std::holds_alternative<QuantumPayload>(payload) ? ClauseKind::Quantum : ClauseKind::Classical;
}

Ray4 Clause::ray() const {
  if (const auto* q = std::get_if<QuantumPayload>(&payload)) return q->ray;
  const auto& c = std::get<ClassicalPayload>(payload);
  return Ray4::basis(2u * c.bit_i + c.bit_j);
}

int Clause::forbidden_bit_at(Site site) const {
  const auto& c = std::get<ClassicalPayload>(payload);
  return site == i ? c.bit_i : c.bit_j;
}

Instance::Instance(std::uint32_t n_qubits, std::vector<Clause> clauses,
                   std::optional<EnsembleParams> provenance, RngLineage lineage)
    : n_qubits_(n_qubits),
      clauses_(std::move(clauses)),
      provenance_(std::move(provenance)),
      lineage_(std::move(lineage)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(clauses_.size() * 2);
  for (const auto& c : clauses_) {
    if (c.i >= n_qubits_ || c.j >= n_qubits_)
      throw InstanceError(fmt::format("clause endpoint ({}, {}) outside [0, {})", c.i, c.j, n_qubits_));
    if (c.i == c.j) throw InstanceError(fmt::format("self-loop on site {}", c.i));
    if (c.i > c.j) throw InstanceError(fmt::format("clause endpoints ({}, {}) not ordered i < j", c.i, c.j));
    if (!seen.insert(pair_index(c.i, c.j)).second)
      throw InstanceError(fmt::format("simple graph violated: duplicate edge {{{}, {}}}", c.i, c.j));
    if (const auto* q = std::get_if<QuantumPayload>(&c.payload)) {
      if (std::abs(norm(q->ray.amplitudes()) - 1.0) > kRayNormTolerance)
        throw InstanceError(fmt::format("non-normalized ray on edge {{{}, {}}}", c.i, c.j));
    } else {
      const auto& p = std::get<ClassicalPayload>(c.payload);
      if (p.bit_i > 1 || p.bit_j > 1) throw InstanceError("forbidden bits must be 0 or 1");
    }
  }
  if (!lineage_.clause_streams.empty() && lineage_.clause_streams.size() != clauses_.size())
    throw InstanceError("rng lineage does not match clause count");
}

bool Instance::all_classical() const { return quantum_count() == 0; }

bool Instance::all_quantum() const { return quantum_count() == clauses_.size(); }

std::size_t Instance::quantum_count() const {
  return static_cast<std::size_t>(
      std::count_if(clauses_.begin(), clauses_.end(), [](const Clause& c) { return c.is_quantum(); }));
}

std::uint64_t pair_index(Site i, Site j) {
  if (i > j) std::swap(i, j);
  return static_cast<std::uint64_t>(j) * (j - 1) / 2 + i;
}

Edge pair_from_index(std::uint64_t index) {
  // Largest j with j(j-1)/2 <= index.
  auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(index))) / 2.0);
  while (j * (j - 1) / 2 > index) --j;
  while ((j + 1) * j / 2 <= index) ++j;
  const std::uint64_t i = index - j * (j - 1) / 2;
  return Edge{static_cast<Site>(i), static_cast<Site>(j), index};
}

std::uint64_t binomial_quantile(std::uint64_t n, double p, double u) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const double nd = static_cast<double>(n);
  auto mode = static_cast<std::uint64_t>(std::floor((nd + 1.0) * p));
  mode = std::min(mode, n);
  // Weights relative to the mode, so no absolute normalization is needed.
  constexpr double kCutoff = 1e-20;
  const double odds = p / (1.0 - p);
  std::vector<double> below;  // k = mode-1, mode-2, ...
  double w = 1.0;
  for (std::uint64_t k = mode; k > 0; --k) {
    w *= static_cast<double>(k) / (static_cast<double>(n - k) + 1.0) / odds;
    if (w < kCutoff) break;
    below.push_back(w);
  }
  std::vector<double> above;  // k = mode+1, mode+2, ...
  w = 1.0;
  for (std::uint64_t k = mode; k < n; ++k) {
    w *= static_cast<double>(n - k) / (static_cast<double>(k) + 1.0) * odds;
    if (w < kCutoff) break;
    above.push_back(w);
  }
  double total = 1.0;
  for (auto it = below.rbegin(); it != below.rend(); ++it) total += *it;
  for (double a : above) total += a;
  const double target = u * total;
  double cumulative = 0.0;
  const std::uint64_t lowest = mode - below.size();
  for (std::size_t idx = 0; idx < below.size(); ++idx) {
    cumulative += below[below.size() - 1 - idx];
    if (cumulative > target) return lowest + idx;
  }
  cumulative += 1.0;
  if (cumulative > target) return mode;
  for (std::size_t idx = 0; idx < above.size(); ++idx) {
    cumulative += above[idx];
    if (cumulative > target) return mode + 1 + idx;
  }
  return mode + above.size();
}

std::vector<Edge> sample_graph(const EnsembleParams& params, RandomStream& rng) {
  params.validate();
  const std::uint64_t pairs = params.pair_count();
  // The count draw is always consumed so that both models read the pair
  // stream from the same position.
  const double u = rng.uniform();
  std::uint64_t m = 0;
  if (params.graph_model == GraphModel::GNP) {
    m = binomial_quantile(pairs, params.edge_probability(), u);
  } else {
    m = params.target_edge_count();
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  if (m == pairs) {
    for (std::uint64_t r = 0; r < pairs; ++r) edges.push_back(pair_from_index(r));
  } else {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(m * 2);
    while (edges.size() < m) {
      const std::uint64_t r = rng.bounded(pairs);
      if (chosen.insert(r).second) edges.push_back(pair_from_index(r));
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return edges;
}

ClausePayload sample_clause(ClauseKind kind, RandomStream& rng) {
  if (kind == ClauseKind::Classical) {
    const std::uint32_t bits = rng.next_u32() >> 30;
    return ClassicalPayload{static_cast<std::uint8_t>(bits >> 1), static_cast<std::uint8_t>(bits & 1u)};
  }
  return QuantumPayload{haar_ray<4>(rng)};
}

RandomStream clause_stream(std::uint64_t seed, std::uint64_t pair) {
  return RandomStream(derive_key(seed, std::string_view("clause")), pair);
}

Clause draw_clause(const Edge& edge, double quantum_fraction, std::uint64_t seed) {
  RandomStream rng = clause_stream(seed, edge.pair_index);
  const ClauseKind kind = rng.bernoulli(quantum_fraction) ? ClauseKind::Quantum : ClauseKind::Classical;
  return Clause{edge.i, edge.j, sample_clause(kind, rng)};
}

Instance generate_instance(const EnsembleParams& params) {
  RandomStream graph_rng(derive_key(params.seed, std::string_view("graph")));
  const std::vector<Edge> edges = sample_graph(params, graph_rng);
  std::vector<Clause> clauses;
  clauses.reserve(edges.size());
  RngLineage lineage{params.seed, {}};
  lineage.clause_streams.reserve(edges.size());
  for (const Edge& e : edges) {
    clauses.push_back(draw_clause(e, params.quantum_fraction, params.seed));
    lineage.clause_streams.push_back(e.pair_index);
  }
  return Instance(params.n_qubits, std::move(clauses), params, std::move(lineage));
}

}  // namespace mixsat
