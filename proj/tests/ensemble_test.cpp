#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "mixsat/ensemble.hpp"
#include "mixsat/instance_io.hpp"

using namespace mixsat;

namespace {

EnsembleParams params(std::uint32_t n, double alpha, double beta, GraphModel m = GraphModel::GNP,
                      std::uint64_t seed = 1) {
  EnsembleParams p;
  p.n_qubits = n;
  p.clause_density = alpha;
  p.quantum_fraction = beta;
  p.graph_model = m;
  p.seed = seed;
  return p;
}

double binom_cdf(std::uint64_t n, double p, std::uint64_t k) {
  double s = 0.0;
  for (std::uint64_t x = 0; x <= k; ++x)
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * std::log(p) +
                  (n - x) * std::log1p(-p));
  return s;
}

std::string expect_format_error(const std::string& doc) {
  try {
    instance_from_string(doc);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_NO_THROW(params(10, 0.5, 0.5).validate());
  EXPECT_THROW(params(0, 0.5, 0.5).validate(), EnsembleError);
  EXPECT_THROW(params(10, -1, 0.5).validate(), EnsembleError);
  EXPECT_THROW(params(10, 0.5, 1.5).validate(), EnsembleError);
  // p = alpha N / C(N,2) > 1
  EXPECT_THROW(params(4, 2.0, 0.5).validate(), EnsembleError);
  EXPECT_THROW(params(4, 2.0, 0.5, GraphModel::GNM).validate(), EnsembleError);
  EXPECT_EQ(graph_model_from_string("gnm"), GraphModel::GNM);
  EXPECT_THROW(graph_model_from_string("ba"), EnsembleError);
}

TEST(Params, Probability) {
  const auto p = params(100, 0.7, 0);
  EXPECT_NEAR(p.edge_probability() * p.pair_count(), 70.0, 1e-9);
  EXPECT_EQ(params(100, 0.7, 0, GraphModel::GNM).target_edge_count(), 70u);
}

TEST(PairIndex, RoundTrip) {
  for (Site j = 1; j < 60; ++j)
    for (Site i = 0; i < j; ++i) {
      const auto e = pair_from_index(pair_index(i, j));
      EXPECT_EQ(e.i, i);
      EXPECT_EQ(e.j, j);
    }
}

TEST(BinomialQuantile, MatchesCdf) {
  RandomStream r(3);
  for (int t = 0; t < 300; ++t) {
    const std::uint64_t n = 1 + r.bounded(200);
    const double p = r.uniform();
    const double u = r.uniform();
    const auto k = binomial_quantile(n, p, u);
    EXPECT_GT(binom_cdf(n, p, k), u - 1e-9);
    if (k > 0) { EXPECT_LE(binom_cdf(n, p, k - 1), u + 1e-9); }
  }
  EXPECT_EQ(binomial_quantile(10, 1.0, 0.3), 10u);
  EXPECT_EQ(binomial_quantile(10, 0.0, 0.3), 0u);
}

TEST(SampleGraph, TwoSitesOneEdge) {
  RandomStream r(1);
  const auto edges = sample_graph(params(2, 0.5, 0), r);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].i, 0u);
  EXPECT_EQ(edges[0].j, 1u);
}

TEST(SampleGraph, GnpEdgeCountStatistics) {
  const auto p = params(1000, 0.7, 0);
  const double q = p.edge_probability();
  const double sigma = std::sqrt(p.pair_count() * q * (1 - q));
  const int draws = 10000;
  double sum = 0.0;
  for (int d = 0; d < draws; ++d) {
    RandomStream r(derive_key(77, d));
    sum += sample_graph(p, r).size();
  }
  EXPECT_NEAR(sum / draws, 700.0, 3 * sigma / std::sqrt(draws));
}

TEST(SampleGraph, SimpleAndSorted) {
  RandomStream r(5);
  const auto edges = sample_graph(params(300, 1.5, 0, GraphModel::GNM), r);
  EXPECT_EQ(edges.size(), 450u);
  std::set<std::pair<Site, Site>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    EXPECT_LT(edges[k].i, edges[k].j);
    EXPECT_EQ(edges[k].pair_index, pair_index(edges[k].i, edges[k].j));
    EXPECT_TRUE(seen.insert({edges[k].i, edges[k].j}).second);
    if (k) { EXPECT_LT(std::pair(edges[k - 1].i, edges[k - 1].j), std::pair(edges[k].i, edges[k].j)); }
  }
}

TEST(SampleGraph, NestedAcrossAlpha) {
  for (auto model : {GraphModel::GNP, GraphModel::GNM})
    for (int s = 0; s < 20; ++s) {
      RandomStream a(s), b(s);
      const auto lo = sample_graph(params(200, 0.4, 0, model), a);
      const auto hi = sample_graph(params(200, 0.9, 0, model), b);
      std::set<std::uint64_t> big;
      for (const auto& e : hi) big.insert(e.pair_index);
      for (const auto& e : lo) EXPECT_TRUE(big.count(e.pair_index)) << s;
    }
}

TEST(SampleClause, ClassicalUniform) {
  RandomStream r(6);
  std::array<int, 4> hits{};
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const auto c = std::get<ClassicalPayload>(sample_clause(ClauseKind::Classical, r));
    ++hits[2 * c.bit_i + c.bit_j];
  }
  double chi2 = 0.0;
  for (int h : hits) chi2 += (h - n / 4.0) * (h - n / 4.0) / (n / 4.0);
  // 3 dof, p = 0.001
  EXPECT_LT(chi2, 16.27);
}

TEST(SampleClause, QuantumMoments) {
  RandomStream r(7);
  const int n = 100000;
  std::array<double, 4> s{};
  for (int k = 0; k < n; ++k) {
    const auto q = std::get<QuantumPayload>(sample_clause(ClauseKind::Quantum, r));
    ASSERT_NEAR(norm(q.ray.amplitudes()), 1.0, 1e-12);
    ASSERT_GE(q.ray[0].real(), 0.0);
    for (int a = 0; a < 4; ++a) s[a] += std::norm(q.ray[a]);
  }
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(s[a] / n, 0.25, 3 * std::sqrt(3.0 / 80.0 / n));
}

TEST(Generate, DegenerateMixtures) {
  const auto c = generate_instance(params(200, 1.0, 0.0));
  EXPECT_TRUE(c.all_classical());
  const auto q = generate_instance(params(200, 1.0, 1.0));
  EXPECT_TRUE(q.all_quantum());
  EXPECT_GT(q.clause_count(), 0u);
}

TEST(Generate, QuantumFraction) {
  std::uint64_t total = 0, quantum = 0;
  for (std::uint64_t s = 0; total < 10000; ++s) {
    const auto inst = generate_instance(params(500, 1.0, 0.5, GraphModel::GNP, s));
    total += inst.clause_count();
    quantum += inst.quantum_count();
  }
  EXPECT_NEAR(static_cast<double>(quantum) / total, 0.5, 3 * std::sqrt(0.25 / total));
}

TEST(Generate, DeterministicAndLineage) {
  const auto p = params(100, 0.8, 0.5, GraphModel::GNP, 42);
  const auto a = generate_instance(p), b = generate_instance(p);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.lineage().clause_streams.size(), a.clause_count());
  for (std::size_t k = 0; k < a.clause_count(); ++k) {
    const auto& c = a.clauses()[k];
    const Edge e{c.i, c.j, a.lineage().clause_streams[k]};
    EXPECT_EQ(draw_clause(e, 0.5, 42), c);
  }
  EXPECT_NE(generate_instance(params(100, 0.8, 0.5, GraphModel::GNP, 43)), a);
}

TEST(Clause, OrientationFlip) {
  const auto c = Clause::classical(5, 2, 1, 0);
  EXPECT_EQ(c.i, 2u);
  EXPECT_EQ(c.j, 5u);
  EXPECT_EQ(c.forbidden_bit_at(5), 1);
  EXPECT_EQ(c.forbidden_bit_at(2), 0);
  RandomStream r(8);
  const auto phi = haar_ray<4>(r);
  const auto q = Clause::quantum(3, 1, phi);
  // amplitude of |b_3 b_1> on (3,1) is amplitude of |b_1 b_3> on (1,3)
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      EXPECT_NEAR(std::abs(q.ray()[2 * b + a] - phi[2 * a + b]), 0.0, 1e-15);
}

TEST(Instance, Invariants) {
  EXPECT_THROW(Instance(3, {Clause::classical(0, 1, 0, 0), Clause::classical(1, 0, 1, 1)}), InstanceError);
  EXPECT_THROW(Instance(2, {Clause::classical(0, 2, 0, 0)}), InstanceError);
  EXPECT_THROW(Clause::classical(1, 1, 0, 0), InstanceError);
}

TEST(InstanceIo, RoundTripBitExact) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = generate_instance(params(60, 1.2, 0.5, GraphModel::GNP, s));
    const auto text = instance_to_string(inst);
    const auto back = instance_from_string(text);
    EXPECT_EQ(back, inst);
    EXPECT_EQ(instance_to_string(back), text);
  }
  const Instance hand(3, {Clause::classical(0, 2, 1, 0)});
  EXPECT_EQ(instance_from_string(instance_to_string(hand)), hand);
}

TEST(InstanceIo, DuplicateEdgeRejected) {
  const std::string doc = R"({"format_version": 1, "n_qubits": 3, "params": "handcrafted", "seed": 0,
    "clauses": [{"i": 1, "j": 2, "kind": "classical", "forbidden": [0, 0]},
                {"i": 1, "j": 2, "kind": "classical", "forbidden": [1, 1]}]})";
  EXPECT_NE(expect_format_error(doc).find("simple graph violated"), std::string::npos);
}

TEST(InstanceIo, NonNormalizedRayRejected) {
  const std::string doc = R"({"format_version": 1, "n_qubits": 2, "params": "handcrafted", "seed": 0,
    "clauses": [{"i": 0, "j": 1, "kind": "quantum", "ray_re": [0.9, 0, 0, 0], "ray_im": [0, 0, 0, 0]}]})";
  EXPECT_NE(expect_format_error(doc).find("non-normalized ray"), std::string::npos);
}

TEST(InstanceIo, VersionAndMalformed) {
  try {
    instance_from_string(R"({"format_version": 99, "n_qubits": 2, "clauses": []})");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::VersionMismatch);
  }
  try {
    instance_from_string("{not json");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::Malformed);
  }
}

TEST(InstanceIo, ProductStateRoundTrip) {
  RandomStream r(9);
  std::vector<Ray2> states;
  for (int k = 0; k < 5; ++k) states.push_back(haar_ray<2>(r));
  std::stringstream ss;
  write_product_state(states, ss);
  EXPECT_EQ(read_product_state(ss), states);
}
