#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mixsat/motif.hpp"

namespace mixsat {

class TheoryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PhasePoint {
  double beta = 0.0;
  double lambda_plus = 0.0;
  double alpha_c = 0.0;
  /// Dominant eigenvalue of the edge transfer matrix, computed numerically.
  double lambda_plus_numeric = 0.0;
};

/// Two-state (classical, quantum) edge transfer matrix
/// M[e, e'] = p(e') (1 - delta_{e,C} delta_{e',C} / 2).
Eigen::Matrix2d edge_transfer_matrix(double beta);

/// lambda_+ = (1 + beta + sqrt(1 + 10 beta - 7 beta^2)) / 4.
double lambda_plus(double beta);
/// alpha_c = 2 / (1 + beta + sqrt(-7 beta^2 + 10 beta + 1)).
double critical_density(double beta);

PhasePoint phase_boundary(double beta);

enum class LoopMethod { Transfer, Enumerate };

/// Probability that a loop of L sites is unsnippable when each edge is
/// independently quantum with probability beta: Tr(M^L), or the explicit sum
/// over all 2^L edge labelings (L <= 20).
double p_loop_unsnippable(int length, double beta, LoopMethod method = LoopMethod::Transfer);

/// Expected number of copies of a subgraph with the given vertex count,
/// edge count and automorphism count in G(N, p), p = 2 alpha / (N - 1).
double expected_subgraph_count(std::uint64_t n, std::uint64_t vertices, std::uint64_t edges,
                               std::uint64_t automorphisms, double alpha);

/// C(N, L) L! / (2L) (2 alpha / (N - 1))^L p_uns(L, beta).
double expected_unsnippable_loops(std::uint64_t n, std::uint64_t length, double alpha, double beta);

/// Limit of expected_unsnippable_loops as N grows at fixed L:
/// (2 alpha)^L p_uns(L, beta) / (2L).
double unsnippable_loops_limit(std::uint64_t length, double alpha, double beta);

struct EntropyPoint {
  double l = 0.0;
  /// Per-site entropy s(l) = l (log(2 alpha lambda_+) - 1) - (1 - l) log(1 - l).
  double s = 0.0;
};

struct EntropyCurve {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<EntropyPoint> samples;
  /// 2 alpha lambda_+ > 1.
  bool proliferates = false;
};

double entropy_unsnippable(double l, double alpha, double beta);
/// Samples l = k / samples, k = 1..samples.
EntropyCurve entropy_curve(double alpha, double beta, int samples);

/// c C(N, L-1) (L-1)! / a (2 alpha / (N - 1))^L lambda_+^L for the
/// cyclomatic-2 motifs; L is the motif's edge count.
double expected_motif_count(const MotifSpec& spec, std::uint64_t n, double alpha, double beta);

/// S(l) = l N^g log(2 alpha lambda_+) - l N^g - N (1 - l N^(g-1)) log(1 - l N^(g-1)).
double motif_entropy(double l, double alpha, double beta, std::uint64_t n, double gamma);

/// log of the binomial coefficient via lgamma.
double log_binomial(double n, double k);

}  // namespace mixsat
