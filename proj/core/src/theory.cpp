#include "mixsat/theory.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace mixsat {

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw TheoryError(fmt::format("beta = {} outside [0, 1]", beta));
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw TheoryError(fmt::format("alpha = {} must be non-negative", alpha));
}

// log Tr(M^L) = log(lambda_+^L + lambda_-^L), safe for large L.
double log_p_loop(std::uint64_t length, double beta) {
  const double root = std::sqrt(1.0 + 10.0 * beta - 7.0 * beta * beta);
  const double lp = (1.0 + beta + root) / 4.0;
  const double lm = (1.0 + beta - root) / 4.0;
  const double l = static_cast<double>(length);
  const double ratio = lm / lp;
  return l * std::log(lp) + std::log1p(std::pow(ratio, l));
}

}  // namespace

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

Eigen::Matrix2d edge_transfer_matrix(double beta) {
  check_beta(beta);
  // index 0 = classical, 1 = quantum
  Eigen::Matrix2d m;
  m << (1.0 - beta) / 2.0, beta, 1.0 - beta, beta;
  return m;
}

double lambda_plus(double beta) {
  check_beta(beta);
  return (1.0 + beta + std::sqrt(1.0 + 10.0 * beta - 7.0 * beta * beta)) / 4.0;
}

double critical_density(double beta) {
  check_beta(beta);
  return 2.0 / (1.0 + beta + std::sqrt(-7.0 * beta * beta + 10.0 * beta + 1.0));
}

PhasePoint phase_boundary(double beta) {
  PhasePoint p;
  p.beta = beta;
  p.lambda_plus = lambda_plus(beta);
  p.alpha_c = critical_density(beta);
  const Eigen::EigenSolver<Eigen::Matrix2d> es(edge_transfer_matrix(beta), false);
  double best = 0.0;
  for (int k = 0; k < 2; ++k) best = std::max(best, es.eigenvalues()[k].real());
  p.lambda_plus_numeric = best;
  return p;
}

double p_loop_unsnippable(int length, double beta, LoopMethod method) {
  check_beta(beta);
  if (length < 3) throw TheoryError(fmt::format("loop length {} must be at least 3", length));
  if (method == LoopMethod::Transfer) {
    const Eigen::Matrix2d m = edge_transfer_matrix(beta);
    Eigen::Matrix2d acc = Eigen::Matrix2d::Identity();
    for (int k = 0; k < length; ++k) acc = acc * m;
    return acc.trace();
  }
  if (length > 20) throw TheoryError(fmt::format("enumeration supports L <= 20, got {}", length));
  // bit k of mask set = edge k quantum
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << length); ++mask) {
    double w = 1.0;
    for (int k = 0; k < length; ++k) {
      const bool q = (mask >> k) & 1u;
      const bool q_next = (mask >> ((k + 1) % length)) & 1u;
      w *= q ? beta : 1.0 - beta;
      if (!q && !q_next) w *= 0.5;
    }
    total += w;
  }
  return total;
}

double expected_subgraph_count(std::uint64_t n, std::uint64_t vertices, std::uint64_t edges,
                               std::uint64_t automorphisms, double alpha) {
  check_alpha(alpha);
  if (n < 2 || vertices > n) throw TheoryError(fmt::format("subgraph on {} vertices does not fit N = {}", vertices, n));
  if (automorphisms == 0) throw TheoryError("automorphism count must be positive");
  if (alpha == 0.0) return edges == 0 ? 1.0 : 0.0;
  const double nn = static_cast<double>(n);
  const double p = 2.0 * alpha / (nn - 1.0);
  const double log_e = std::lgamma(nn + 1.0) - std::lgamma(nn - static_cast<double>(vertices) + 1.0) -
                       std::log(static_cast<double>(automorphisms)) + static_cast<double>(edges) * std::log(p);
  return std::exp(log_e);
}

double expected_unsnippable_loops(std::uint64_t n, std::uint64_t length, double alpha, double beta) {
  check_alpha(alpha);
  if (length < 3 || length > n) throw TheoryError(fmt::format("need 3 <= L <= N, got L = {}, N = {}", length, n));
  check_beta(beta);
  if (alpha == 0.0) return 0.0;
  const double nn = static_cast<double>(n), l = static_cast<double>(length);
  const double log_e = log_binomial(nn, l) + std::lgamma(l + 1.0) - std::log(2.0 * l) +
                       l * std::log(2.0 * alpha / (nn - 1.0)) +
                       (length <= 64 ? std::log(p_loop_unsnippable(static_cast<int>(length), beta)) : log_p_loop(length, beta));
  return std::exp(log_e);
}

double unsnippable_loops_limit(std::uint64_t length, double alpha, double beta) {
  check_alpha(alpha);
  const double l = static_cast<double>(length);
  return std::pow(2.0 * alpha, l) * p_loop_unsnippable(static_cast<int>(length), beta) / (2.0 * l);
}

double entropy_unsnippable(double l, double alpha, double beta) {
  check_alpha(alpha);
  if (!(l > 0.0 && l <= 1.0)) throw TheoryError(fmt::format("l = {} outside (0, 1]", l));
  const double lam = lambda_plus(beta);
  const double tail = l < 1.0 ? (1.0 - l) * std::log1p(-l) : 0.0;
  return l * (std::log(2.0 * alpha * lam) - 1.0) - tail;
}

EntropyCurve entropy_curve(double alpha, double beta, int samples) {
  if (samples < 1) throw TheoryError("entropy curve needs at least one sample");
  EntropyCurve curve;
  curve.alpha = alpha;
  curve.beta = beta;
  curve.proliferates = 2.0 * alpha * lambda_plus(beta) > 1.0;
  for (int k = 1; k <= samples; ++k) {
    const double l = static_cast<double>(k) / samples;
    curve.samples.push_back({l, entropy_unsnippable(l, alpha, beta)});
  }
  return curve;
}

double expected_motif_count(const MotifSpec& spec, std::uint64_t n, double alpha, double beta) {
  check_alpha(alpha);
  if (spec.kind == MotifKind::Loop || spec.edge_count != spec.vertex_count + 1 || spec.automorphisms == 0)
    throw TheoryError("motif spec must be a cyclomatic-2 motif with L edges on L - 1 sites");
  const std::uint64_t length = spec.edge_count;
  if (length - 1 > n) throw TheoryError(fmt::format("motif with {} sites does not fit N = {}", length - 1, n));
  if (alpha == 0.0 || spec.unsnippability_constant == 0.0) return 0.0;
  const double nn = static_cast<double>(n), l = static_cast<double>(length);
  const double log_e = std::log(spec.unsnippability_constant) + log_binomial(nn, l - 1.0) + std::lgamma(l) -
                       std::log(static_cast<double>(spec.automorphisms)) + l * std::log(2.0 * alpha / (nn - 1.0)) +
                       l * std::log(lambda_plus(beta));
  return std::exp(log_e);
}

double motif_entropy(double l, double alpha, double beta, std::uint64_t n, double gamma) {
  check_alpha(alpha);
  if (!(gamma > 0.0 && gamma <= 1.0)) throw TheoryError(fmt::format("gamma = {} outside (0, 1]", gamma));
  const double nn = static_cast<double>(n);
  const double ng = std::pow(nn, gamma);
  const double x = l * std::pow(nn, gamma - 1.0);
  if (!(l > 0.0) || !(x <= 1.0)) throw TheoryError(fmt::format("l = {} outside (0, N^(1-gamma)]", l));
  const double tail = x < 1.0 ? nn * (1.0 - x) * std::log1p(-x) : 0.0;
  return l * ng * std::log(2.0 * alpha * lambda_plus(beta)) - l * ng - tail;
}

}  // namespace mixsat
