#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "mixsat/graph.hpp"
#include "mixsat/solver.hpp"

namespace mixsat {

namespace {

// Kernel basis of one connected component, grown one site at a time. Rows of
// the basis are indexed by bit strings over the sites added so far (bit p is
// the site added p-th).
std::uint64_t component_kernel_dimension(const Instance& instance, const Adjacency& adj,
                                         const std::vector<Site>& sites) {
  const std::size_t k = sites.size();
  std::vector<int> position(instance.n_qubits(), -1);
  std::vector<std::uint32_t> links(instance.n_qubits(), 0);

  // Greedy order: most edges into the sites already placed.
  std::vector<Site> order;
  order.reserve(k);
  Site first = sites.front();
  for (const Site s : sites)
    if (adj.degree(s) > adj.degree(first)) first = s;
  order.push_back(first);
  position[first] = 0;
  for (const auto& inc : adj.at(first)) ++links[inc.neighbor];
  while (order.size() < k) {
    Site best = 0;
    bool have = false;
    for (const Site s : sites) {
      if (position[s] >= 0) continue;
      if (!have || links[s] > links[best] || (links[s] == links[best] && adj.degree(s) < adj.degree(best))) {
        best = s;
        have = true;
      }
    }
    position[best] = static_cast<int>(order.size());
    order.push_back(best);
    for (const auto& inc : adj.at(best)) ++links[inc.neighbor];
  }

  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Identity(2, 2);
  for (std::size_t t = 1; t < k; ++t) {
    const Site s = order[t];
    const Eigen::Index rows = basis.rows();  // 2^t
    const Eigen::Index d = basis.cols();
    std::vector<const Incidence*> back;
    for (const auto& inc : adj.at(s))
      if (position[inc.neighbor] >= 0 && static_cast<std::size_t>(position[inc.neighbor]) < t) back.push_back(&inc);

    Eigen::MatrixXcd extended = Eigen::MatrixXcd::Zero(2 * rows, 2 * d);
    extended.topLeftCorner(rows, d) = basis;
    extended.bottomRightCorner(rows, d) = basis;
    if (back.empty()) {
      basis = std::move(extended);
      continue;
    }
    if (d == 0) return 0;

    const Eigen::Index half = rows / 2;
    Eigen::MatrixXcd constraints(static_cast<Eigen::Index>(back.size()) * half, 2 * d);
    for (std::size_t c = 0; c < back.size(); ++c) {
      const Clause& clause = instance.clauses()[back[c]->clause];
      const auto q = static_cast<unsigned>(position[back[c]->neighbor]);
      const bool new_is_j = clause.j == s;
      const Ray4 phi = clause.ray();
      const std::uint64_t low_mask = (std::uint64_t{1} << q) - 1;
      for (Eigen::Index rho = 0; rho < half; ++rho) {
        // Insert bit q into rho.
        const auto r = static_cast<std::uint64_t>(rho);
        const std::uint64_t base = (r & low_mask) | ((r & ~low_mask) << 1);
        const Eigen::Index row = static_cast<Eigen::Index>(c) * half + rho;
        for (int b = 0; b < 2; ++b) {
          auto block = constraints.block(row, b * d, 1, d);
          block.setZero();
          for (int a = 0; a < 2; ++a) {
            const std::size_t idx = new_is_j ? 2 * a + b : 2 * b + a;
            const cplx w = std::conj(phi[idx]);
            if (w == cplx(0.0)) continue;
            block += w * basis.row(static_cast<Eigen::Index>(base | (std::uint64_t(a) << q)));
          }
        }
      }
    }
    // Rows are combinations of orthonormal basis rows with unit-norm weights,
    // so an implied clause gives pure rounding noise; the floor keeps it out
    // of the rank.
    const NullspaceResult ns = nullspace(constraints, kDefaultRankTolerance, kDefaultRankTolerance);
    basis = extended * ns.basis;
    if (basis.cols() == 0) return 0;
  }
  return static_cast<std::uint64_t>(basis.cols());
}

}  // namespace

std::uint64_t exact_kernel_dimension(const Instance& instance, std::uint32_t n_cap) {
  if (instance.n_qubits() > n_cap)
    throw OracleCapError(fmt::format("N = {} exceeds the oracle cap {}", instance.n_qubits(), n_cap));
  if (n_cap > 30) throw OracleCapError(fmt::format("oracle cap {} is above the supported maximum 30", n_cap));
  const Adjacency adj(instance);
  const Components comps = connected_components(adj, static_cast<std::uint32_t>(instance.clause_count()));
  std::uint64_t total = 1;
  for (std::uint32_t c = 0; c < comps.count; ++c) {
    const std::uint64_t dim =
        comps.sites[c].size() == 1 ? 2 : component_kernel_dimension(instance, adj, comps.sites[c]);
    if (dim == 0) return 0;
    total *= dim;
  }
  return total;
}

}  // namespace mixsat
