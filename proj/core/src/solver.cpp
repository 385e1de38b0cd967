#include "mixsat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <tuple>

#include <fmt/format.h>

#include "mixsat/graph.hpp"

namespace mixsat {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::SAT: return "SAT";
    case Status::UNSAT: return "UNSAT";
    case Status::UNKNOWN: return "UNKNOWN";
  }
  return "?";
}

std::string_view to_string(Certificate c) {
  switch (c) {
    case Certificate::None: return "none";
    case Certificate::ClassicalImplicationCycle: return "classical_implication_cycle";
    case Certificate::ClosureInfeasible: return "closure_infeasible";
    case Certificate::OracleKernelZero: return "oracle_kernel_zero";
    case Certificate::PenalizedLoop: return "penalized_loop";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Classical: return "classical";
    case Strategy::Product: return "product";
    case Strategy::Oracle: return "oracle";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "auto") return Strategy::Auto;
  if (name == "classical") return Strategy::Classical;
  if (name == "product") return Strategy::Product;
  if (name == "oracle") return Strategy::Oracle;
  throw std::invalid_argument(fmt::format("unknown strategy '{}' (expected auto, classical, product or oracle)", name));
}

WitnessCheck verify_witness(const Instance& instance, std::span<const Ray2> state) {
  if (state.size() != instance.n_qubits())
    throw std::invalid_argument(
        fmt::format("state covers {} sites but the instance has {}", state.size(), instance.n_qubits()));
  WitnessCheck check;
  for (const auto& c : instance.clauses()) {
    const double r = std::abs(clause_overlap(c.ray(), state[c.i].amplitudes(), state[c.j].amplitudes()));
    check.max_residual = std::max(check.max_residual, r);
  }
  check.passed = check.max_residual < kWitnessTolerance;
  return check;
}

namespace {

constexpr double kDetachTolerance = 1e-12;
constexpr double kSnapTolerance = 1e-13;
constexpr double kVacuousTolerance = 1e-10;
constexpr double kMarginalResidual = 1e-6;
constexpr double kRankOneTolerance = 1e-12;

struct TwoSat {
  bool sat = false;
  std::vector<std::uint8_t> bits;
  std::optional<Site> conflict;
};

// Literal node 2s + v stands for "site s takes bit v".
TwoSat two_sat(const Instance& instance) {
  const std::uint32_t n = instance.n_qubits();
  const std::uint32_t nodes = 2 * n;
  std::vector<std::uint32_t> offsets(nodes + 1, 0), targets;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  arcs.reserve(2 * instance.clause_count());
  for (const auto& c : instance.clauses()) {
    const auto& f = c.classical_payload();
    arcs.emplace_back(2 * c.i + f.bit_i, 2 * c.j + (1 - f.bit_j));
    arcs.emplace_back(2 * c.j + f.bit_j, 2 * c.i + (1 - f.bit_i));
  }
  for (const auto& [a, b] : arcs) ++offsets[a + 1];
  for (std::uint32_t k = 0; k < nodes; ++k) offsets[k + 1] += offsets[k];
  targets.resize(arcs.size());
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [a, b] : arcs) targets[fill[a]++] = b;

  // Iterative Tarjan; components come out in reverse topological order.
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(nodes, kUnset), low(nodes, 0), comp(nodes, kUnset);
  std::vector<std::uint32_t> stack, call;
  std::vector<std::uint32_t> cursor(nodes, 0);
  std::vector<bool> on_stack(nodes, false);
  std::uint32_t counter = 0, n_comp = 0;
  for (std::uint32_t root = 0; root < nodes; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back(root);
    while (!call.empty()) {
      const std::uint32_t v = call.back();
      if (index[v] == kUnset) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        cursor[v] = offsets[v];
      }
      bool descended = false;
      while (cursor[v] < offsets[v + 1]) {
        const std::uint32_t w = targets[cursor[v]++];
        if (index[w] == kUnset) {
          call.push_back(w);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          const std::uint32_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = n_comp;
          if (w == v) break;
        }
        ++n_comp;
      }
      call.pop_back();
      if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
    }
  }

  TwoSat out;
  out.bits.assign(n, 0);
  for (Site s = 0; s < n; ++s) {
    if (comp[2 * s] == comp[2 * s + 1]) {
      out.conflict = s;
      return out;
    }
    out.bits[s] = comp[2 * s + 1] < comp[2 * s] ? 1 : 0;
  }
  out.sat = true;
  return out;
}

double vnorm(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

Vec2 normalized(Vec2 v) {
  const double n = vnorm(v);
  v[0] /= n;
  v[1] /= n;
  for (auto& x : v)
    if (std::abs(x) < kSnapTolerance) x = 0.0;
  const double m = vnorm(v);
  v[0] /= m;
  v[1] /= m;
  return v;
}

// Sub-instance on a subset of sites, relabeled in the given order.
Instance extract(const Instance& instance, const std::vector<Site>& sites, const std::vector<std::uint32_t>& clauses,
                 std::vector<std::uint32_t>& local) {
  for (std::uint32_t k = 0; k < sites.size(); ++k) local[sites[k]] = k;
  std::vector<Clause> out;
  out.reserve(clauses.size());
  for (const auto id : clauses) {
    const Clause& c = instance.clauses()[id];
    out.push_back(Clause::between(local[c.i], local[c.j], c.payload));
  }
  std::sort(out.begin(), out.end(), [](const Clause& a, const Clause& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return Instance(static_cast<std::uint32_t>(sites.size()), std::move(out));
}

struct Outcome {
  Status status = Status::UNKNOWN;
  std::vector<Vec2> states;
  Certificate certificate = Certificate::None;
  std::string reason;
  double residual = 0.0;
  std::optional<Site> conflict;
  bool classical = false;
  bool product = false;
};

struct Budget {
  int recursions = 64;
};

class Searcher {
 public:
  Searcher(RandomStream& rng, Budget& budget) : rng_(rng), budget_(budget) {}

  // Any instance; split into connected components.
  Outcome solve(const Instance& instance) {
    Outcome total;
    total.status = Status::SAT;
    total.states.assign(instance.n_qubits(), Vec2{1.0, 0.0});
    const Adjacency adj(instance);
    const Components comps = connected_components(adj, static_cast<std::uint32_t>(instance.clause_count()));
    std::vector<std::uint32_t> local(instance.n_qubits(), 0);
    for (std::uint32_t c = 0; c < comps.count; ++c) {
      if (comps.sites[c].size() == 1) continue;
      const Instance piece = extract(instance, comps.sites[c], comps.edges[c], local);
      Outcome sub = solve_connected(piece);
      total.classical |= sub.classical;
      total.product |= sub.product;
      total.residual = std::max(total.residual, sub.residual);
      if (sub.status == Status::UNSAT) {
        sub.states.clear();
        if (sub.conflict) sub.conflict = comps.sites[c][*sub.conflict];
        sub.classical = total.classical;
        sub.product = total.product;
        return sub;
      }
      if (sub.status == Status::UNKNOWN) {
        total.status = Status::UNKNOWN;
        total.reason = sub.reason;
        continue;
      }
      for (std::size_t k = 0; k < comps.sites[c].size(); ++k) total.states[comps.sites[c][k]] = sub.states[k];
    }
    if (total.status != Status::SAT) total.states.clear();
    return total;
  }

  Outcome solve_connected(const Instance& inst) {
    if (inst.all_classical()) return classical(inst);
    Outcome out = closure_search(inst);
    out.product = true;
    return out;
  }

  // Tries extra Haar-random roots on a component known to be satisfiable.
  Outcome retry_random(const Instance& inst, int attempts) {
    Prepared prep(inst);
    Outcome out;
    out.product = true;
    for (int k = 0; k < attempts; ++k) {
      const Attempt a = attempt(prep, haar_ray<2>(rng_).amplitudes());
      if (a.kind == AttemptKind::Pass) {
        out.status = Status::SAT;
        out.states = a.states;
        out.residual = a.residual;
        return out;
      }
    }
    out.status = Status::UNKNOWN;
    out.reason = "kernel is nonzero but no product witness was found";
    return out;
  }

 private:
  Outcome classical(const Instance& inst) {
    Outcome out;
    out.classical = true;
    const TwoSat r = two_sat(inst);
    if (!r.sat) {
      out.status = Status::UNSAT;
      out.certificate = Certificate::ClassicalImplicationCycle;
      out.conflict = r.conflict;
      out.residual = 1.0;
      return out;
    }
    out.status = Status::SAT;
    out.states.resize(inst.n_qubits());
    for (Site s = 0; s < inst.n_qubits(); ++s) out.states[s] = r.bits[s] ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
    return out;
  }

  struct Prepared {
    const Instance& inst;
    Adjacency adj;
    std::vector<Mat2> form;   // C
    std::vector<Mat2> to_i;   // maps a j-site state to the i-site
    std::vector<Mat2> to_j;   // maps an i-site state to the j-site
    // Sites reachable from site 0 through non-vanishing transfers, in BFS
    // order; m[s] is the normalized linear image of the root ray at s.
    std::vector<Site> order;
    std::vector<Site> parent;
    std::vector<std::uint32_t> parent_clause;
    std::vector<Mat2> m;
    // Clauses between two reached sites that were not used to reach either.
    std::vector<std::uint32_t> closures;

    explicit Prepared(const Instance& instance) : inst(instance), adj(instance) {
      const auto& clauses = inst.clauses();
      form.reserve(clauses.size());
      for (const auto& c : clauses) {
        const Ray4 phi = c.ray();
        form.push_back(clause_form(phi));
        to_i.push_back(transfer_matrix(phi));
        to_j.push_back(transfer_matrix_to_j(phi));
      }
      const std::uint32_t n = inst.n_qubits();
      constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
      parent.assign(n, kNone);
      parent_clause.assign(n, kNone);
      m.assign(n, Mat2::zero());
      std::vector<bool> reached(n, false), tree(clauses.size(), false);
      reached[0] = true;
      m[0] = Mat2::identity();
      order.push_back(0);
      for (std::size_t head = 0; head < order.size(); ++head) {
        const Site s = order[head];
        for (const auto& e : adj.at(s)) {
          if (reached[e.neighbor]) continue;
          const Mat2 next = transfer(e.clause, s) * m[s];
          const double f = next.frobenius();
          if (f <= kDetachTolerance) continue;
          reached[e.neighbor] = true;
          tree[e.clause] = true;
          parent[e.neighbor] = s;
          parent_clause[e.neighbor] = e.clause;
          m[e.neighbor] = (1.0 / f) * next;
          order.push_back(e.neighbor);
        }
      }
      for (std::uint32_t k = 0; k < clauses.size(); ++k)
        if (!tree[k] && reached[clauses[k].i] && reached[clauses[k].j]) closures.push_back(k);
    }

    const Mat2& transfer(std::uint32_t clause, Site from) const {
      return inst.clauses()[clause].i == from ? to_j[clause] : to_i[clause];
    }
  };

  enum class AttemptKind { Pass, Fail, Marginal, Unknown };

  struct Attempt {
    AttemptKind kind = AttemptKind::Fail;
    std::vector<Vec2> states;
    double residual = 0.0;
    std::string reason;
  };

  Attempt attempt(const Prepared& p, const Vec2& root) {
    const std::uint32_t n = p.inst.n_qubits();
    std::vector<Vec2> psi(n);
    std::vector<bool> fixed(n, false);
    psi[0] = normalized(root);
    fixed[0] = true;
    for (std::size_t k = 1; k < p.order.size(); ++k) {
      const Site c = p.order[k];
      const Site par = p.parent[c];
      if (!fixed[par]) continue;
      const Vec2 w = p.transfer(p.parent_clause[c], par).apply(psi[par]);
      if (vnorm(w) <= kDetachTolerance) continue;
      psi[c] = normalized(w);
      fixed[c] = true;
    }

    // Detached sites with a fixed neighbour whose transfer does not vanish
    // are forced.
    std::deque<Site> work;
    for (Site s = 0; s < n; ++s)
      if (fixed[s]) work.push_back(s);
    while (!work.empty()) {
      const Site f = work.front();
      work.pop_front();
      for (const auto& inc : p.adj.at(f)) {
        if (fixed[inc.neighbor]) continue;
        const Vec2 w = p.transfer(inc.clause, f).apply(psi[f]);
        if (vnorm(w) <= kDetachTolerance) continue;
        psi[inc.neighbor] = normalized(w);
        fixed[inc.neighbor] = true;
        work.push_back(inc.neighbor);
      }
    }

    Attempt out;
    const auto& clauses = p.inst.clauses();
    for (std::uint32_t k = 0; k < clauses.size(); ++k) {
      const Clause& c = clauses[k];
      if (!fixed[c.i] || !fixed[c.j]) continue;
      const Vec2 ci = p.form[k].apply(psi[c.j]);
      const double r = std::abs(psi[c.i][0] * ci[0] + psi[c.i][1] * ci[1]);
      out.residual = std::max(out.residual, r);
    }
    if (out.residual >= kWitnessTolerance) {
      out.kind = out.residual <= kMarginalResidual ? AttemptKind::Marginal : AttemptKind::Fail;
      return out;
    }

    std::vector<Site> loose;
    for (Site s = 0; s < n; ++s)
      if (!fixed[s]) loose.push_back(s);
    if (!loose.empty()) {
      std::vector<std::uint32_t> inner;
      for (std::uint32_t k = 0; k < clauses.size(); ++k)
        if (!fixed[clauses[k].i] && !fixed[clauses[k].j]) inner.push_back(k);
      std::vector<std::uint32_t> local(n, 0);
      const Instance rest = extract(p.inst, loose, inner, local);
      if (budget_.recursions <= 0) {
        out.kind = AttemptKind::Unknown;
        out.reason = "detached-subproblem budget exhausted";
        return out;
      }
      --budget_.recursions;
      const Outcome sub = solve(rest);
      if (sub.status == Status::UNSAT) {
        out.kind = AttemptKind::Fail;
        out.residual = std::max(out.residual, 1.0);
        return out;
      }
      if (sub.status == Status::UNKNOWN) {
        out.kind = AttemptKind::Unknown;
        out.reason = sub.reason;
        return out;
      }
      for (std::size_t k = 0; k < loose.size(); ++k) psi[loose[k]] = sub.states[k];
    }
    out.kind = AttemptKind::Pass;
    out.states = std::move(psi);
    return out;
  }

  // Projective roots (x : y) of a x^2 + 2 b x y + c y^2, kept as vectors so a
  // vanishing leading coefficient needs no division.
  static std::vector<Vec2> quadratic_roots(cplx a, cplx b, cplx c) {
    const bool solve_for_x = std::abs(a) >= std::abs(c);
    const cplx lead = solve_for_x ? a : c;
    const cplx tail = solve_for_x ? c : a;
    const cplx disc = std::sqrt(b * b - lead * tail);
    // q = -(b + sign * sqrt(disc)) with the sign avoiding cancellation.
    const cplx q = std::real(std::conj(b) * disc) >= 0.0 ? -(b + disc) : -(b - disc);
    std::vector<Vec2> raw;
    if (std::abs(q) == 0.0) {
      raw.push_back(solve_for_x ? Vec2{-b, lead} : Vec2{lead, -b});
    } else if (solve_for_x) {
      raw.push_back(Vec2{q, lead});
      raw.push_back(Vec2{tail, q});
    } else {
      raw.push_back(Vec2{lead, q});
      raw.push_back(Vec2{q, tail});
    }
    std::vector<Vec2> roots;
    for (const Vec2& r : raw) {
      if (vnorm(r) == 0.0) continue;
      const Vec2 v = normalized(r);
      bool dup = false;
      for (const auto& w : roots) {
        const double ov = std::abs(std::conj(w[0]) * v[0] + std::conj(w[1]) * v[1]);
        if (ov > 1.0 - 1e-14) dup = true;
      }
      if (!dup) roots.push_back(v);
    }
    return roots;
  }

  // A rank-one form Q = x y^T factors as (x.v)(y.v); its roots are read off
  // exactly instead of through the quadratic formula, which would lose half
  // the digits on the double root x ~ y.
  static std::vector<Vec2> form_roots(const Mat2& q, cplx a, cplx b, cplx d) {
    const double scale = q.frobenius();
    if (std::abs(q.det()) > kRankOneTolerance * scale * scale) return quadratic_roots(a, b, d);
    const int col = std::norm(q(0, 0)) + std::norm(q(1, 0)) >= std::norm(q(0, 1)) + std::norm(q(1, 1)) ? 0 : 1;
    const int row = std::norm(q(0, 0)) + std::norm(q(0, 1)) >= std::norm(q(1, 0)) + std::norm(q(1, 1)) ? 0 : 1;
    std::vector<Vec2> roots;
    for (const Vec2& u : {Vec2{q(0, col), q(1, col)}, Vec2{q(row, 0), q(row, 1)}}) {
      const Vec2 v = normalized(Vec2{-u[1], u[0]});
      bool dup = false;
      for (const auto& w : roots) dup = dup || std::abs(std::conj(w[0]) * v[0] + std::conj(w[1]) * v[1]) > 1.0 - 1e-14;
      if (!dup) roots.push_back(v);
    }
    return roots;
  }

  Outcome closure_search(const Instance& inst) {
    const Prepared p(inst);

    const auto& m = p.m;

    std::vector<Vec2> candidates;
    bool generic = true;
    // The best-conditioned closure form supplies the candidate roots.
    double best = kVacuousTolerance;
    for (const auto k : p.closures) {
      const Clause& c = inst.clauses()[k];
      const Mat2 q = m[c.i].transpose() * p.form[k] * m[c.j];
      const cplx a = q(0, 0), b = 0.5 * (q(0, 1) + q(1, 0)), d = q(1, 1);
      const double size = std::sqrt(std::norm(a) + 2.0 * std::norm(b) + std::norm(d));
      if (size <= best) continue;
      best = size;
      candidates = form_roots(q, a / size, b / size, d / size);
      generic = false;
    }
    if (generic) {
      candidates.push_back(haar_ray<2>(rng_).amplitudes());
      candidates.push_back(haar_ray<2>(rng_).amplitudes());
    }

    Outcome out;
    double best_fail = std::numeric_limits<double>::infinity();
    bool inconclusive = false;
    std::string reason;
    for (const auto& v : candidates) {
      Attempt a = attempt(p, v);
      if (a.kind == AttemptKind::Pass) {
        out.status = Status::SAT;
        out.states = std::move(a.states);
        out.residual = a.residual;
        return out;
      }
      best_fail = std::min(best_fail, a.residual);
      if (a.kind == AttemptKind::Marginal) {
        inconclusive = true;
        reason = fmt::format("closure residual {:.3g} is between the decision thresholds", a.residual);
      } else if (a.kind == AttemptKind::Unknown) {
        inconclusive = true;
        reason = a.reason;
      }
    }
    out.residual = std::isfinite(best_fail) ? best_fail : 0.0;
    if (generic) {
      out.status = Status::UNKNOWN;
      out.reason = inconclusive ? reason : "all closure constraints vacuous and generic roots failed";
      return out;
    }
    if (inconclusive) {
      out.status = Status::UNKNOWN;
      out.reason = reason;
      return out;
    }
    out.status = Status::UNSAT;
    out.certificate = candidates.size() == 2 ? Certificate::PenalizedLoop : Certificate::ClosureInfeasible;
    return out;
  }

  RandomStream& rng_;
  Budget& budget_;
};

std::string join_path(std::initializer_list<std::pair<bool, std::string_view>> parts) {
  std::string out;
  for (const auto& [on, name] : parts) {
    if (!on) continue;
    if (!out.empty()) out += '+';
    out += name;
  }
  return out;
}

ProductState to_rays(const std::vector<Vec2>& states) {
  ProductState out;
  out.reserve(states.size());
  for (const auto& v : states) out.push_back(Ray2::from_vector(v));
  return out;
}

void finish_sat(Verdict& v, const Instance& instance, ProductState witness) {
  const WitnessCheck check = verify_witness(instance, witness);
  if (!check.passed) {
    v.status = Status::UNKNOWN;
    v.unknown_reason = fmt::format("assembled witness failed verification (residual {:.3g})", check.max_residual);
    v.residual = check.max_residual;
    return;
  }
  v.status = Status::SAT;
  v.residual = check.max_residual;
  v.witness = std::move(witness);
}

Verdict product_on_core(const Instance& instance, const CoreReport& report, const ProductOptions& options) {
  Verdict v;
  v.core_sites = static_cast<std::uint32_t>(report.core_sites.size());
  RandomStream rng(derive_key(options.seed, "product"));
  const Instance& core = report.core;
  const Adjacency adj(core);
  const Components comps = connected_components(adj, static_cast<std::uint32_t>(core.clause_count()));
  std::vector<Vec2> core_states(core.n_qubits(), Vec2{1.0, 0.0});
  std::vector<std::uint32_t> local(core.n_qubits(), 0);
  bool used_classical = false, used_product = false, used_oracle = false;
  std::optional<std::string> unknown;
  double residual = 0.0;

  for (std::uint32_t c = 0; c < comps.count; ++c) {
    const Instance piece = extract(core, comps.sites[c], comps.edges[c], local);
    Budget budget{options.recursion_budget};
    Searcher searcher(rng, budget);
    Outcome r = searcher.solve_connected(piece);
    used_classical |= r.classical;
    used_product |= r.product;
    if (r.status == Status::UNKNOWN && options.oracle_cap > 0 && piece.n_qubits() <= options.oracle_cap) {
      used_oracle = true;
      if (exact_kernel_dimension(piece, options.oracle_cap) == 0) {
        r.status = Status::UNSAT;
        r.certificate = Certificate::OracleKernelZero;
      } else {
        Budget retry_budget{options.recursion_budget};
        Searcher again(rng, retry_budget);
        Outcome retry = again.retry_random(piece, 16);
        if (retry.status == Status::SAT) r = std::move(retry);
        else r.reason = retry.reason;
      }
    }
    residual = std::max(residual, r.residual);
    if (r.status == Status::UNSAT) {
      v.status = Status::UNSAT;
      v.certificate = r.certificate;
      v.residual = r.residual;
      if (r.conflict) v.conflict_site = report.core_sites[comps.sites[c][*r.conflict]];
      v.solver_path = join_path({{true, "snip"}, {used_classical, "classical"}, {used_product, "product"}, {used_oracle, "oracle"}});
      return v;
    }
    if (r.status == Status::UNKNOWN) {
      if (!unknown) unknown = r.reason;
      continue;
    }
    for (std::size_t k = 0; k < comps.sites[c].size(); ++k) core_states[comps.sites[c][k]] = r.states[k];
  }

  v.solver_path = join_path({{true, "snip"}, {used_classical, "classical"}, {used_product, "product"}, {used_oracle, "oracle"}});
  if (unknown) {
    v.status = Status::UNKNOWN;
    v.unknown_reason = *unknown;
    v.residual = residual;
    return v;
  }
  finish_sat(v, instance, replay_snip(instance, report, to_rays(core_states)));
  return v;
}

}  // namespace

ProductState replay_snip(const Instance& instance, const CoreReport& report, std::span<const Ray2> core_state) {
  if (core_state.size() != report.core_sites.size())
    throw std::invalid_argument(fmt::format("core state has {} sites, core has {}", core_state.size(), report.core_sites.size()));
  ProductState state(instance.n_qubits());
  for (std::size_t k = 0; k < report.core_sites.size(); ++k) state[report.core_sites[k]] = core_state[k];
  const auto& clauses = instance.clauses();
  for (auto it = report.snip_sequence.rbegin(); it != report.snip_sequence.rend(); ++it) {
    const Site s = it->site;
    if (it->clauses.empty()) {
      state[s] = Ray2();
    } else if (it->clauses.size() == 1) {
      const Clause& c = clauses[it->clauses.front()];
      const Site t = c.other(s);
      const Ray4 phi = c.ray();
      const Mat2 transfer = c.i == s ? transfer_matrix(phi) : transfer_matrix_to_j(phi);
      const Vec2 w = transfer.apply(state[t].amplitudes());
      state[s] = vnorm(w) <= kDetachTolerance ? Ray2() : Ray2::from_vector(w);
    } else {
      const int forbidden = clauses[it->clauses.front()].forbidden_bit_at(s);
      state[s] = Ray2::basis(static_cast<std::size_t>(1 - forbidden));
    }
  }
  return state;
}

Verdict solve_classical(const Instance& instance) {
  if (!instance.all_classical()) throw NotClassicalError("not classical: instance contains quantum clauses");
  Verdict v;
  v.solver_path = "classical";
  v.core_sites = instance.n_qubits();
  const TwoSat r = two_sat(instance);
  if (!r.sat) {
    v.status = Status::UNSAT;
    v.certificate = Certificate::ClassicalImplicationCycle;
    v.conflict_site = r.conflict;
    v.residual = 1.0;
    return v;
  }
  ProductState witness;
  witness.reserve(instance.n_qubits());
  for (const auto b : r.bits) witness.push_back(Ray2::basis(b));
  finish_sat(v, instance, std::move(witness));
  return v;
}

Verdict solve_product_state(const Instance& instance, const ProductOptions& options) {
  return product_on_core(instance, snip_core(instance), options);
}

Verdict solve(const Instance& instance, const SolveOptions& options) {
  switch (options.strategy) {
    case Strategy::Classical:
      return solve_classical(instance);
    case Strategy::Product:
      return solve_product_state(instance, ProductOptions{options.seed, 64, 0});
    case Strategy::Oracle: {
      const std::uint64_t dim = exact_kernel_dimension(instance, options.oracle_cap);
      if (dim == 0) {
        Verdict v;
        v.status = Status::UNSAT;
        v.certificate = Certificate::OracleKernelZero;
        v.solver_path = "oracle";
        v.core_sites = instance.n_qubits();
        return v;
      }
      Verdict v = solve_product_state(instance, ProductOptions{options.seed, 64, options.oracle_cap});
      v.solver_path = "oracle+" + v.solver_path;
      if (v.status == Status::UNSAT) {
        v.status = Status::UNKNOWN;
        v.certificate = Certificate::None;
        v.unknown_reason = "oracle kernel is nonzero but the product search reported UNSAT";
      }
      return v;
    }
    case Strategy::Auto:
      break;
  }
  const CoreReport report = snip_core(instance);
  if (report.empty()) {
    Verdict v;
    v.solver_path = "snip";
    finish_sat(v, instance, replay_snip(instance, report, {}));
    return v;
  }
  if (report.core.all_classical()) {
    Verdict v = solve_classical(report.core);
    v.core_sites = report.core.n_qubits();
    v.solver_path = "snip+classical";
    if (v.status == Status::UNSAT) {
      if (v.conflict_site) v.conflict_site = report.core_sites[*v.conflict_site];
      return v;
    }
    if (v.status == Status::SAT) finish_sat(v, instance, replay_snip(instance, report, *v.witness));
    return v;
  }
  return product_on_core(instance, report, ProductOptions{options.seed, 64, options.oracle_cap});
}

}  // namespace mixsat
