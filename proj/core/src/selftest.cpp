#include "mixsat/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fmt/format.h>

#include "mixsat/experiment.hpp"
#include "mixsat/graph.hpp"
#include "mixsat/motif.hpp"
#include "mixsat/snip.hpp"
#include "mixsat/solver.hpp"
#include "mixsat/theory.hpp"

namespace mixsat {

namespace {

constexpr double kBetaLadder[] = {0.0, 0.25, 0.5, 0.75, 1.0};

bool fast(const SelftestOptions& o) { return o.budget == SelftestBudget::Fast; }

void say(const SelftestOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

EnsembleParams random_small_params(RandomStream& rng, std::uint64_t seed) {
  EnsembleParams p;
  p.n_qubits = 4 + static_cast<std::uint32_t>(rng.bounded(9));
  const double max_alpha = std::min(2.0, p.max_clause_density());
  p.clause_density = 0.2 + (max_alpha - 0.2) * rng.uniform();
  p.quantum_fraction = kBetaLadder[rng.bounded(5)];
  p.graph_model = GraphModel::GNP;
  p.seed = seed;
  return p;
}

CriterionResult formula_endpoints() {
  CriterionResult r{1, "formula endpoints", false, "", 0};
  const PhasePoint a = phase_boundary(0.0), b = phase_boundary(1.0);
  const double err = std::max({std::abs(a.lambda_plus - 0.5), std::abs(a.alpha_c - 1.0), std::abs(b.lambda_plus - 1.0),
                               std::abs(b.alpha_c - 0.5), std::abs(a.lambda_plus_numeric - 0.5),
                               std::abs(b.lambda_plus_numeric - 1.0)});
  r.passed = err <= 1e-12;
  r.detail = fmt::format("beta=0: lambda+={} alpha_c={}; beta=1: lambda+={} alpha_c={}; max error {:.2e}", a.lambda_plus,
                         a.alpha_c, b.lambda_plus, b.alpha_c, err);
  return r;
}

CriterionResult transfer_matrix_check() {
  CriterionResult r{2, "transfer matrix vs enumeration", false, "", 0};
  double worst = 0.0;
  for (int L = 3; L <= 12; ++L) {
    for (int k = 0; k <= 10; ++k) {
      const double beta = k / 10.0;
      const double t = p_loop_unsnippable(L, beta, LoopMethod::Transfer);
      const double e = p_loop_unsnippable(L, beta, LoopMethod::Enumerate);
      worst = std::max(worst, std::abs(t - e) / std::max(std::abs(e), 1e-300));
    }
  }
  r.passed = worst <= 1e-12;
  r.detail = fmt::format("110 (L, beta) pairs, max relative difference {:.2e}", worst);
  return r;
}

CriterionResult solver_oracle(const SelftestOptions& o) {
  CriterionResult r{3, "solver/oracle equivalence", false, "", 0};
  const int count = fast(o) ? 300 : 2000;
  RandomStream rng(derive_key(o.seed, "criterion3"));
  int decided = 0, agree = 0, unknown = 0, sat = 0;
  std::string first_mismatch;
  for (int k = 0; k < count; ++k) {
    const EnsembleParams p = random_small_params(rng, derive_key(o.seed, static_cast<std::uint64_t>(k)));
    const Instance inst = generate_instance(p);
    const Verdict v = solve(inst, SolveOptions{Strategy::Product, 0, p.seed});
    const bool oracle_sat = exact_kernel_dimension(inst) > 0;
    if (v.status == Status::UNKNOWN) {
      ++unknown;
      continue;
    }
    ++decided;
    const bool product_sat = v.status == Status::SAT;
    sat += product_sat;
    if (product_sat == oracle_sat) {
      ++agree;
    } else if (first_mismatch.empty()) {
      first_mismatch = fmt::format(" first mismatch: N={} alpha={:.3f} beta={} seed={}", p.n_qubits,
                                   p.clause_density, p.quantum_fraction, p.seed);
    }
  }
  const double unknown_rate = static_cast<double>(unknown) / count;
  r.passed = agree == decided && unknown_rate < 0.01;
  r.detail = fmt::format("{} instances, {} decided ({} SAT), {} agree, UNKNOWN rate {:.2f}%{}", count, decided, sat,
                         agree, 100.0 * unknown_rate, first_mismatch);
  return r;
}

CriterionResult snip_preservation(const SelftestOptions& o) {
  CriterionResult r{4, "snip-core SAT preservation and confluence", false, "", 0};
  const int count = fast(o) ? 100 : 500;
  RandomStream rng(derive_key(o.seed, "criterion4"));
  int same_verdict = 0, confluent = 0;
  for (int k = 0; k < count; ++k) {
    const EnsembleParams p = random_small_params(rng, derive_key(o.seed, 1000000u + static_cast<std::uint64_t>(k)));
    const Instance inst = generate_instance(p);
    const CoreReport core = snip_core(inst);
    same_verdict += (exact_kernel_dimension(inst) > 0) == (exact_kernel_dimension(core.core) > 0);
    bool ok = true;
    for (int t = 0; t < 10; ++t) {
      RandomStream order(derive_key(p.seed, "peel"), static_cast<std::uint64_t>(t));
      const CoreReport other = snip_core(inst, order);
      ok = ok && other.core == core.core && other.core_sites == core.core_sites && other.core_clauses == core.core_clauses;
    }
    confluent += ok;
  }
  r.passed = same_verdict == count && confluent == count;
  r.detail = fmt::format("{} instances: verdict preserved {}, confluent under 10 peel orders {}", count, same_verdict,
                         confluent);
  return r;
}

Instance random_unsnippable_loop(RandomStream& rng, std::uint32_t length) {
  while (true) {
    std::vector<Clause> clauses;
    for (Site s = 0; s < length; ++s) {
      const Site t = (s + 1) % length;
      if (rng.bernoulli(0.5)) {
        clauses.push_back(Clause::quantum(s, t, haar_ray<4>(rng)));
      } else {
        clauses.push_back(Clause::classical(s, t, static_cast<int>(rng.bounded(2)), static_cast<int>(rng.bounded(2))));
      }
    }
    std::sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    Instance loop(length, std::move(clauses));
    bool core = true;
    for (Site s = 0; s < length; ++s) core = core && !is_snippable(loop, s);
    if (core) return loop;
  }
}

CriterionResult loop_kernel(const SelftestOptions& o) {
  CriterionResult r{5, "unsnippable loop kernel dimension", false, "", 0};
  const int count = fast(o) ? 50 : 200;
  RandomStream rng(derive_key(o.seed, "criterion5"));
  int two = 0, mixed = 0;
  std::map<std::uint64_t, int> seen;
  for (int k = 0; k < count; ++k) {
    const auto length = 3 + static_cast<std::uint32_t>(rng.bounded(6));
    const Instance loop = random_unsnippable_loop(rng, length);
    mixed += !loop.all_classical() && !loop.all_quantum();
    const std::uint64_t dim = exact_kernel_dimension(loop);
    ++seen[dim];
    two += dim == 2;
  }
  r.passed = two == count;
  std::string dims;
  for (const auto& [d, c] : seen) dims += fmt::format(" dim{}:{}", d, c);
  r.detail = fmt::format("{} loops (L in [3,8], {} mixed), kernel dimension 2 in {};{}", count, mixed, two, dims);
  return r;
}

CriterionResult unsat_motif() {
  CriterionResult r{6, "UNSAT motif", false, "", 0};
  // Loop dislikes 01 along its orientation (SAT states: all 0, all 1); the two
  // chords penalize exactly those.
  const std::vector<Clause> clauses = {
      Clause::classical(0, 1, 0, 1), Clause::classical(1, 2, 0, 1), Clause::classical(2, 3, 0, 1),
      Clause::classical(3, 0, 0, 1), Clause::classical(0, 2, 0, 0), Clause::classical(1, 3, 1, 1)};
  const Instance motif(4, clauses);
  const Instance loop(4, std::vector<Clause>(clauses.begin(), clauses.begin() + 4));
  const std::uint64_t dim = exact_kernel_dimension(motif);
  const Verdict v = solve_classical(motif);
  const std::uint64_t loop_dim = exact_kernel_dimension(loop);
  r.passed = dim == 0 && v.status == Status::UNSAT && loop_dim == 2;
  r.detail = fmt::format("oracle kernel {}, classical solver {}, bare loop kernel {}", dim, to_string(v.status), loop_dim);
  return r;
}

// Sweep data shared by criteria 7 and 8.
struct SweepData {
  std::map<std::pair<std::uint32_t, int>, std::vector<SweepRecord>> cells;  // (N, beta index)
};

// well above the 400 minimum; at 400 the collapse objectives of neighbouring
// exponents differ by about the binomial noise floor
constexpr std::uint32_t kPhaseTrials = 2000;

std::vector<double> window_alphas(double beta) {
  const double ac = critical_density(beta);
  std::vector<double> a;
  for (int k = -6; k <= 6; ++k) a.push_back(std::round((ac + 0.025 * k) * 1e9) / 1e9);
  return a;
}

void ensure_sweep(SweepData& data, const SelftestOptions& o, std::uint32_t n, int beta_index, std::uint32_t trials) {
  const auto key = std::make_pair(n, beta_index);
  if (data.cells.count(key)) return;
  const double beta = kBetaLadder[beta_index];
  SweepConfig c;
  c.betas = {beta};
  c.alphas = window_alphas(beta);
  c.sizes = {n};
  c.trials = trials;
  c.master_seed = derive_key(o.seed, "phase-sweep");
  c.graph_model = GraphModel::GNM;
  c.workers = o.workers;
  const auto start = std::chrono::steady_clock::now();
  data.cells[key] = run_sweep(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::uint32_t unknown = 0;
  for (const auto& rec : data.cells[key]) unknown += rec.n_unknown;
  say(o, fmt::format("  swept N={} beta={} ({} cells x {} trials, {} unknown) in {:.1f}s", n, beta, c.alphas.size(),
                     trials, unknown, secs));
}

SweepData& sweep_cache() {
  static SweepData data;
  return data;
}

std::mutex& sweep_mutex() {
  static std::mutex mu;
  return mu;
}

CriterionResult phase_boundary_reproduction(const SelftestOptions& o) {
  CriterionResult r{7, "phase boundary reproduction", false, "", 0};
  const std::uint32_t trials = kPhaseTrials;
  const std::uint32_t ladder[] = {250, 500, 1000, 2000};
  std::lock_guard lock(sweep_mutex());
  auto& data = sweep_cache();
  int within = 0, shrinking = 0;
  std::string detail;
  for (int b = 0; b < 5; ++b) {
    const double ac = critical_density(kBetaLadder[b]);
    std::vector<double> gaps;
    std::string row = fmt::format("beta={} alpha_c={:.4f}:", kBetaLadder[b], ac);
    bool ok = true;
    for (const auto n : ladder) {
      ensure_sweep(data, o, n, b, trials);
      const auto& recs = data.cells[{n, b}];
      try {
        const Crossing c = find_crossing(estimate_p_sat(recs));
        gaps.push_back(std::abs(c.alpha - ac));
        row += fmt::format(" N={}:{:.4f}+-{:.4f}", n, c.alpha, c.standard_error);
      } catch (const ExperimentError& e) {
        ok = false;
        row += fmt::format(" N={}:({})", n, e.what());
      }
    }
    if (ok) {
      if (gaps.back() <= 0.03) ++within;
      bool mono = true;
      for (std::size_t k = 1; k < gaps.size(); ++k) mono = mono && gaps[k] < gaps[k - 1];
      shrinking += mono;
      row += fmt::format(" [N=2000 off by {:.4f}{}]", gaps.back(), mono ? ", shrinking" : "");
    }
    detail += (detail.empty() ? "" : "; ") + row;
  }
  r.passed = within == 5 && shrinking >= 4;
  r.detail = fmt::format("{}/5 within 0.03 at N=2000, {}/5 shrinking monotonically. {}", within, shrinking, detail);
  return r;
}

CriterionResult scaling_window(const SelftestOptions& o) {
  CriterionResult r{8, "scaling window exponent", false, "", 0};
  const std::uint32_t trials = kPhaseTrials;
  const std::uint32_t ladder[] = {500, 1000, 2000, 4000};
  std::lock_guard lock(sweep_mutex());
  auto& data = sweep_cache();
  int good = 0;
  std::string detail;
  for (const int b : {0, 4}) {
    std::vector<SweepRecord> recs;
    for (const auto n : ladder) {
      ensure_sweep(data, o, n, b, trials);
      const auto& cell = data.cells[{n, b}];
      recs.insert(recs.end(), cell.begin(), cell.end());
    }
    const double ac = critical_density(kBetaLadder[b]);
    const double quarter = scaling_collapse(recs, ac, 0.25).objective;
    const double third = scaling_collapse(recs, ac, 1.0 / 3.0).objective;
    const double half = scaling_collapse(recs, ac, 0.5).objective;
    const bool ok = third < quarter && third < half;
    good += ok;
    detail += fmt::format("{}beta={}: objective 1/4={:.3e} 1/3={:.3e} 1/2={:.3e}", detail.empty() ? "" : "; ",
                          kBetaLadder[b], quarter, third, half);
  }
  r.passed = good == 2;
  r.detail = detail;
  return r;
}

std::vector<Instance> geometrization_graphs_for(RandomStream& rng, const std::vector<std::vector<std::pair<Site, Site>>>& shapes) {
  std::vector<Instance> out;
  for (const auto& edges : shapes) {
    Site n = 0;
    for (const auto& [a, b] : edges) n = std::max({n, a + 1, b + 1});
    std::vector<Clause> clauses;
    for (const auto& [a, b] : edges) clauses.push_back(Clause::quantum(a, b, haar_ray<4>(rng)));
    std::sort(clauses.begin(), clauses.end(), [](const Clause& x, const Clause& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
    out.emplace_back(n, std::move(clauses));
  }
  return out;
}

std::vector<std::vector<std::pair<Site, Site>>> geometrization_shapes() {
  using Edges = std::vector<std::pair<Site, Site>>;
  std::vector<Edges> shapes;
  auto cycle = [](Site len) {
    Edges e;
    for (Site s = 0; s < len; ++s) e.emplace_back(s, (s + 1) % len);
    return e;
  };
  // Theta graph: two poles joined by three paths of the given lengths.
  auto theta = [](std::initializer_list<Site> lengths) {
    Edges e;
    Site next = 2;
    for (const Site len : lengths) {
      Site prev = 0;
      for (Site k = 1; k < len; ++k) {
        e.emplace_back(prev, next);
        prev = next++;
      }
      e.emplace_back(prev, 1);
    }
    return e;
  };
  for (Site len = 3; len <= 8; ++len) shapes.push_back(cycle(len));
  shapes.push_back(theta({1, 2, 2}));
  shapes.push_back(theta({2, 2, 2}));
  shapes.push_back(theta({1, 2, 3}));
  shapes.push_back(theta({2, 2, 3}));
  shapes.push_back(theta({2, 3, 3}));
  shapes.push_back(theta({1, 3, 3}));
  shapes.push_back({{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}});                  // figure eight
  shapes.push_back({{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 5}, {5, 0}});          // triangle + square
  shapes.push_back({{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {5, 3}});          // dumbbell
  shapes.push_back({{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 4}});  // longer bar
  shapes.push_back({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});                  // K4
  Edges chords = cycle(6);
  chords.emplace_back(0, 3);
  chords.emplace_back(1, 4);
  shapes.push_back(chords);
  shapes.push_back({{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}});  // prism
  shapes.push_back({{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {2, 3}, {3, 4}, {4, 1}});          // wheel
  return shapes;
}

CriterionResult geometrization(const SelftestOptions& o) {
  CriterionResult r{9, "geometrization", false, "", 0};
  const int draws = fast(o) ? 20 : 100;
  const auto shapes = geometrization_shapes();
  RandomStream rng(derive_key(o.seed, "criterion9"));
  std::vector<std::map<std::uint64_t, int>> dims(shapes.size());
  for (int d = 0; d < draws; ++d) {
    const auto graphs = geometrization_graphs_for(rng, shapes);
    for (std::size_t g = 0; g < graphs.size(); ++g) ++dims[g][exact_kernel_dimension(graphs[g])];
  }
  int constant = 0;
  std::string summary;
  for (std::size_t g = 0; g < shapes.size(); ++g) {
    constant += dims[g].size() == 1;
    summary += fmt::format("{}{}", g ? "," : "", dims[g].size() == 1 ? std::to_string(dims[g].begin()->first) : "mixed");
  }
  const double frac = static_cast<double>(constant) / static_cast<double>(shapes.size());
  r.passed = frac >= 0.99;
  r.detail = fmt::format("{} graphs x {} Haar draws: constant dimension for {} (dims {})", shapes.size(), draws, constant,
                         summary);
  return r;
}

std::uint64_t diamond_count(const Adjacency& adj) {
  std::vector<std::uint32_t> mark(adj.site_count(), 0);
  std::uint32_t stamp = 0;
  std::uint64_t total = 0;
  for (Site u = 0; u < adj.site_count(); ++u) {
    ++stamp;
    for (const auto& inc : adj.at(u)) mark[inc.neighbor] = stamp;
    for (const auto& inc : adj.at(u)) {
      const Site v = inc.neighbor;
      if (v <= u) continue;
      std::uint64_t common = 0;
      for (const auto& w : adj.at(v)) common += mark[w.neighbor] == stamp;
      total += common * (common - 1) / 2;
    }
  }
  return total;
}

CriterionResult subgraph_sampling(const SelftestOptions& o) {
  CriterionResult r{10, "subgraph count sampling", false, "", 0};
  const std::uint32_t n = 3000;
  const double alpha = 0.4, beta = 0.5;
  const int samples = fast(o) ? 300 : 1000;
  double t_sum = 0, t_sq = 0, u_sum = 0, u_sq = 0;
  for (int k = 0; k < samples; ++k) {
    const Instance inst =
        generate_instance({n, alpha, beta, GraphModel::GNP, derive_key(o.seed, 5000000u + static_cast<std::uint64_t>(k))});
    const Adjacency adj(inst);
    const auto tri = static_cast<double>(count_short_cycles(adj, 3));
    double uns = 0;
    for (Site a = 0; a < n; ++a) {
      for (const auto& ab : adj.at(a)) {
        const Site b = ab.neighbor;
        if (b <= a) continue;
        for (const auto& bc : adj.at(b)) {
          const Site c = bc.neighbor;
          if (c <= b) continue;
          for (const auto& ca : adj.at(c)) {
            if (ca.neighbor != a) continue;
            uns += unsnippable_through(inst, a, ca.clause, ab.clause) && unsnippable_through(inst, b, ab.clause, bc.clause) &&
                   unsnippable_through(inst, c, bc.clause, ca.clause);
          }
        }
      }
    }
    t_sum += tri;
    t_sq += tri * tri;
    u_sum += uns;
    u_sq += uns * uns;
  }
  auto zscore = [&](double sum, double sq, double expect) {
    const double mean = sum / samples;
    const double var = std::max(sq / samples - mean * mean, mean);
    return (mean - expect) / std::sqrt(var / samples);
  };
  const double tri_expect = expected_subgraph_count(n, 3, 3, 6, alpha);
  const double uns_expect = expected_unsnippable_loops(n, 3, alpha, beta);
  const double z_tri = zscore(t_sum, t_sq, tri_expect);
  const double z_uns = zscore(u_sum, u_sq, uns_expect);

  // Diamonds (4 sites, 5 edges, one cross-link) over N = 50 * 2^k.
  const double d_alpha = 2.0;
  const std::uint64_t target = fast(o) ? 200 : 1000;
  std::vector<double> xs, ys;
  std::string ladder;
  for (int k = 0; k < 8; ++k) {
    const std::uint32_t size = 50u << k;
    std::uint64_t found = 0, graphs = 0;
    RandomStream rng(derive_key(o.seed, "diamonds"), static_cast<std::uint64_t>(k));
    while (found < target) {
      EnsembleParams p{size, d_alpha, 0.0, GraphModel::GNP, 0};
      const auto edges = sample_graph(p, rng);
      std::vector<std::pair<Site, Site>> pairs;
      pairs.reserve(edges.size());
      for (const auto& e : edges) pairs.emplace_back(e.i, e.j);
      found += diamond_count(Adjacency(size, pairs));
      ++graphs;
    }
    const double mean = static_cast<double>(found) / static_cast<double>(graphs);
    xs.push_back(std::log(static_cast<double>(size)));
    ys.push_back(std::log(mean));
    ladder += fmt::format(" {}:{:.4g}", size, mean);
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  const double slope = sxy / sxx;

  r.passed = std::abs(z_tri) <= 3.0 && std::abs(z_uns) <= 3.0 && std::abs(slope + 1.0) <= 0.05;
  r.detail = fmt::format(
      "triangles mean {:.4f} vs {:.4f} (z={:.2f}); unsnippable triangles mean {:.4f} vs {:.4f} (z={:.2f}); diamond "
      "slope {:.4f} over{}",
      t_sum / samples, tri_expect, z_tri, u_sum / samples, uns_expect, z_uns, slope, ladder);
  return r;
}

}  // namespace

std::vector<int> fast_criteria() { return {1, 2, 3, 4, 5, 6, 9, 10}; }

CriterionResult run_criterion(int id, const SelftestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = formula_endpoints(); break;
    case 2: r = transfer_matrix_check(); break;
    case 3: r = solver_oracle(options); break;
    case 4: r = snip_preservation(options); break;
    case 5: r = loop_kernel(options); break;
    case 6: r = unsat_motif(); break;
    case 7: r = phase_boundary_reproduction(options); break;
    case 8: r = scaling_window(options); break;
    case 9: r = geometrization(options); break;
    case 10: r = subgraph_sampling(options); break;
    default: throw std::invalid_argument(fmt::format("no acceptance criterion {}", id));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} criterion {} ({}): {} [{:.1f}s]", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail, r.seconds);
}

}  // namespace mixsat
