// mixsat command-line driver.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "mixsat/ensemble.hpp"
#include "mixsat/experiment.hpp"
#include "mixsat/instance_io.hpp"
#include "mixsat/motif.hpp"
#include "mixsat/selftest.hpp"
#include "mixsat/snip.hpp"
#include "mixsat/solver.hpp"
#include "mixsat/theory.hpp"

namespace {

using namespace mixsat;
using json = nlohmann::ordered_json;

enum class Format { Text, Csv, Json };

// Thrown for bad flag combinations found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given) {
  if (given) return *given;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  fmt::print(stderr, "seed: {}\n", seed);
  return seed;
}

// Writes to the named file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error(fmt::format("cannot open {} for writing", path));
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void add_format(CLI::App* cmd, Format& format, bool text_allowed) {
  std::map<std::string, Format> names{{"csv", Format::Csv}, {"json", Format::Json}};
  if (text_allowed) names.emplace("text", Format::Text);
  cmd->add_option("--format", format, "Output format")->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
}

json ray_json(const Ray2& r) {
  return json{{"re", {r[0].real(), r[1].real()}}, {"im", {r[0].imag(), r[1].imag()}}};
}

// ---- gen

struct GenArgs {
  std::uint32_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::string model = "gnp";
  std::optional<std::uint64_t> seed;
  std::string output;
  Format format = Format::Json;
};

int run_gen(const GenArgs& a) {
  EnsembleParams p;
  p.n_qubits = a.n;
  p.clause_density = a.alpha;
  p.quantum_fraction = a.beta;
  p.graph_model = graph_model_from_string(a.model);
  p.seed = resolve_seed(a.seed);
  const Instance inst = generate_instance(p);

  Output out(a.output);
  if (a.format == Format::Json) {
    write_instance(inst, out.stream());
    return 0;
  }
  auto& os = out.stream();
  os << "i,j,kind,forbidden_i,forbidden_j,re00,re01,re10,re11,im00,im01,im10,im11\n";
  for (const Clause& c : inst.clauses()) {
    if (!c.is_quantum()) {
      const auto& f = c.classical_payload();
      fmt::print(os, "{},{},classical,{},{},,,,,,,,\n", c.i, c.j, unsigned{f.bit_i}, unsigned{f.bit_j});
    } else {
      const auto& v = c.ray().amplitudes();
      fmt::print(os, "{},{},quantum,,,{},{},{},{},{},{},{},{}\n", c.i, c.j, v[0].real(), v[1].real(), v[2].real(),
                 v[3].real(), v[0].imag(), v[1].imag(), v[2].imag(), v[3].imag());
    }
  }
  return 0;
}

// ---- solve

struct SolveArgs {
  std::string input;
  std::string strategy = "auto";
  std::uint32_t oracle_cap = kDefaultOracleCap;
  std::optional<std::uint64_t> seed;
  std::string witness;
  Format format = Format::Text;
};

int run_solve(const SolveArgs& a) {
  const Instance inst = load_instance(a.input);
  SolveOptions opt;
  opt.strategy = strategy_from_string(a.strategy);
  opt.oracle_cap = a.oracle_cap;
  opt.seed = resolve_seed(a.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const Verdict v = solve(inst, opt);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (!a.witness.empty() && v.witness) {
    Output w(a.witness);
    write_product_state(*v.witness, w.stream());
  }

  const std::string reason = v.unknown_reason.value_or("");
  switch (a.format) {
    case Format::Text:
      fmt::print("{} solver_path={} certificate={} core_sites={} residual={:.3e} wall_ms={:.3f}", to_string(v.status),
                 v.solver_path, to_string(v.certificate), v.core_sites, v.residual, ms);
      if (v.conflict_site) fmt::print(" conflict_site={}", *v.conflict_site);
      if (!reason.empty()) fmt::print(" reason=\"{}\"", reason);
      fmt::print("\n");
      break;
    case Format::Csv:
      fmt::print("status,solver_path,certificate,core_sites,residual,wall_ms,unknown_reason\n");
      fmt::print("{},{},{},{},{},{},\"{}\"\n", to_string(v.status), v.solver_path, to_string(v.certificate),
                 v.core_sites, v.residual, ms, reason);
      break;
    case Format::Json: {
      json j{{"status", to_string(v.status)},
             {"solver_path", v.solver_path},
             {"certificate", to_string(v.certificate)},
             {"core_sites", v.core_sites},
             {"residual", v.residual},
             {"wall_ms", ms}};
      if (v.conflict_site) j["conflict_site"] = *v.conflict_site;
      if (v.unknown_reason) j["unknown_reason"] = *v.unknown_reason;
      if (v.witness) {
        json states = json::array();
        for (const Ray2& r : *v.witness) states.push_back(ray_json(r));
        j["witness"] = std::move(states);
      }
      std::cout << j.dump(2) << "\n";
      break;
    }
  }
  return 0;
}

// ---- snip

struct SnipArgs {
  std::string input;
  std::string output;
  bool shuffle = false;
  std::optional<std::uint64_t> seed;
  Format format = Format::Text;
};

int run_snip(const SnipArgs& a) {
  const Instance inst = load_instance(a.input);
  CoreReport rep;
  if (a.shuffle) {
    RandomStream order(resolve_seed(a.seed), 0);
    rep = snip_core(inst, order);
  } else {
    rep = snip_core(inst);
  }
  if (!a.output.empty()) save_instance(rep.core, a.output);
  const auto comps = classify_components(rep.core);

  switch (a.format) {
    case Format::Text:
      fmt::print("sites {} -> {}, clauses {} -> {}, {} snip steps\n", inst.n_qubits(), rep.core.n_qubits(),
                 inst.clause_count(), rep.core.clause_count(), rep.snip_sequence.size());
      for (const auto& c : comps)
        fmt::print("component {}: {} sites, {} clauses, cyclomatic {}\n", c.component, c.sites.size(),
                   c.clauses.size(), c.cyclomatic_number);
      break;
    case Format::Csv:
      fmt::print("order,site,clauses\n");
      for (std::size_t k = 0; k < rep.snip_sequence.size(); ++k) {
        const auto& s = rep.snip_sequence[k];
        fmt::print("{},{},{}\n", k, s.site, fmt::join(s.clauses, ";"));
      }
      break;
    case Format::Json: {
      json steps = json::array();
      json cyclomatic = json::array();
      for (const auto& c : comps) cyclomatic.push_back(c.cyclomatic_number);
      for (const auto& s : rep.snip_sequence) steps.push_back({{"site", s.site}, {"clauses", s.clauses}});
      json j{{"n_qubits", inst.n_qubits()},
             {"clauses", inst.clause_count()},
             {"core_sites", rep.core_sites},
             {"core_clauses", rep.core_clauses},
             {"cyclomatic", cyclomatic},
             {"snip_sequence", std::move(steps)}};
      std::cout << j.dump(2) << "\n";
      break;
    }
  }
  return 0;
}

// ---- census

struct CensusArgs {
  std::string input;
  bool is_core = false;
  bool short_cycles = false;
  std::optional<std::uint64_t> seed;
  Format format = Format::Csv;
};

int run_census(const CensusArgs& a) {
  const Instance inst = load_instance(a.input);
  const Instance core = a.is_core ? inst : snip_core(inst).core;
  const MotifCensus census = motif_census(core);

  std::vector<std::uint64_t> cycles;
  if (a.short_cycles) {
    const Adjacency adj(inst);
    for (int L = 3; L <= 8; ++L) cycles.push_back(count_short_cycles(adj, L));
  }

  auto unsnippable_cycles = [](const ComponentClass& c) {
    int k = 0;
    for (const auto& n : c.cycles) k += n.unsnippable ? 1 : 0;
    return k;
  };
  auto candidate = [&](std::uint32_t comp) {
    return std::find(census.candidate_unsat_components.begin(), census.candidate_unsat_components.end(), comp) !=
           census.candidate_unsat_components.end();
  };

  if (a.format == Format::Csv) {
    fmt::print("component,sites,clauses,cyclomatic,motif,branch_sites,unsnippable_cycles,candidate_unsat\n");
    for (const auto& c : census.classes) {
      fmt::print("{},{},{},{},{},{},{},{}\n", c.component, c.sites.size(), c.clauses.size(), c.cyclomatic_number,
                 to_string(c.motif), c.branch_sites.size(), unsnippable_cycles(c), candidate(c.component) ? 1 : 0);
    }
    if (a.short_cycles) {
      fmt::print("# short cycles L=3..8: {}\n", fmt::join(cycles, ","));
    }
    return 0;
  }
  json comps = json::array();
  for (const auto& c : census.classes) {
    comps.push_back({{"component", c.component},
                     {"sites", c.sites},
                     {"clauses", c.clauses},
                     {"cyclomatic", c.cyclomatic_number},
                     {"motif", to_string(c.motif)},
                     {"branch_sites", c.branch_sites},
                     {"unsnippable_cycles", unsnippable_cycles(c)},
                     {"candidate_unsat", candidate(c.component)}});
  }
  json counts = json::object();
  for (std::size_t k = 0; k < kMotifClassCount; ++k) counts[std::string(to_string(static_cast<MotifClass>(k)))] = census.counts[k];
  json j{{"core_sites", core.n_qubits()},
         {"components", census.components},
         {"loop_fraction", census.loop_fraction},
         {"counts", std::move(counts)},
         {"classes", std::move(comps)}};
  if (a.short_cycles) j["short_cycles"] = cycles;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---- theory

struct TheoryArgs {
  bool boundary = false;
  int beta_steps = 101;
  std::optional<int> loops_max;
  std::optional<int> entropy_samples;
  double alpha = 0.5;
  double beta = 0.5;
  std::uint64_t n = 1000;
  std::optional<std::uint64_t> seed;
  std::string output;
  Format format = Format::Csv;
};

int run_theory(const TheoryArgs& a) {
  const int modes = int{a.boundary} + int{a.loops_max.has_value()} + int{a.entropy_samples.has_value()};
  if (modes != 1) throw UsageError("theory: choose exactly one of --boundary, --loops, --entropy");
  Output out(a.output);
  auto& os = out.stream();

  if (a.boundary) {
    if (a.beta_steps < 2) throw UsageError("--beta-steps must be at least 2");
    std::vector<PhasePoint> pts;
    for (int k = 0; k < a.beta_steps; ++k) pts.push_back(phase_boundary(static_cast<double>(k) / (a.beta_steps - 1)));
    if (a.format == Format::Csv) {
      os << "beta,alpha_c,lambda_plus\n";
      for (const auto& p : pts) fmt::print(os, "{},{},{}\n", p.beta, p.alpha_c, p.lambda_plus);
    } else {
      json arr = json::array();
      for (const auto& p : pts) arr.push_back({{"beta", p.beta}, {"alpha_c", p.alpha_c}, {"lambda_plus", p.lambda_plus}});
      os << arr.dump(2) << "\n";
    }
    return 0;
  }

  if (a.loops_max) {
    if (*a.loops_max < 3) throw UsageError("--loops must be at least 3");
    json arr = json::array();
    if (a.format == Format::Csv) os << "L,p_unsnippable,expected_loops,limit\n";
    for (int L = 3; L <= *a.loops_max; ++L) {
      const double p = p_loop_unsnippable(L, a.beta);
      const double e = expected_unsnippable_loops(a.n, L, a.alpha, a.beta);
      const double lim = unsnippable_loops_limit(L, a.alpha, a.beta);
      if (a.format == Format::Csv) {
        fmt::print(os, "{},{},{},{}\n", L, p, e, lim);
      } else {
        arr.push_back({{"L", L}, {"p_unsnippable", p}, {"expected_loops", e}, {"limit", lim}});
      }
    }
    if (a.format == Format::Json) os << arr.dump(2) << "\n";
    return 0;
  }

  const EntropyCurve curve = entropy_curve(a.alpha, a.beta, *a.entropy_samples);
  if (a.format == Format::Csv) {
    os << "l,s\n";
    for (const auto& p : curve.samples) fmt::print(os, "{},{}\n", p.l, p.s);
  } else {
    json arr = json::array();
    for (const auto& p : curve.samples) arr.push_back({{"l", p.l}, {"s", p.s}});
    json j{{"alpha", curve.alpha}, {"beta", curve.beta}, {"proliferates", curve.proliferates}, {"samples", arr}};
    os << j.dump(2) << "\n";
  }
  return 0;
}

// ---- sweep

struct SweepArgs {
  std::string config;
  bool resume = false;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  std::string output;
  bool quiet = false;
  Format format = Format::Csv;
};

int run_sweep_cmd(const SweepArgs& a) {
  SweepConfig cfg = SweepConfig::load(a.config);
  if (a.seed) cfg.master_seed = *a.seed;
  if (!a.output.empty()) cfg.output = a.output;
  if (a.resume) cfg.resume = true;
  if (a.workers) cfg.workers = a.workers;
  cfg.validate();

  const std::size_t total = cfg.sizes.size() * cfg.betas.size() * cfg.alphas.size();
  std::size_t done = 0;
  const bool to_stdout = cfg.output.empty();
  if (to_stdout && a.format == Format::Csv) std::cout << csv_header() << "\n";
  json rows = json::array();

  run_sweep(cfg, [&](const SweepRecord& r) {
    ++done;
    if (!a.quiet) fmt::print(stderr, "\r[{}/{}] N={} beta={} alpha={}   ", done, total, r.n, r.beta, r.alpha);
    if (!to_stdout) return;
    if (a.format == Format::Csv) {
      std::cout << to_csv_row(r) << "\n" << std::flush;
    } else {
      rows.push_back({{"N", r.n},
                      {"alpha", r.alpha},
                      {"beta", r.beta},
                      {"trials", r.trials},
                      {"n_sat", r.n_sat},
                      {"n_unsat", r.n_unsat},
                      {"n_unknown", r.n_unknown},
                      {"mean_core_sites", r.mean_core_sites},
                      {"mean_wall_ms", r.mean_wall_ms},
                      {"seed", r.seed}});
    }
  });
  if (!a.quiet) fmt::print(stderr, "\n");
  if (to_stdout && a.format == Format::Json) std::cout << rows.dump(2) << "\n";
  return 0;
}

// ---- collapse

struct CollapseArgs {
  std::string input;
  double beta = 0.0;
  std::vector<double> exponents{1.0 / 3.0};
  std::string reading = "window";
  std::optional<double> alpha_c;
  bool crossings = false;
  std::optional<std::uint64_t> seed;
  std::string output;
  Format format = Format::Csv;
};

int run_collapse(const CollapseArgs& a) {
  std::vector<SweepRecord> recs;
  for (const auto& r : read_sweep_csv(a.input)) {
    if (std::abs(r.beta - a.beta) < 1e-12) recs.push_back(r);
  }
  if (recs.empty()) throw ExperimentError(fmt::format("no records with beta={} in {}", a.beta, a.input));
  const double ac = a.alpha_c.value_or(critical_density(a.beta));
  Output out(a.output);
  auto& os = out.stream();

  if (a.crossings) {
    std::map<std::uint32_t, std::vector<SweepRecord>> by_n;
    for (const auto& r : recs) by_n[r.n].push_back(r);
    json arr = json::array();
    if (a.format == Format::Csv) os << "N,alpha_cross,standard_error,alpha_c,interpolated\n";
    for (const auto& [n, rs] : by_n) {
      const Crossing c = find_crossing(estimate_p_sat(rs));
      if (a.format == Format::Csv) {
        fmt::print(os, "{},{},{},{},{}\n", n, c.alpha, c.standard_error, ac, c.interpolated ? 1 : 0);
      } else {
        arr.push_back({{"N", n}, {"alpha_cross", c.alpha}, {"standard_error", c.standard_error}, {"alpha_c", ac},
                       {"interpolated", c.interpolated}});
      }
    }
    if (a.format == Format::Json) os << arr.dump(2) << "\n";
    return 0;
  }

  CollapseReading reading;
  if (a.reading == "window") reading = CollapseReading::Window;
  else if (a.reading == "literal") reading = CollapseReading::Literal;
  else throw UsageError("--reading must be window or literal");

  json arr = json::array();
  if (a.format == Format::Csv) os << "exponent,objective,x,p_sat,N\n";
  for (double nu : a.exponents) {
    const CollapseResult res = scaling_collapse(recs, ac, nu, reading);
    if (a.format == Format::Csv) {
      for (const auto& p : res.points) fmt::print(os, "{},{},{},{},{}\n", nu, res.objective, p.x, p.p_sat, p.n);
    } else {
      json pts = json::array();
      for (const auto& p : res.points) pts.push_back({{"x", p.x}, {"p_sat", p.p_sat}, {"N", p.n}});
      arr.push_back({{"exponent", nu}, {"objective", res.objective}, {"points", pts}});
    }
    fmt::print(stderr, "exponent {:.6f}: objective {:.6e}\n", nu, res.objective);
  }
  if (a.format == Format::Json) os << arr.dump(2) << "\n";
  return 0;
}

// ---- selftest

struct SelftestArgs {
  bool full = false;
  std::vector<int> criteria;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  Format format = Format::Text;
};

int run_selftest(const SelftestArgs& a) {
  SelftestOptions opt;
  opt.budget = a.full ? SelftestBudget::Full : SelftestBudget::Fast;
  if (a.seed) opt.seed = *a.seed;
  opt.workers = a.workers;
  std::vector<int> ids = a.criteria;
  if (ids.empty()) {
    if (a.full) {
      for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
    } else {
      ids = fast_criteria();
    }
  }
  bool all = true;
  json arr = json::array();
  if (a.format == Format::Csv) fmt::print("criterion,name,passed,seconds,detail\n");
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, opt);
    all = all && r.passed;
    switch (a.format) {
      case Format::Text:
        fmt::print("{}\n", format_result(r));
        break;
      case Format::Csv:
        fmt::print("{},\"{}\",{},{:.3f},\"{}\"\n", r.id, r.name, r.passed ? 1 : 0, r.seconds, r.detail);
        break;
      case Format::Json:
        arr.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds},
                       {"detail", r.detail}});
        break;
    }
    std::fflush(stdout);
  }
  if (a.format == Format::Json) std::cout << arr.dump(2) << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixsat: random mixed classical/quantum 2-SAT"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mixsat 0.1.0");

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "Generate a random instance");
  c_gen->add_option("-N,--qubits", gen.n, "Number of qubits")->required();
  c_gen->add_option("--alpha", gen.alpha, "Clause density")->required();
  c_gen->add_option("--beta", gen.beta, "Quantum fraction")->required();
  c_gen->add_option("--model", gen.model, "Graph model (gnp|gnm)")->check(CLI::IsMember({"gnp", "gnm", "GNP", "GNM"}));
  c_gen->add_option("--seed", gen.seed, "Master seed");
  c_gen->add_option("-o,--output", gen.output, "Instance file (default stdout)");
  add_format(c_gen, gen.format, false);

  SolveArgs sol;
  auto* c_solve = app.add_subcommand("solve", "Decide satisfiability of an instance");
  c_solve->add_option("instance", sol.input, "Instance file")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--strategy", sol.strategy, "auto|classical|product|oracle")
      ->check(CLI::IsMember({"auto", "classical", "product", "oracle"}));
  c_solve->add_option("--oracle-cap", sol.oracle_cap, "Largest component handed to the exact oracle");
  c_solve->add_option("--seed", sol.seed, "Seed for randomized closure retries");
  c_solve->add_option("--witness", sol.witness, "Write the product-state witness here");
  add_format(c_solve, sol.format, true);

  SnipArgs snp;
  auto* c_snip = app.add_subcommand("snip", "Compute the snip-core");
  c_snip->add_option("instance", snp.input, "Instance file")->required()->check(CLI::ExistingFile);
  c_snip->add_option("-o,--output", snp.output, "Write the core instance here");
  c_snip->add_flag("--shuffle", snp.shuffle, "Peel in a random order");
  c_snip->add_option("--seed", snp.seed, "Seed for --shuffle");
  add_format(c_snip, snp.format, true);

  CensusArgs cen;
  auto* c_census = app.add_subcommand("census", "Classify the connected components of the snip-core");
  c_census->add_option("instance", cen.input, "Instance file")->required()->check(CLI::ExistingFile);
  c_census->add_flag("--core", cen.is_core, "Input is already a snip-core");
  c_census->add_flag("--short-cycles", cen.short_cycles, "Also count cycles of length 3..8 in the full graph");
  c_census->add_option("--seed", cen.seed, "Unused; accepted for uniformity");
  add_format(c_census, cen.format, false);

  TheoryArgs th;
  auto* c_theory = app.add_subcommand("theory", "Closed-form predictions");
  c_theory->add_flag("--boundary", th.boundary, "alpha_c(beta) on a uniform beta grid");
  c_theory->add_option("--beta-steps", th.beta_steps, "Grid points for --boundary");
  c_theory->add_option("--loops", th.loops_max, "Expected unsnippable loops for L = 3..value");
  c_theory->add_option("--entropy", th.entropy_samples, "Sample the loop entropy s(l) at this many points");
  c_theory->add_option("--alpha", th.alpha, "Clause density");
  c_theory->add_option("--beta", th.beta, "Quantum fraction");
  c_theory->add_option("-N,--qubits", th.n, "Number of qubits for --loops");
  c_theory->add_option("--seed", th.seed, "Unused; accepted for uniformity");
  c_theory->add_option("-o,--output", th.output, "Output file (default stdout)");
  add_format(c_theory, th.format, false);

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Monte Carlo P_SAT sweep");
  c_sweep->add_option("--config", sw.config, "Sweep configuration (JSON)")->required()->check(CLI::ExistingFile);
  c_sweep->add_flag("--resume", sw.resume, "Skip cells already in the output store");
  c_sweep->add_option("--workers", sw.workers, "Worker threads (0 = all cores)");
  c_sweep->add_option("--seed", sw.seed, "Override the master seed of the config");
  c_sweep->add_option("-o,--output", sw.output, "Override the output CSV of the config");
  c_sweep->add_flag("-q,--quiet", sw.quiet, "No progress counter");
  add_format(c_sweep, sw.format, false);

  CollapseArgs col;
  auto* c_col = app.add_subcommand("collapse", "Finite-size scaling collapse of a sweep");
  c_col->add_option("input", col.input, "Sweep CSV")->required()->check(CLI::ExistingFile);
  c_col->add_option("--beta", col.beta, "Quantum fraction to select")->required();
  c_col->add_option("--exponent", col.exponents, "Exponent(s) to evaluate")->delimiter(',');
  c_col->add_option("--reading", col.reading, "window: (a-ac)*N^nu, literal: (a-ac)/N^nu");
  c_col->add_option("--alpha-c", col.alpha_c, "Override the critical density");
  c_col->add_flag("--crossings", col.crossings, "Print the P_SAT = 1/2 crossing per N instead");
  c_col->add_option("--seed", col.seed, "Unused; accepted for uniformity");
  c_col->add_option("-o,--output", col.output, "Output file (default stdout)");
  add_format(c_col, col.format, false);

  SelftestArgs st;
  auto* c_st = app.add_subcommand("selftest", "Run acceptance checks (fast subset by default)");
  c_st->add_flag("--full", st.full, "Full budget, all criteria");
  c_st->add_option("--criterion", st.criteria, "Only these criteria")->delimiter(',')->check(CLI::Range(1, kCriterionCount));
  c_st->add_option("--workers", st.workers, "Worker threads for sweeps");
  c_st->add_option("--seed", st.seed, "Seed (default fixed)");
  add_format(c_st, st.format, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*c_gen) return run_gen(gen);
    if (*c_solve) return run_solve(sol);
    if (*c_snip) return run_snip(snp);
    if (*c_census) return run_census(cen);
    if (*c_theory) return run_theory(th);
    if (*c_sweep) return run_sweep_cmd(sw);
    if (*c_col) return run_collapse(col);
    if (*c_st) return run_selftest(st);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n{}", e.what(), app.help());
    return 2;
  } catch (const FormatError& e) {
    fmt::print(stderr, "error: format: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 2;
}
