#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixsat/experiment.hpp"
#include "mixsat/theory.hpp"

using namespace mixsat;
namespace fs = std::filesystem;

namespace {

// Wilson bounds found by bisection on |phat - p| = z sqrt(p (1 - p) / n).
Interval wilson_by_bisection(double k, double n, double z) {
  const double phat = k / n;
  auto f = [&](double p) { return (phat - p) * (phat - p) - z * z * p * (1 - p) / n; };
  auto root = [&](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((f(lo) > 0) == (f(mid) > 0) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return {phat == 0 ? 0.0 : root(0.0, phat), phat == 1 ? 1.0 : root(phat, 1.0)};
}

SweepRecord record(std::uint32_t n, double alpha, std::uint32_t trials, double p) {
  SweepRecord r;
  r.n = n;
  r.alpha = alpha;
  r.trials = trials;
  r.n_sat = static_cast<std::uint32_t>(std::lround(p * trials));
  r.n_unsat = trials - r.n_sat;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mixsat_experiment_test";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  fs::remove(fs::path(p.string() + ".manifest.json"));
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepConfig small_config() {
  SweepConfig c;
  c.betas = {0.0, 0.5, 1.0};
  c.alphas = SweepConfig::alpha_range(0.3, 0.9, 0.1);
  c.sizes = {50, 100};
  c.trials = 20;
  c.master_seed = 11;
  c.workers = 2;
  return c;
}

}  // namespace

TEST(Wilson, HalfAtHundred) {
  const auto w = wilson_interval(50, 100);
  EXPECT_NEAR(w.lower, 0.404, 5e-4);
  EXPECT_NEAR(w.upper, 0.596, 5e-4);
}

TEST(Wilson, MatchesBisection) {
  for (std::uint64_t n : {1u, 7u, 40u, 400u})
    for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 9)) {
      const auto w = wilson_interval(k, n);
      const auto ref = wilson_by_bisection(k, n, 1.959963984540054);
      EXPECT_NEAR(w.lower, ref.lower, 1e-9) << k << "/" << n;
      EXPECT_NEAR(w.upper, ref.upper, 1e-9) << k << "/" << n;
    }
  EXPECT_THROW(wilson_interval(5, 4), ExperimentError);
}

TEST(Estimate, EdgesAndUnknowns) {
  SweepRecord all = record(100, 0.5, 40, 1.0);
  SweepRecord none = record(100, 0.6, 40, 0.0);
  SweepRecord shaky = record(100, 0.7, 40, 0.5);
  shaky.n_sat = 18;
  shaky.n_unsat = 18;
  shaky.n_unknown = 4;
  const std::vector<SweepRecord> recs{shaky, all, none};
  const auto est = estimate_p_sat(recs);
  ASSERT_EQ(est.size(), 3u);
  EXPECT_EQ(est[0].p_sat, 1.0);
  EXPECT_EQ(est[0].interval.upper, 1.0);
  EXPECT_EQ(est[1].p_sat, 0.0);
  EXPECT_EQ(est[2].p_sat, 0.5);
  EXPECT_EQ(est[2].decided, 36u);
  EXPECT_TRUE(est[2].unknown_flag);
  EXPECT_FALSE(est[0].unknown_flag);
  EXPECT_THROW(estimate_p_sat(std::vector<SweepRecord>{}), ExperimentError);
}

TEST(Crossing, RecoversLogisticMidpoint) {
  RandomStream rng(3);
  for (int t = 0; t < 20; ++t) {
    const double mid = 0.5 + 0.5 * rng.uniform(), k = 20 + 20 * rng.uniform();
    std::vector<SweepRecord> recs;
    for (int a = 0; a <= 20; ++a) {
      const double alpha = mid - 0.3 + 0.03 * a;
      const double p = 1.0 / (1.0 + std::exp(k * (alpha - mid)));
      SweepRecord r = record(1000, alpha, 400, 0.0);
      std::uint32_t sat = 0;
      for (int s = 0; s < 400; ++s) sat += rng.bernoulli(p);
      r.n_sat = sat;
      r.n_unsat = 400 - sat;
      recs.push_back(r);
    }
    const auto c = find_crossing(estimate_p_sat(recs));
    EXPECT_FALSE(c.interpolated);
    EXPECT_LT(c.slope, 0.0);
    EXPECT_LT(std::abs(c.alpha - mid), 2 * c.standard_error + 1e-12) << t;
  }
}

TEST(Crossing, NoBracketAndExtrapolation) {
  std::vector<SweepRecord> high{record(100, 0.1, 100, 0.9), record(100, 0.2, 100, 0.8)};
  EXPECT_THROW(find_crossing(estimate_p_sat(high)), ExperimentError);
  // a fit whose midpoint is beyond the sampled range
  std::vector<SweepRecord> edge{record(100, 0.1, 100, 0.99), record(100, 0.2, 100, 0.95),
                                record(100, 0.3, 100, 0.5)};
  try {
    const auto c = find_crossing(estimate_p_sat(edge));
    EXPECT_LE(c.alpha, 0.3);
    EXPECT_GE(c.alpha, 0.1);
  } catch (const ExperimentError& e) {
    EXPECT_NE(std::string(e.what()).find("extrapolate"), std::string::npos);
  }
}

TEST(Collapse, PerfectData) {
  const double ac = 0.7;
  auto f = [](double x) { return 1.0 / (1.0 + std::exp(2.0 * x)); };
  std::vector<SweepRecord> recs;
  for (std::uint32_t n : {500u, 1000u, 2000u, 4000u})
    for (int a = 0; a <= 30; ++a) {
      const double alpha = ac - 0.15 + 0.01 * a;
      recs.push_back(record(n, alpha, 100000000, f((alpha - ac) * std::cbrt(n))));
    }
  const auto best = scaling_collapse(recs, ac, 1.0 / 3.0);
  EXPECT_LT(best.objective, 1e-5);
  EXPECT_EQ(best.points.size(), recs.size());
  EXPECT_GT(scaling_collapse(recs, ac, 0.25).objective, 10 * best.objective);
  EXPECT_GT(scaling_collapse(recs, ac, 0.5).objective, 10 * best.objective);
  // literal reading divides by N^nu; exponent -1/3 reproduces the window reading
  EXPECT_NEAR(scaling_collapse(recs, ac, -1.0 / 3.0, CollapseReading::Literal).objective, best.objective, 1e-12);

  const std::vector<SweepRecord> two(recs.begin(), recs.begin() + 62);
  EXPECT_THROW(scaling_collapse(two, ac, 1.0 / 3.0), ExperimentError);
}

TEST(SweepConfig, JsonRoundTripAndValidation) {
  auto c = small_config();
  const auto back = SweepConfig::from_json(c.to_json());
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.alphas, c.alphas);
  const auto grid = SweepConfig::from_json(R"({"betas": [0.5], "sizes": [100],
      "alpha_grid": {"min": 0.4, "max": 0.6, "step": 0.05}, "trials": 3})");
  EXPECT_EQ(grid.alphas.size(), 5u);
  EXPECT_EQ(grid.trials, 3u);
  c.trials = 0;
  EXPECT_THROW(c.validate(), ExperimentError);
  c = small_config();
  c.betas.clear();
  EXPECT_THROW(c.validate(), ExperimentError);
  auto d = small_config();
  d.master_seed = 12;
  EXPECT_NE(d.hash(), small_config().hash());
}

TEST(Seeds, Coupling) {
  EXPECT_EQ(cell_seed(1, 100, 0, 2, true), cell_seed(1, 100, 5, 2, true));
  EXPECT_NE(cell_seed(1, 100, 0, 2, false), cell_seed(1, 100, 5, 2, false));
  EXPECT_NE(cell_seed(1, 100, 0, 2, true), cell_seed(1, 200, 0, 2, true));
  EXPECT_NE(trial_seed(7, 0), trial_seed(7, 1));
}

TEST(Sweep, Deterministic) {
  SweepConfig c;
  c.betas = {0.5};
  c.alphas = {0.6};
  c.sizes = {200};
  c.trials = 1;
  c.master_seed = 5;
  const auto a = run_sweep(c), b = run_sweep(c);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0].n_sat + a[0].n_unsat + a[0].n_unknown, 1u);
}

TEST(Sweep, WorkerCountIrrelevant) {
  auto c = small_config();
  c.workers = 1;
  const auto serial = run_sweep(c);
  c.workers = 4;
  EXPECT_EQ(run_sweep(c), serial);
}

TEST(Sweep, MonotoneWhenCoupled) {
  auto c = small_config();
  c.alphas = SweepConfig::alpha_range(0.2, 1.4, 0.1);
  const auto recs = run_sweep(c);
  for (std::size_t k = 1; k < recs.size(); ++k) {
    if (recs[k].n != recs[k - 1].n || recs[k].beta != recs[k - 1].beta) continue;
    EXPECT_LE(recs[k].n_sat, recs[k - 1].n_sat) << k;
    EXPECT_EQ(recs[k].n_unknown, 0u);
  }
}

TEST(Sweep, ResumeIsByteIdentical) {
  auto c = small_config();
  c.output = scratch("full.csv");
  run_sweep(c);
  const std::string full = slurp(c.output);

  // interrupt midway through a row
  const auto cut = full.find('\n', full.size() / 2) + 7;
  fs::resize_file(c.output, cut);
  c.resume = true;
  EXPECT_LT(read_sweep_csv(c.output).size(), 42u);
  EXPECT_EQ(run_sweep(c).size(), 42u);
  EXPECT_EQ(slurp(c.output), full);

  // a resumed complete store is left alone
  run_sweep(c);
  EXPECT_EQ(slurp(c.output), full);
  EXPECT_EQ(read_sweep_csv(c.output).size(), 42u);

  auto other = c;
  other.master_seed = 99;
  EXPECT_THROW(run_sweep(other), ExperimentError);
}

TEST(Sweep, CsvRows) {
  SweepRecord r = record(100, 0.5, 10, 0.3);
  r.beta = 0.25;
  r.seed = 123;
  const auto row = to_csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 9);
  EXPECT_EQ(csv_header(), "N,alpha,beta,trials,n_sat,n_unsat,n_unknown,mean_core_sites,mean_wall_ms,seed");
}

TEST(Sweep, DeepPhases) {
  SweepConfig c;
  c.betas = {0.0};
  c.alphas = {0.5};
  c.sizes = {1000};
  c.trials = 200;
  c.master_seed = 21;
  const auto classical = estimate_p_sat(run_sweep(c));
  EXPECT_GT(classical[0].p_sat, 0.95);
  c.betas = {1.0};
  c.alphas = {0.8};
  const auto quantum = estimate_p_sat(run_sweep(c));
  EXPECT_LT(quantum[0].p_sat, 0.05);
}

TEST(Sweep, CrossingsMoveTowardBoundary) {
  // beta = 1 along a short ladder; the crossing offset shrinks with N
  SweepConfig c;
  c.betas = {1.0};
  c.alphas = SweepConfig::alpha_range(0.4, 0.8, 0.02);
  c.sizes = {250, 2000};
  c.trials = 300;
  c.master_seed = 4;
  const auto recs = run_sweep(c);
  std::vector<SweepRecord> small, large;
  for (const auto& r : recs) (r.n == 250 ? small : large).push_back(r);
  const double ac = critical_density(1.0);
  const double d_small = std::abs(find_crossing(estimate_p_sat(small)).alpha - ac);
  const double d_large = std::abs(find_crossing(estimate_p_sat(large)).alpha - ac);
  EXPECT_LT(d_large, d_small);
}
