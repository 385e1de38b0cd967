#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixsat/ensemble.hpp"
#include "mixsat/solver.hpp"

namespace mixsat {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSweepFormatVersion = 1;

struct SweepConfig {
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<std::uint32_t> sizes;
  std::uint32_t trials = 1;
  std::uint64_t master_seed = 0;
  Strategy strategy = Strategy::Auto;
  std::uint32_t oracle_cap = kDefaultOracleCap;
  GraphModel graph_model = GraphModel::GNM;
  /// Use the same instance stream for every alpha of a (N, beta, trial), so
  /// instances are nested as alpha grows.
  bool coupled = true;
  /// Write measured wall times; off by default so that stores are
  /// reproducible byte for byte.
  bool record_timing = false;
  std::filesystem::path output;
  bool resume = false;
  /// 0 = hardware concurrency.
  unsigned workers = 0;

  /// alphas = min, min + step, ... up to max (inclusive within step/1e6).
  static std::vector<double> alpha_range(double min, double max, double step);

  void validate() const;
  /// Digest of every field that affects results.
  std::uint64_t hash() const;

  std::string to_json() const;
  static SweepConfig from_json(const std::string& text);
  static SweepConfig load(const std::filesystem::path& path);
};

struct SweepRecord {
  std::uint32_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint32_t trials = 0;
  std::uint32_t n_sat = 0;
  std::uint32_t n_unsat = 0;
  std::uint32_t n_unknown = 0;
  double mean_core_sites = 0.0;
  double mean_wall_ms = 0.0;
  /// Key from which every trial seed of the cell is derived.
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// Seed of one trial. With coupling the alpha index is not mixed in.
std::uint64_t cell_seed(std::uint64_t master, std::uint32_t n, std::size_t alpha_index, std::size_t beta_index,
                        bool coupled);
std::uint64_t trial_seed(std::uint64_t cell, std::uint32_t trial);

std::string csv_header();
std::string to_csv_row(const SweepRecord& r);
std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path);

/// Runs every cell not already present in the output store, appending rows in
/// cell order (N, then beta, then alpha). Without an output path nothing is
/// written. Returns all records of the sweep, including resumed ones.
std::vector<SweepRecord> run_sweep(const SweepConfig& config,
                                   const std::function<void(const SweepRecord&)>& on_record = {});

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// 95% Wilson score interval for k successes in n trials.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

struct PSatEstimate {
  double alpha = 0.0;
  std::uint32_t n = 0;
  double beta = 0.0;
  double p_sat = 0.0;
  Interval interval;
  std::uint32_t n_sat = 0;
  std::uint32_t decided = 0;
  std::uint32_t n_unknown = 0;
  /// n_unknown / trials >= 5%.
  bool unknown_flag = false;
};

/// One estimate per record, sorted by alpha. Throws ExperimentError when
/// empty.
std::vector<PSatEstimate> estimate_p_sat(std::span<const SweepRecord> records);

struct Crossing {
  double alpha = 0.0;
  double standard_error = 0.0;
  /// Logistic slope d logit(P) / d alpha (negative).
  double slope = 0.0;
  bool interpolated = false;
};

/// Alpha where P_SAT = 1/2 from a binomial logistic fit. Throws
/// ExperimentError("no bracket") when the estimates do not straddle 1/2 and
/// refuses midpoints outside the sampled alpha range.
Crossing find_crossing(std::span<const PSatEstimate> estimates);

enum class CollapseReading {
  /// x = (alpha - alpha_c) * N^nu.
  Window,
  /// x = (alpha - alpha_c) / N^nu.
  Literal
};

struct CollapsePoint {
  double x = 0.0;
  double p_sat = 0.0;
  std::uint32_t n = 0;
};

struct CollapseResult {
  double exponent = 0.0;
  /// Mean over a common x grid of the variance of P_SAT across N.
  double objective = 0.0;
  std::vector<CollapsePoint> points;
};

/// Throws ExperimentError with fewer than three sizes or no common x range.
CollapseResult scaling_collapse(std::span<const SweepRecord> records, double alpha_c, double exponent,
                                CollapseReading reading = CollapseReading::Window);

}  // namespace mixsat
