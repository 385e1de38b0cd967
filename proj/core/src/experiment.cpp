#include "mixsat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"

namespace mixsat {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void bad_config(const std::string& what) { throw ExperimentError("invalid sweep config: " + what); }

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

template <typename T>
std::vector<T> json_list(const nlohmann::json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) bad_config(fmt::format("missing field '{}'", key));
  if (!it->is_array()) bad_config(fmt::format("'{}' must be an array", key));
  std::vector<T> out;
  for (const auto& v : *it) {
    if (!v.is_number()) bad_config(fmt::format("'{}' must hold numbers", key));
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) bad_config(fmt::format("'{}' must hold non-negative integers", key));
    }
    out.push_back(v.get<T>());
  }
  return out;
}

}  // namespace

std::vector<double> SweepConfig::alpha_range(double min, double max, double step) {
  if (!(step > 0.0) || !(max >= min) || !std::isfinite(min) || !std::isfinite(max))
    bad_config(fmt::format("alpha grid min={} max={} step={} is not a valid range", min, max, step));
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double a = min + static_cast<double>(k) * step;
    if (a > max + step * 1e-6) break;
    out.push_back(std::round(a * 1e12) / 1e12);
  }
  return out;
}

void SweepConfig::validate() const {
  if (betas.empty()) bad_config("beta list is empty");
  if (alphas.empty()) bad_config("alpha grid is empty");
  if (sizes.empty()) bad_config("N list is empty");
  if (trials < 1) bad_config("trials must be at least 1");
  for (const double b : betas)
    if (!(b >= 0.0 && b <= 1.0)) bad_config(fmt::format("beta {} outside [0, 1]", b));
  for (const auto n : sizes)
    for (const double a : alphas) {
      EnsembleParams p{n, a, 0.0, graph_model, 0};
      try {
        p.validate();
      } catch (const EnsembleError& e) {
        bad_config(e.what());
      }
    }
}

std::uint64_t SweepConfig::hash() const {
  std::string s = "mixsat-sweep;";
  for (const double b : betas) s += fmt::format("b{};", b);
  for (const double a : alphas) s += fmt::format("a{};", a);
  for (const auto n : sizes) s += fmt::format("n{};", n);
  s += fmt::format("t{};s{};{};c{};{};coupled{};timing{}", trials, master_seed, to_string(strategy), oracle_cap,
                   to_string(graph_model), coupled, record_timing);
  return fnv1a64(s);
}

std::string SweepConfig::to_json() const {
  ojson doc;
  doc["format_version"] = kSweepFormatVersion;
  doc["betas"] = betas;
  doc["alphas"] = alphas;
  doc["sizes"] = sizes;
  doc["trials"] = trials;
  doc["seed"] = master_seed;
  doc["strategy"] = std::string(to_string(strategy));
  doc["oracle_cap"] = oracle_cap;
  doc["graph_model"] = std::string(to_string(graph_model));
  doc["coupled"] = coupled;
  doc["record_timing"] = record_timing;
  doc["output"] = output.string();
  doc["resume"] = resume;
  doc["workers"] = workers;
  return doc.dump(2) + "\n";
}

SweepConfig SweepConfig::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad_config(e.what());
  }
  if (!doc.is_object()) bad_config("document must be an object");
  if (const auto it = doc.find("format_version"); it != doc.end() && *it != kSweepFormatVersion)
    bad_config(fmt::format("format_version {} is not supported", it->dump()));
  SweepConfig c;
  try {
    c.betas = json_list<double>(doc, "betas");
    c.sizes = json_list<std::uint32_t>(doc, "sizes");
    if (doc.contains("alphas")) {
      c.alphas = json_list<double>(doc, "alphas");
    } else if (doc.contains("alpha_grid")) {
      const auto& g = doc["alpha_grid"];
      c.alphas = alpha_range(g.at("min").get<double>(), g.at("max").get<double>(), g.at("step").get<double>());
    } else {
      bad_config("need 'alphas' or 'alpha_grid'");
    }
    if (doc.contains("trials")) c.trials = doc["trials"].get<std::uint32_t>();
    if (doc.contains("seed")) c.master_seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("strategy")) c.strategy = strategy_from_string(doc["strategy"].get<std::string>());
    if (doc.contains("oracle_cap")) c.oracle_cap = doc["oracle_cap"].get<std::uint32_t>();
    if (doc.contains("graph_model")) c.graph_model = graph_model_from_string(doc["graph_model"].get<std::string>());
    if (doc.contains("coupled")) c.coupled = doc["coupled"].get<bool>();
    if (doc.contains("record_timing")) c.record_timing = doc["record_timing"].get<bool>();
    if (doc.contains("output")) c.output = doc["output"].get<std::string>();
    if (doc.contains("resume")) c.resume = doc["resume"].get<bool>();
    if (doc.contains("workers")) c.workers = doc["workers"].get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    bad_config(e.what());
  } catch (const std::invalid_argument& e) {
    bad_config(e.what());
  }
  c.validate();
  return c;
}

SweepConfig SweepConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExperimentError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::uint64_t cell_seed(std::uint64_t master, std::uint32_t n, std::size_t alpha_index, std::size_t beta_index,
                        bool coupled) {
  std::uint64_t k = derive_key(master, "sweep");
  k = derive_key(k, std::uint64_t{n});
  k = derive_key(k, coupled ? ~std::uint64_t{0} : std::uint64_t{alpha_index});
  return derive_key(k, std::uint64_t{beta_index});
}

std::uint64_t trial_seed(std::uint64_t cell, std::uint32_t trial) { return derive_key(cell, std::uint64_t{trial}); }

std::string csv_header() { return "N,alpha,beta,trials,n_sat,n_unsat,n_unknown,mean_core_sites,mean_wall_ms,seed"; }

std::string to_csv_row(const SweepRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{:.6f},{:.3f},{}", r.n, r.alpha, r.beta, r.trials, r.n_sat, r.n_unsat,
                     r.n_unknown, r.mean_core_sites, r.mean_wall_ms, r.seed);
}

namespace {

SweepRecord parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 10) throw ExperimentError(fmt::format("malformed sweep row '{}'", line));
  try {
    SweepRecord r;
    r.n = static_cast<std::uint32_t>(std::stoul(f[0]));
    r.alpha = std::stod(f[1]);
    r.beta = std::stod(f[2]);
    r.trials = static_cast<std::uint32_t>(std::stoul(f[3]));
    r.n_sat = static_cast<std::uint32_t>(std::stoul(f[4]));
    r.n_unsat = static_cast<std::uint32_t>(std::stoul(f[5]));
    r.n_unknown = static_cast<std::uint32_t>(std::stoul(f[6]));
    r.mean_core_sites = std::stod(f[7]);
    r.mean_wall_ms = std::stod(f[8]);
    r.seed = std::stoull(f[9]);
    if (r.n_sat + r.n_unsat + r.n_unknown != r.trials)
      throw ExperimentError(fmt::format("sweep row '{}' has counts that do not add up", line));
    return r;
  } catch (const std::logic_error&) {
    throw ExperimentError(fmt::format("malformed sweep row '{}'", line));
  }
}

// Complete rows of a store; a trailing partial line is dropped and its byte
// offset returned so that it can be truncated.
std::vector<SweepRecord> read_rows(const std::filesystem::path& path, std::uintmax_t& valid_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExperimentError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto last_newline = text.rfind('\n');
  valid_bytes = last_newline == std::string::npos ? 0 : last_newline + 1;
  std::vector<SweepRecord> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < valid_bytes) {
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (header) {
      if (line != csv_header()) throw ExperimentError(fmt::format("'{}' is not a sweep store", path.string()));
      header = false;
      continue;
    }
    if (!line.empty()) out.push_back(parse_row(line));
  }
  return out;
}

struct Cell {
  std::uint32_t n;
  std::size_t alpha_index;
  std::size_t beta_index;
};

struct TrialOutcome {
  Status status = Status::UNKNOWN;
  std::uint32_t core_sites = 0;
  double wall_ms = 0.0;
};

}  // namespace

std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path) {
  std::uintmax_t valid = 0;
  return read_rows(path, valid);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, const std::function<void(const SweepRecord&)>& on_record) {
  config.validate();
  std::vector<Cell> cells;
  for (const auto n : config.sizes)
    for (std::size_t b = 0; b < config.betas.size(); ++b)
      for (std::size_t a = 0; a < config.alphas.size(); ++a) cells.push_back({n, a, b});

  std::vector<SweepRecord> records;
  std::ofstream out;
  const bool store = !config.output.empty();
  if (store) {
    const auto manifest = manifest_path(config.output);
    const std::string hash = fmt::format("{:016x}", config.hash());
    const bool existing = std::filesystem::exists(config.output);
    if (config.resume && existing) {
      if (std::filesystem::exists(manifest)) {
        std::ifstream min(manifest);
        nlohmann::json m;
        try {
          m = nlohmann::json::parse(min);
        } catch (const nlohmann::json::parse_error& e) {
          throw ExperimentError(fmt::format("unreadable manifest '{}': {}", manifest.string(), e.what()));
        }
        if (m.value("config_hash", std::string()) != hash)
          throw ExperimentError(fmt::format("'{}' was produced by a different sweep config", config.output.string()));
      }
      std::uintmax_t valid = 0;
      records = read_rows(config.output, valid);
      if (records.size() > cells.size())
        throw ExperimentError(fmt::format("'{}' holds more rows than the sweep has cells", config.output.string()));
      for (std::size_t k = 0; k < records.size(); ++k) {
        const Cell& c = cells[k];
        const SweepRecord& r = records[k];
        if (r.n != c.n || r.alpha != config.alphas[c.alpha_index] || r.beta != config.betas[c.beta_index] ||
            r.trials != config.trials)
          throw ExperimentError(fmt::format("row {} of '{}' does not match the sweep cell order", k + 1,
                                            config.output.string()));
      }
      std::filesystem::resize_file(config.output, valid);
      out.open(config.output, std::ios::binary | std::ios::app);
      if (valid == 0) out << csv_header() << '\n';
    } else {
      out.open(config.output, std::ios::binary | std::ios::trunc);
      out << csv_header() << '\n';
    }
    if (!out) throw ExperimentError(fmt::format("cannot write '{}'", config.output.string()));
    std::ofstream mout(manifest, std::ios::binary | std::ios::trunc);
    ojson m;
    m["format_version"] = kSweepFormatVersion;
    m["config_hash"] = hash;
    m["config"] = ojson::parse(config.to_json());
    mout << m.dump(2) << '\n';
    out.flush();
  }
  for (const auto& r : records)
    if (on_record) on_record(r);

  const std::size_t first = records.size();
  const std::size_t pending = cells.size() - first;
  if (pending == 0) return records;
  const std::uint32_t trials = config.trials;
  std::vector<TrialOutcome> outcomes(pending * trials);
  std::vector<std::atomic<std::uint32_t>> remaining(pending);
  for (auto& r : remaining) r.store(trials);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex mu;
  std::condition_variable cv;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t task = next.fetch_add(1);
      if (task >= outcomes.size()) return;
      const std::size_t ci = first + task / trials;
      const auto trial = static_cast<std::uint32_t>(task % trials);
      const Cell& c = cells[ci];
      try {
        const auto start = std::chrono::steady_clock::now();
        const std::uint64_t seed =
            trial_seed(cell_seed(config.master_seed, c.n, c.alpha_index, c.beta_index, config.coupled), trial);
        const EnsembleParams params{c.n, config.alphas[c.alpha_index], config.betas[c.beta_index], config.graph_model,
                                    seed};
        const Instance inst = generate_instance(params);
        const Verdict v = solve(inst, SolveOptions{config.strategy, config.oracle_cap, seed});
        TrialOutcome& o = outcomes[task];
        o.status = v.status;
        o.core_sites = v.core_sites;
        o.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        abort.store(true);
        cv.notify_all();
        return;
      }
      if (remaining[task / trials].fetch_sub(1) == 1) {
        std::lock_guard lock(mu);
        cv.notify_all();
      }
    }
  };

  unsigned n_workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, outcomes.size()));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned k = 0; k < n_workers; ++k) pool.emplace_back(worker);

  try {
    for (std::size_t p = 0; p < pending; ++p) {
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return remaining[p].load() == 0 || abort.load(); });
        if (abort.load()) break;
      }
      const Cell& c = cells[first + p];
      SweepRecord r;
      r.n = c.n;
      r.alpha = config.alphas[c.alpha_index];
      r.beta = config.betas[c.beta_index];
      r.trials = trials;
      r.seed = cell_seed(config.master_seed, c.n, c.alpha_index, c.beta_index, config.coupled);
      double core = 0.0, wall = 0.0;
      for (std::uint32_t t = 0; t < trials; ++t) {
        const TrialOutcome& o = outcomes[p * trials + t];
        if (o.status == Status::SAT) ++r.n_sat;
        else if (o.status == Status::UNSAT) ++r.n_unsat;
        else ++r.n_unknown;
        core += o.core_sites;
        wall += o.wall_ms;
      }
      r.mean_core_sites = core / trials;
      r.mean_wall_ms = config.record_timing ? wall / trials : 0.0;
      if (store) {
        out << to_csv_row(r) << '\n';
        out.flush();
        if (!out) throw ExperimentError(fmt::format("failed writing '{}'", config.output.string()));
      }
      records.push_back(r);
      if (on_record) on_record(r);
    }
  } catch (...) {
    abort.store(true);
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return records;
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (k > n) throw ExperimentError(fmt::format("{} successes out of {} trials", k, n));
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<PSatEstimate> estimate_p_sat(std::span<const SweepRecord> records) {
  if (records.empty()) throw ExperimentError("no sweep records to estimate from");
  std::vector<PSatEstimate> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    PSatEstimate e;
    e.alpha = r.alpha;
    e.n = r.n;
    e.beta = r.beta;
    e.n_sat = r.n_sat;
    e.decided = r.n_sat + r.n_unsat;
    e.n_unknown = r.n_unknown;
    e.p_sat = e.decided ? static_cast<double>(r.n_sat) / e.decided : std::nan("");
    e.interval = wilson_interval(r.n_sat, e.decided);
    e.unknown_flag = r.trials > 0 && 20u * r.n_unknown >= r.trials;
    out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  return out;
}

namespace {

Crossing interpolate_crossing(const std::vector<PSatEstimate>& pts) {
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto& a = pts[k];
    const auto& b = pts[k + 1];
    if ((a.p_sat - 0.5) * (b.p_sat - 0.5) <= 0.0 && a.p_sat != b.p_sat) {
      Crossing c;
      c.alpha = a.alpha + (0.5 - a.p_sat) * (b.alpha - a.alpha) / (b.p_sat - a.p_sat);
      c.standard_error = 0.5 * (b.alpha - a.alpha);
      c.slope = -std::numeric_limits<double>::infinity();
      c.interpolated = true;
      return c;
    }
  }
  throw ExperimentError("no bracket: estimates do not cross 1/2");
}

}  // namespace

Crossing find_crossing(std::span<const PSatEstimate> estimates) {
  std::vector<PSatEstimate> pts;
  for (const auto& e : estimates)
    if (e.decided > 0) pts.push_back(e);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  const bool above = std::any_of(pts.begin(), pts.end(), [](const auto& e) { return e.p_sat >= 0.5; });
  const bool below = std::any_of(pts.begin(), pts.end(), [](const auto& e) { return e.p_sat <= 0.5; });
  if (pts.size() < 2 || !above || !below) throw ExperimentError("no bracket: estimates do not cross 1/2");
  const double lo = pts.front().alpha, hi = pts.back().alpha;

  double mean = 0.0;
  for (const auto& e : pts) mean += e.alpha;
  mean /= static_cast<double>(pts.size());
  const double range = std::max(hi - lo, 1e-12);

  auto loglik = [&](double a, double b) {
    double ll = 0.0;
    for (const auto& e : pts) {
      const double eta = a + b * (e.alpha - mean);
      // log p = -log(1 + e^-eta), log(1-p) = -log(1 + e^eta)
      const double lp = -std::log1p(std::exp(-eta)), lq = -std::log1p(std::exp(eta));
      ll += e.n_sat * lp + (e.decided - e.n_sat) * lq;
    }
    return ll;
  };

  double a = 0.0, b = -4.0 / range;
  double h00 = 0, h01 = 0, h11 = 0;
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    double g0 = 0, g1 = 0;
    h00 = h01 = h11 = 0;
    for (const auto& e : pts) {
      const double u = e.alpha - mean;
      const double p = 1.0 / (1.0 + std::exp(-(a + b * u)));
      const double r = e.n_sat - e.decided * p;
      const double w = e.decided * p * (1.0 - p);
      g0 += r;
      g1 += r * u;
      h00 += w;
      h01 += w * u;
      h11 += w * u * u;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0)) break;
    double da = (h11 * g0 - h01 * g1) / det;
    double db = (h00 * g1 - h01 * g0) / det;
    const double base = loglik(a, b);
    double step = 1.0;
    while (step > 1e-8 && loglik(a + step * da, b + step * db) < base - 1e-12) step *= 0.5;
    a += step * da;
    b += step * db;
    if (std::abs(b) * range > 1e4) break;
    if (std::abs(step * da) < 1e-12 && std::abs(step * db) * range < 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged || !(b < 0.0)) return interpolate_crossing(pts);

  Crossing c;
  c.slope = b;
  c.alpha = mean - a / b;
  const double det = h00 * h11 - h01 * h01;
  const double va = h11 / det, vb = h00 / det, vab = -h01 / det;
  const double ga = -1.0 / b, gb = a / (b * b);
  c.standard_error = std::sqrt(std::max(0.0, ga * ga * va + 2.0 * ga * gb * vab + gb * gb * vb));
  if (c.alpha < lo || c.alpha > hi)
    throw ExperimentError(fmt::format("refusing to extrapolate: fitted crossing {} lies outside [{}, {}]", c.alpha, lo, hi));
  return c;
}

CollapseResult scaling_collapse(std::span<const SweepRecord> records, double alpha_c, double exponent,
                                CollapseReading reading) {
  std::map<std::uint32_t, std::vector<std::pair<double, double>>> curves;
  for (const auto& r : records) {
    const std::uint32_t decided = r.n_sat + r.n_unsat;
    if (decided == 0) continue;
    const double scale = std::pow(static_cast<double>(r.n), exponent);
    const double x = reading == CollapseReading::Window ? (r.alpha - alpha_c) * scale : (r.alpha - alpha_c) / scale;
    curves[r.n].emplace_back(x, static_cast<double>(r.n_sat) / decided);
  }
  if (curves.size() < 3)
    throw ExperimentError(fmt::format("scaling collapse needs at least 3 values of N, got {}", curves.size()));
  CollapseResult out;
  out.exponent = exponent;
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (auto& [n, pts] : curves) {
    std::sort(pts.begin(), pts.end());
    lo = std::max(lo, pts.front().first);
    hi = std::min(hi, pts.back().first);
    for (const auto& [x, p] : pts) out.points.push_back({x, p, n});
  }
  if (!(hi > lo)) throw ExperimentError("scaling collapse: rescaled curves do not overlap");

  constexpr int kGrid = 64;
  double total = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + (hi - lo) * g / (kGrid - 1);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& [n, pts] : curves) {
      auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(x, -1.0));
      double y;
      if (it == pts.begin()) {
        y = it->second;
      } else if (it == pts.end()) {
        y = pts.back().second;
      } else {
        const auto& [x1, y1] = *(it - 1);
        const auto& [x2, y2] = *it;
        y = x2 > x1 ? y1 + (y2 - y1) * (x - x1) / (x2 - x1) : y2;
      }
      sum += y;
      sum2 += y * y;
    }
    const double k = static_cast<double>(curves.size());
    total += std::max(0.0, sum2 / k - (sum / k) * (sum / k));
  }
  out.objective = total / kGrid;
  return out;
}

}  // namespace mixsat
