#include "mixsat/snip.hpp"

#include <algorithm>
#include <deque>

#include "mixsat/graph.hpp"

namespace mixsat {

bool is_snippable(const Instance& instance, Site site) {
  std::uint32_t degree = 0;
  bool quantum = false;
  bool forbids[2] = {false, false};
  for (const auto& c : instance.clauses()) {
    if (c.i != site && c.j != site) continue;
    ++degree;
    if (c.is_quantum()) {
      quantum = true;
    } else {
      forbids[c.forbidden_bit_at(site)] = true;
    }
  }
  if (degree <= 1) return true;
  return !quantum && !(forbids[0] && forbids[1]);
}

namespace {

// Per-site counters over the clauses still attached; snippability is a
// function of these alone and can only switch from false to true.
struct SiteCounters {
  std::uint32_t degree = 0;
  std::uint32_t quantum = 0;
  std::uint32_t forbid[2] = {0, 0};

  bool snippable() const { return degree <= 1 || (quantum == 0 && (forbid[0] == 0 || forbid[1] == 0)); }
};

class Peeler {
 public:
  explicit Peeler(const Instance& instance)
      : instance_(instance), adj_(instance), counters_(instance.n_qubits()),
        site_alive_(instance.n_qubits(), true), clause_alive_(instance.clause_count(), true) {
    const auto& clauses = instance.clauses();
    for (std::uint32_t k = 0; k < clauses.size(); ++k) {
      for (const Site s : {clauses[k].i, clauses[k].j}) add(s, k, +1);
    }
  }

  bool snippable(Site s) const { return site_alive_[s] && counters_[s].snippable(); }

  // Removes the site with its live clauses; returns the sites whose counters
  // changed.
  std::vector<Site> remove(Site s, std::vector<SnipStep>& sequence) {
    SnipStep step{s, {}};
    std::vector<Site> touched;
    for (const auto& inc : adj_.at(s)) {
      if (!clause_alive_[inc.clause]) continue;
      clause_alive_[inc.clause] = false;
      step.clauses.push_back(inc.clause);
      add(s, inc.clause, -1);
      add(inc.neighbor, inc.clause, -1);
      touched.push_back(inc.neighbor);
    }
    std::sort(step.clauses.begin(), step.clauses.end());
    site_alive_[s] = false;
    sequence.push_back(std::move(step));
    return touched;
  }

  CoreReport finish(std::vector<SnipStep> sequence) const {
    CoreReport report;
    report.snip_sequence = std::move(sequence);
    const std::uint32_t n = instance_.n_qubits();
    report.surviving_site_map.assign(n, kSnipped);
    for (Site s = 0; s < n; ++s) {
      if (site_alive_[s]) {
        report.surviving_site_map[s] = static_cast<std::int64_t>(report.core_sites.size());
        report.core_sites.push_back(s);
      }
    }
    std::vector<Clause> core_clauses;
    const auto& clauses = instance_.clauses();
    for (std::uint32_t k = 0; k < clauses.size(); ++k) {
      if (!clause_alive_[k]) continue;
      Clause c = clauses[k];
      c.i = static_cast<Site>(report.surviving_site_map[c.i]);
      c.j = static_cast<Site>(report.surviving_site_map[c.j]);
      core_clauses.push_back(std::move(c));
      report.core_clauses.push_back(k);
    }
    report.core = Instance(static_cast<std::uint32_t>(report.core_sites.size()), std::move(core_clauses));
    return report;
  }

 private:
  void add(Site s, std::uint32_t clause, int delta) {
    const Clause& c = instance_.clauses()[clause];
    auto& ctr = counters_[s];
    ctr.degree += delta;
    if (c.is_quantum()) {
      ctr.quantum += delta;
    } else {
      ctr.forbid[c.forbidden_bit_at(s)] += delta;
    }
  }

  const Instance& instance_;
  Adjacency adj_;
  std::vector<SiteCounters> counters_;
  std::vector<bool> site_alive_;
  std::vector<bool> clause_alive_;
};

}  // namespace

CoreReport snip_core(const Instance& instance) {
  Peeler peeler(instance);
  std::vector<SnipStep> sequence;
  std::deque<Site> work;
  std::vector<bool> queued(instance.n_qubits(), false);
  for (Site s = 0; s < instance.n_qubits(); ++s) {
    if (peeler.snippable(s)) {
      work.push_back(s);
      queued[s] = true;
    }
  }
  while (!work.empty()) {
    const Site s = work.front();
    work.pop_front();
    for (const Site t : peeler.remove(s, sequence)) {
      if (!queued[t] && peeler.snippable(t)) {
        work.push_back(t);
        queued[t] = true;
      }
    }
  }
  return peeler.finish(std::move(sequence));
}

CoreReport snip_core(const Instance& instance, RandomStream& order) {
  Peeler peeler(instance);
  std::vector<SnipStep> sequence;
  std::vector<Site> pool;
  std::vector<bool> queued(instance.n_qubits(), false);
  for (Site s = 0; s < instance.n_qubits(); ++s) {
    if (peeler.snippable(s)) {
      pool.push_back(s);
      queued[s] = true;
    }
  }
  while (!pool.empty()) {
    const auto pick = static_cast<std::size_t>(order.bounded(pool.size()));
    const Site s = pool[pick];
    pool[pick] = pool.back();
    pool.pop_back();
    for (const Site t : peeler.remove(s, sequence)) {
      if (!queued[t] && peeler.snippable(t)) {
        pool.push_back(t);
        queued[t] = true;
      }
    }
  }
  return peeler.finish(std::move(sequence));
}

}  // namespace mixsat
