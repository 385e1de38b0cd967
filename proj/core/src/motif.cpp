#include "mixsat/motif.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace mixsat {

std::string_view to_string(MotifClass c) {
  switch (c) {
    case MotifClass::Tree: return "tree";
    case MotifClass::UnsnippableLoop: return "unsnippable_loop";
    case MotifClass::LoopWithCrossLink: return "loop_with_cross_link";
    case MotifClass::FigureEight: return "figure_eight";
    case MotifClass::Dumbbell: return "dumbbell";
    case MotifClass::MultiCyclicOther: return "multi_cyclic_other";
  }
  return "?";
}

bool unsnippable_through(const Instance& instance, Site site, std::uint32_t clause_a, std::uint32_t clause_b) {
  const Clause& a = instance.clauses()[clause_a];
  const Clause& b = instance.clauses()[clause_b];
  if (a.is_quantum() || b.is_quantum()) return true;
  return a.forbidden_bit_at(site) != b.forbidden_bit_at(site);
}

namespace {

Site shared_site(const Clause& a, const Clause& b) {
  return (a.i == b.i || a.i == b.j) ? a.i : a.j;
}

// Closed walk given as consecutive clause ids.
CycleNote note_cycle(const Instance& instance, const std::vector<std::uint32_t>& edges) {
  CycleNote note;
  note.unsnippable = true;
  const auto& clauses = instance.clauses();
  for (std::size_t t = 0; t < edges.size(); ++t) {
    const std::uint32_t in = edges[t];
    const std::uint32_t out = edges[(t + 1) % edges.size()];
    const Site s = shared_site(clauses[in], clauses[out]);
    note.sites.push_back(s);
    if (!unsnippable_through(instance, s, in, out)) note.unsnippable = false;
  }
  return note;
}

struct Strand {
  Site from = 0;
  Site to = 0;
  std::vector<std::uint32_t> edges;
};

// Splits a component into maximal paths between branch sites.
std::vector<Strand> strands(const Adjacency& adj, const std::vector<Site>& branch, std::vector<bool>& used) {
  std::vector<Strand> out;
  for (const Site b : branch) {
    for (const auto& first : adj.at(b)) {
      if (used[first.clause]) continue;
      Strand st{b, b, {}};
      Site cur = b;
      Incidence step = first;
      while (true) {
        used[step.clause] = true;
        st.edges.push_back(step.clause);
        cur = step.neighbor;
        if (adj.degree(cur) != 2) break;
        const auto inc = adj.at(cur);
        step = inc[0].clause == step.clause ? inc[1] : inc[0];
      }
      st.to = cur;
      out.push_back(std::move(st));
    }
  }
  return out;
}

std::vector<std::uint32_t> joined(const Strand& a, const Strand& b) {
  std::vector<std::uint32_t> e = a.edges;
  e.insert(e.end(), b.edges.rbegin(), b.edges.rend());
  return e;
}

}  // namespace

std::vector<ComponentClass> classify_components(const Instance& core) {
  const Adjacency adj(core);
  const auto n_edges = static_cast<std::uint32_t>(core.clause_count());
  for (Site s = 0; s < core.n_qubits(); ++s) {
    std::uint32_t forbid[2] = {0, 0};
    bool quantum = false;
    for (const auto& inc : adj.at(s)) {
      const Clause& c = core.clauses()[inc.clause];
      if (c.is_quantum()) {
        quantum = true;
      } else {
        ++forbid[c.forbidden_bit_at(s)];
      }
    }
    if (adj.degree(s) <= 1 || (!quantum && (forbid[0] == 0 || forbid[1] == 0)))
      throw NotACoreError(fmt::format("not a core: site {} is snippable", s));
  }

  const Components comps = connected_components(adj, n_edges);
  std::vector<bool> is_bridge(n_edges, false);
  for (const auto e : find_bridges(adj, n_edges)) is_bridge[e] = true;
  std::vector<bool> used(n_edges, false);

  std::vector<ComponentClass> out;
  out.reserve(comps.count);
  for (std::uint32_t c = 0; c < comps.count; ++c) {
    ComponentClass cc;
    cc.component = c;
    cc.sites = comps.sites[c];
    cc.clauses = comps.edges[c];
    cc.cyclomatic_number =
        static_cast<std::int64_t>(cc.clauses.size()) - static_cast<std::int64_t>(cc.sites.size()) + 1;
    std::uint32_t degree4 = 0;
    for (const Site s : cc.sites) {
      if (adj.degree(s) >= 3) cc.branch_sites.push_back(s);
      if (adj.degree(s) == 4) ++degree4;
    }

    if (cc.cyclomatic_number == 0) {
      cc.motif = MotifClass::Tree;
    } else if (cc.cyclomatic_number == 1 && cc.branch_sites.empty()) {
      cc.motif = MotifClass::UnsnippableLoop;
      // Walk the ring once.
      std::vector<std::uint32_t> ring;
      Site cur = cc.sites.front();
      Incidence step = adj.at(cur)[0];
      do {
        ring.push_back(step.clause);
        used[step.clause] = true;
        cur = step.neighbor;
        const auto inc = adj.at(cur);
        step = inc[0].clause == step.clause ? inc[1] : inc[0];
      } while (cur != cc.sites.front());
      cc.cycles.push_back(note_cycle(core, ring));
    } else if (cc.cyclomatic_number == 2) {
      const bool bridged = std::any_of(cc.clauses.begin(), cc.clauses.end(), [&](auto e) { return is_bridge[e]; });
      const auto parts = strands(adj, cc.branch_sites, used);
      if (degree4 == 1 && cc.branch_sites.size() == 1) {
        cc.motif = MotifClass::FigureEight;
      } else {
        cc.motif = bridged ? MotifClass::Dumbbell : MotifClass::LoopWithCrossLink;
      }
      if (cc.motif == MotifClass::LoopWithCrossLink) {
        for (std::size_t a = 0; a < parts.size(); ++a)
          for (std::size_t b = a + 1; b < parts.size(); ++b) cc.cycles.push_back(note_cycle(core, joined(parts[a], parts[b])));
      } else {
        for (const auto& p : parts)
          if (p.from == p.to) cc.cycles.push_back(note_cycle(core, p.edges));
      }
    } else {
      cc.motif = MotifClass::MultiCyclicOther;
    }
    out.push_back(std::move(cc));
  }
  return out;
}

WalkTrace walk_unsnippable(const Instance& core, Site start, RandomStream& rng) {
  if (start >= core.n_qubits())
    throw std::invalid_argument(fmt::format("start site {} out of range [0, {})", start, core.n_qubits()));
  const Adjacency adj(core);
  const auto n_edges = static_cast<std::uint32_t>(core.clause_count());
  const Components comps = connected_components(adj, n_edges);
  const auto label = comps.label[start];
  if (comps.edges[label].size() < comps.sites[label].size())
    throw std::invalid_argument(fmt::format("start site {} is not in a component with a cycle", start));

  WalkTrace trace;
  std::vector<bool> visited(core.n_qubits(), false);
  trace.path.push_back(start);
  visited[start] = true;

  std::vector<Incidence> options(adj.at(start).begin(), adj.at(start).end());
  std::optional<std::uint32_t> entry;
  Site cur = start;
  while (true) {
    if (entry) {
      options.clear();
      for (const auto& inc : adj.at(cur))
        if (inc.clause != *entry && unsnippable_through(core, cur, *entry, inc.clause)) options.push_back(inc);
    }
    if (options.empty()) {
      trace.outcome = WalkOutcome::Stuck;
      return trace;
    }
    const Incidence pick = options[options.size() == 1 ? 0 : rng.bounded(options.size())];
    trace.clauses.push_back(pick.clause);
    trace.path.push_back(pick.neighbor);
    entry = pick.clause;
    cur = pick.neighbor;
    if (visited[cur]) break;
    visited[cur] = true;
  }

  trace.repeated = cur;
  if (cur == start) {
    trace.outcome = WalkOutcome::ClosedLoop;
    const bool plain = std::all_of(trace.path.begin(), trace.path.end(), [&](Site s) { return adj.degree(s) == 2; });
    trace.walk_case = plain ? WalkCase::ReturnedAllDegreeTwo : WalkCase::ReturnedWithBranch;
    trace.closes_unsnippably = unsnippable_through(core, start, trace.clauses.back(), trace.clauses.front());
  } else {
    trace.outcome = WalkOutcome::Lasso;
    trace.walk_case = WalkCase::SelfCrossing;
  }
  return trace;
}

namespace {

struct CycleCounter {
  const Adjacency& adj;
  int length;
  Site root = 0;
  std::vector<bool> on_path;
  std::uint64_t found = 0;

  void extend(Site s, int depth) {
    if (depth == length) {
      for (const auto& inc : adj.at(s))
        if (inc.neighbor == root) ++found;
      return;
    }
    for (const auto& inc : adj.at(s)) {
      const Site t = inc.neighbor;
      if (t <= root || on_path[t]) continue;
      on_path[t] = true;
      extend(t, depth + 1);
      on_path[t] = false;
    }
  }
};

}  // namespace

std::uint64_t count_short_cycles(const Adjacency& graph, int length) {
  if (length < 3 || length > 8) throw std::invalid_argument(fmt::format("cycle length {} out of range [3, 8]", length));
  CycleCounter counter{graph, length, 0, std::vector<bool>(graph.site_count(), false), 0};
  for (Site s = 0; s < graph.site_count(); ++s) {
    counter.root = s;
    counter.on_path[s] = true;
    counter.extend(s, 1);
    counter.on_path[s] = false;
  }
  return counter.found / 2;
}

MotifCensus motif_census(const Instance& core) {
  MotifCensus census;
  census.classes = classify_components(core);
  census.components = census.classes.size();
  for (const auto& c : census.classes) ++census.counts[static_cast<std::size_t>(c.motif)];
  if (census.components)
    census.loop_fraction =
        static_cast<double>(census.count(MotifClass::UnsnippableLoop)) / static_cast<double>(census.components);

  const Adjacency adj(core);
  const auto n_edges = static_cast<std::uint32_t>(core.clause_count());
  const Components comps = connected_components(adj, n_edges);
  std::vector<bool> flagged(comps.count, false);
  std::vector<std::uint32_t> mark(core.n_qubits(), 0);
  std::uint32_t stamp = 0;
  for (const auto& block : biconnected_blocks(adj, n_edges)) {
    ++stamp;
    std::int64_t vertices = 0;
    for (const auto e : block) {
      for (const Site s : {core.clauses()[e].i, core.clauses()[e].j}) {
        if (mark[s] != stamp) {
          mark[s] = stamp;
          ++vertices;
        }
      }
    }
    if (static_cast<std::int64_t>(block.size()) - vertices + 1 >= 3) flagged[comps.label[core.clauses()[block[0]].i]] = true;
  }
  for (std::uint32_t c = 0; c < comps.count; ++c)
    if (flagged[c]) census.candidate_unsat_components.push_back(c);
  return census;
}

MotifSpec MotifSpec::loop(std::uint64_t length) {
  if (length < 3) throw std::invalid_argument("loop length must be at least 3");
  return {MotifKind::Loop, length, length, 2 * length, 1.0};
}

MotifSpec MotifSpec::loop_with_cross_link(std::uint64_t length, double c) {
  if (length < 5) throw std::invalid_argument("loop with cross-link needs at least 5 edges");
  return {MotifKind::LoopWithCrossLink, length - 1, length, 2, c};
}

MotifSpec MotifSpec::figure_eight(std::uint64_t length, double c) {
  if (length < 6) throw std::invalid_argument("figure eight needs at least 6 edges");
  return {MotifKind::FigureEight, length - 1, length, 4, c};
}

MotifSpec MotifSpec::dumbbell(std::uint64_t length, double c) {
  if (length < 7) throw std::invalid_argument("dumbbell needs at least 7 edges");
  return {MotifKind::Dumbbell, length - 1, length, 4, c};
}

}  // namespace mixsat
