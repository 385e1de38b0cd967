#include "mixsat/graph.hpp"

#include <algorithm>

namespace mixsat {

Adjacency::Adjacency(const Instance& instance) {
  std::vector<std::pair<Site, Site>> edges;
  edges.reserve(instance.clause_count());
  for (const auto& c : instance.clauses()) edges.emplace_back(c.i, c.j);
  build(instance.n_qubits(), edges);
}

Adjacency::Adjacency(std::uint32_t n_sites, std::span<const std::pair<Site, Site>> edges) {
  build(n_sites, edges);
}

void Adjacency::build(std::uint32_t n_sites, std::span<const std::pair<Site, Site>> edges) {
  offsets_.assign(n_sites + 1, 0);
  for (const auto& [a, b] : edges) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  for (std::uint32_t s = 0; s < n_sites; ++s) offsets_[s + 1] += offsets_[s];
  entries_.resize(offsets_.back());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    entries_[fill[a]++] = {b, e};
    entries_[fill[b]++] = {a, e};
  }
}

Components connected_components(const Adjacency& adj, std::uint32_t edge_count) {
  Components out;
  const std::uint32_t n = adj.site_count();
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  out.label.assign(n, kUnset);
  std::vector<Site> stack;
  for (Site root = 0; root < n; ++root) {
    if (out.label[root] != kUnset) continue;
    const std::uint32_t id = out.count++;
    out.sites.emplace_back();
    out.label[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const Site s = stack.back();
      stack.pop_back();
      out.sites[id].push_back(s);
      for (const auto& inc : adj.at(s)) {
        if (out.label[inc.neighbor] == kUnset) {
          out.label[inc.neighbor] = id;
          stack.push_back(inc.neighbor);
        }
      }
    }
    std::sort(out.sites[id].begin(), out.sites[id].end());
  }
  out.edges.assign(out.count, {});
  std::vector<bool> seen(edge_count, false);
  for (Site s = 0; s < n; ++s) {
    for (const auto& inc : adj.at(s)) {
      if (!seen[inc.clause]) {
        seen[inc.clause] = true;
        out.edges[out.label[s]].push_back(inc.clause);
      }
    }
  }
  for (auto& e : out.edges) std::sort(e.begin(), e.end());
  return out;
}

std::vector<std::vector<std::uint32_t>> biconnected_blocks(const Adjacency& adj,
                                                           std::uint32_t edge_count) {
  const std::uint32_t n = adj.site_count();
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> disc(n, kUnset), low(n, 0);
  std::vector<std::vector<std::uint32_t>> blocks;
  std::vector<std::uint32_t> edge_stack;
  std::vector<bool> edge_used(edge_count, false);
  struct Frame {
    Site site;
    std::uint32_t parent_edge;
    std::uint32_t next;
  };
  std::vector<Frame> stack;
  std::uint32_t timer = 0;
  for (Site root = 0; root < n; ++root) {
    if (disc[root] != kUnset) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, kUnset, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto incs = adj.at(f.site);
      if (f.next < incs.size()) {
        const Incidence inc = incs[f.next++];
        if (inc.clause == f.parent_edge) continue;
        if (disc[inc.neighbor] == kUnset) {
          edge_used[inc.clause] = true;
          edge_stack.push_back(inc.clause);
          disc[inc.neighbor] = low[inc.neighbor] = timer++;
          stack.push_back({inc.neighbor, inc.clause, 0});
        } else if (disc[inc.neighbor] < disc[f.site]) {
          // Back edge to an ancestor.
          if (!edge_used[inc.clause]) {
            edge_used[inc.clause] = true;
            edge_stack.push_back(inc.clause);
          }
          low[f.site] = std::min(low[f.site], disc[inc.neighbor]);
        }
      } else {
        const Site child = f.site;
        const std::uint32_t via = f.parent_edge;
        stack.pop_back();
        if (stack.empty()) break;
        const Site parent = stack.back().site;
        low[parent] = std::min(low[parent], low[child]);
        if (low[child] >= disc[parent]) {
          std::vector<std::uint32_t> block;
          for (;;) {
            const std::uint32_t e = edge_stack.back();
            edge_stack.pop_back();
            block.push_back(e);
            if (e == via) break;
          }
          std::sort(block.begin(), block.end());
          blocks.push_back(std::move(block));
        }
      }
    }
  }
  return blocks;
}

std::vector<std::uint32_t> find_bridges(const Adjacency& adj, std::uint32_t edge_count) {
  std::vector<std::uint32_t> bridges;
  for (const auto& block : biconnected_blocks(adj, edge_count))
    if (block.size() == 1) bridges.push_back(block.front());
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

}  // namespace mixsat
