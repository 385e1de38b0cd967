#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixsat/ensemble.hpp"

namespace mixsat {

struct Incidence {
  Site neighbor;
  std::uint32_t clause;
};

/// Compressed incidence lists of an instance's interaction graph.
class Adjacency {
 public:
  explicit Adjacency(const Instance& instance);
  Adjacency(std::uint32_t n_sites, std::span<const std::pair<Site, Site>> edges);

  std::uint32_t site_count() const { return static_cast<std::uint32_t>(offsets_.size() - 1); }
  std::span<const Incidence> at(Site s) const {
    return {entries_.data() + offsets_[s], entries_.data() + offsets_[s + 1]};
  }
  std::uint32_t degree(Site s) const { return offsets_[s + 1] - offsets_[s]; }

 private:
  void build(std::uint32_t n_sites, std::span<const std::pair<Site, Site>> edges);

  std::vector<std::uint32_t> offsets_;
  std::vector<Incidence> entries_;
};

struct Components {
  std::vector<std::uint32_t> label;  // per site
  std::uint32_t count = 0;
  std::vector<std::vector<Site>> sites;
  std::vector<std::vector<std::uint32_t>> edges;  // edge/clause ids per component
};

Components connected_components(const Adjacency& adj, std::uint32_t edge_count);

/// Edge ids of all bridges.
std::vector<std::uint32_t> find_bridges(const Adjacency& adj, std::uint32_t edge_count);

/// Biconnected blocks as lists of edge ids (Hopcroft-Tarjan, iterative).
std::vector<std::vector<std::uint32_t>> biconnected_blocks(const Adjacency& adj, std::uint32_t edge_count);

}  // namespace mixsat
