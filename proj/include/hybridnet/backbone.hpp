#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hybridnet/rng.hpp"

namespace hybridnet {

/// Fixed station graph. Stations of an edge_len x edge_len lattice sit on the
/// integer grid: station (i, j) has id i * edge_len + j and position (i, j),
/// with unit link length. The graph is undirected and simple.
///
/// A Backbone is immutable once construction (build + optional rewiring +
/// compute_distances / compute_betweenness) is finished, and can then be
/// shared read-only across concurrent simulations.
struct Backbone {
    int edge_len = 0;  ///< lattice side length; 0 for graphs not born as a lattice
    std::vector<double> pos_x;
    std::vector<double> pos_y;
    std::vector<int> adj_offsets;    ///< CSR offsets, size station_count()+1
    std::vector<int> adj_neighbors;  ///< CSR neighbor ids, sorted per station
    std::vector<std::uint16_t> dist;  ///< all-pairs hop counts, filled by compute_distances
    std::vector<double> betweenness;  ///< per-station scores, filled by compute_betweenness

    int station_count() const { return static_cast<int>(pos_x.size()); }

    std::span<const int> neighbors(int s) const {
        return {adj_neighbors.data() + adj_offsets[s],
                adj_neighbors.data() + adj_offsets[s + 1]};
    }

    int degree(int s) const { return adj_offsets[s + 1] - adj_offsets[s]; }

    std::size_t link_count() const { return adj_neighbors.size() / 2; }

    bool has_distances() const { return !dist.empty(); }

    /// Hop distance between stations; requires compute_distances.
    std::uint16_t hops(int s, int t) const {
        return dist[static_cast<std::size_t>(s) * static_cast<std::size_t>(station_count()) + t];
    }
};

inline int lattice_station_id(int edge_len, int i, int j) { return i * edge_len + j; }

/// Square lattice of edge_len^2 stations with links (i,j)-(i+1,j) and
/// (i,j)-(i,j+1). Distances are not computed. Throws std::invalid_argument
/// for edge_len < 2.
Backbone build_lattice(int edge_len);

/// Direction-based rewiring. Every station (i, j), visited in id order,
/// rewires its link toward (i+1, j) with probability p to a uniformly random
/// station (x, j) with x > i, and its link toward (i, j+1) with probability p
/// to a uniformly random station (i, y) with y > j. Stations in the last
/// row/column have no such link to rewire. The result is a simple connected
/// graph with the same positions; any distance/betweenness tables are left
/// unset. The input must be an unrewired lattice.
Backbone apply_dbrs(const Backbone& lattice, double p, Rng& rng);

/// Fills b.dist with BFS hop counts from every station. Throws
/// std::runtime_error if the graph is disconnected.
void compute_distances(Backbone& b);

/// Shortest-path betweenness per station: sum over ordered pairs (s, t) with
/// s != t, both distinct from i, of the fraction of shortest s-t paths that
/// pass through i. Stores into b.betweenness and returns it. Throws
/// std::runtime_error if the graph is disconnected.
const std::vector<double>& compute_betweenness(Backbone& b);

/// Normalized histogram over station degrees; entry k is the fraction of
/// stations with exactly k station-station links.
std::vector<double> degree_distribution(const Backbone& b);

bool is_connected(const Backbone& b);

/// Debug dump, one line per station: "<id> <neighbor> <neighbor> ...".
void write_adjacency(const Backbone& b, std::ostream& os);

/// Arbitrary graph from an undirected edge list (duplicates collapsed),
/// stations placed at (id, 0). Used by tests and tooling.
Backbone backbone_from_edges(int stations, std::span<const std::pair<int, int>> edges);

}  // namespace hybridnet
