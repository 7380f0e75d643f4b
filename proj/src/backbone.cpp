#include "hybridnet/backbone.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>

namespace hybridnet {

namespace {

/// Builds the CSR adjacency from an undirected edge list. Collapses
/// duplicates so the graph stays simple.
void set_edges(Backbone& b, std::vector<std::pair<int, int>> edges) {
    const int n = b.station_count();
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("set_edges: self-loop");
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("set_edges: station id out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<int> deg(n, 0);
    for (const auto& [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    b.adj_offsets.assign(n + 1, 0);
    for (int s = 0; s < n; ++s) b.adj_offsets[s + 1] = b.adj_offsets[s] + deg[s];
    b.adj_neighbors.assign(b.adj_offsets[n], 0);
    std::vector<int> cursor(b.adj_offsets.begin(), b.adj_offsets.end() - 1);
    for (const auto& [u, v] : edges) {
        b.adj_neighbors[cursor[u]++] = v;
        b.adj_neighbors[cursor[v]++] = u;
    }
    for (int s = 0; s < n; ++s)
        std::sort(b.adj_neighbors.begin() + b.adj_offsets[s],
                  b.adj_neighbors.begin() + b.adj_offsets[s + 1]);
    b.dist.clear();
    b.betweenness.clear();
}

/// BFS hop counts from src; -1 marks unreached stations.
std::vector<int> bfs_hops(const Backbone& b, int src) {
    std::vector<int> d(b.station_count(), -1);
    std::queue<int> q;
    d[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : b.neighbors(v)) {
            if (d[w] < 0) {
                d[w] = d[v] + 1;
                q.push(w);
            }
        }
    }
    return d;
}

}  // namespace

Backbone build_lattice(int edge_len) {
    if (edge_len < 2) throw std::invalid_argument("build_lattice: edge_len must be >= 2");
    Backbone b;
    b.edge_len = edge_len;
    const int n = edge_len * edge_len;
    b.pos_x.resize(n);
    b.pos_y.resize(n);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(2 * edge_len * (edge_len - 1)));
    for (int i = 0; i < edge_len; ++i) {
        for (int j = 0; j < edge_len; ++j) {
            const int id = lattice_station_id(edge_len, i, j);
            b.pos_x[id] = i;
            b.pos_y[id] = j;
            if (i + 1 < edge_len) edges.emplace_back(id, lattice_station_id(edge_len, i + 1, j));
            if (j + 1 < edge_len) edges.emplace_back(id, lattice_station_id(edge_len, i, j + 1));
        }
    }
    set_edges(b, std::move(edges));
    return b;
}

Backbone apply_dbrs(const Backbone& lattice, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("apply_dbrs: p must be in [0, 1]");
    const int e = lattice.edge_len;
    if (e < 2) throw std::invalid_argument("apply_dbrs: backbone was not built as a lattice");

    Backbone b;
    b.edge_len = e;
    b.pos_x = lattice.pos_x;
    b.pos_y = lattice.pos_y;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(2 * e * (e - 1)));
    for (int i = 0; i < e; ++i) {
        for (int j = 0; j < e; ++j) {
            if (i + 1 < e) {
                int x = i + 1;
                if (uniform01(rng) < p) x = i + 1 + uniform_below(rng, e - i - 1);
                edges.emplace_back(lattice_station_id(e, i, j), lattice_station_id(e, x, j));
            }
            if (j + 1 < e) {
                int y = j + 1;
                if (uniform01(rng) < p) y = j + 1 + uniform_below(rng, e - j - 1);
                edges.emplace_back(lattice_station_id(e, i, j), lattice_station_id(e, i, y));
            }
        }
    }
    set_edges(b, std::move(edges));
    return b;
}

void compute_distances(Backbone& b) {
    const int n = b.station_count();
    b.dist.assign(static_cast<std::size_t>(n) * n, 0);
    for (int s = 0; s < n; ++s) {
        const std::vector<int> d = bfs_hops(b, s);
        for (int t = 0; t < n; ++t) {
            if (d[t] < 0) {
                b.dist.clear();
                throw std::runtime_error("compute_distances: graph is disconnected (station " +
                                         std::to_string(t) + " unreachable from " +
                                         std::to_string(s) + ")");
            }
            b.dist[static_cast<std::size_t>(s) * n + t] = static_cast<std::uint16_t>(d[t]);
        }
    }
}

const std::vector<double>& compute_betweenness(Backbone& b) {
    const int n = b.station_count();
    std::vector<double> score(n, 0.0);
    std::vector<int> d(n), order;
    std::vector<double> sigma(n), delta(n);
    std::vector<std::vector<int>> preds(n);
    order.reserve(n);

    for (int s = 0; s < n; ++s) {
        std::fill(d.begin(), d.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& pv : preds) pv.clear();
        order.clear();

        // Forward BFS over shortest-path DAG: distances, path counts, predecessors.
        std::queue<int> q;
        d[s] = 0;
        sigma[s] = 1.0;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            order.push_back(v);
            for (int w : b.neighbors(v)) {
                if (d[w] < 0) {
                    d[w] = d[v] + 1;
                    q.push(w);
                }
                if (d[w] == d[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        if (static_cast<int>(order.size()) != n)
            throw std::runtime_error("compute_betweenness: graph is disconnected");

        // Dependency accumulation in reverse BFS order.
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) score[w] += delta[w];
        }
    }
    b.betweenness = std::move(score);
    return b.betweenness;
}

std::vector<double> degree_distribution(const Backbone& b) {
    const int n = b.station_count();
    int max_deg = 0;
    for (int s = 0; s < n; ++s) max_deg = std::max(max_deg, b.degree(s));
    std::vector<double> hist(max_deg + 1, 0.0);
    for (int s = 0; s < n; ++s) hist[b.degree(s)] += 1.0;
    for (double& h : hist) h /= n;
    return hist;
}

bool is_connected(const Backbone& b) {
    if (b.station_count() == 0) return true;
    const std::vector<int> d = bfs_hops(b, 0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

void write_adjacency(const Backbone& b, std::ostream& os) {
    for (int s = 0; s < b.station_count(); ++s) {
        os << s;
        for (int w : b.neighbors(s)) os << ' ' << w;
        os << '\n';
    }
}

Backbone backbone_from_edges(int stations, std::span<const std::pair<int, int>> edges) {
    if (stations < 1) throw std::invalid_argument("backbone_from_edges: need at least one station");
    Backbone b;
    b.edge_len = 0;
    b.pos_x.resize(stations);
    b.pos_y.assign(stations, 0.0);
    for (int s = 0; s < stations; ++s) b.pos_x[s] = s;
    set_edges(b, std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
    return b;
}

}  // namespace hybridnet
