#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <doctest.h>

#include "hybridnet/backbone.hpp"
#include "hybridnet/stats.hpp"
#include "oracles.hpp"

using namespace hybridnet;

namespace {

bool same_adjacency(const Backbone& a, const Backbone& b) {
    return a.adj_offsets == b.adj_offsets && a.adj_neighbors == b.adj_neighbors;
}

double degree_second_moment(const Backbone& b) {
    double m = 0;
    for (int s = 0; s < b.station_count(); ++s)
        m += static_cast<double>(b.degree(s)) * b.degree(s);
    return m / b.station_count();
}

}  // namespace

TEST_CASE("lattice: smallest case has 4 stations, 4 links, all degree 2") {
    const Backbone b = build_lattice(2);
    CHECK(b.station_count() == 4);
    CHECK(b.link_count() == 4);
    for (int s = 0; s < 4; ++s) CHECK(b.degree(s) == 2);
}

TEST_CASE("lattice: 3x3 center has degree 4, corners degree 2") {
    const Backbone b = build_lattice(3);
    CHECK(b.degree(lattice_station_id(3, 1, 1)) == 4);
    for (int i : {0, 2})
        for (int j : {0, 2}) CHECK(b.degree(lattice_station_id(3, i, j)) == 2);
}

TEST_CASE("lattice: 32x32 has 1024 stations and 1984 links") {
    const Backbone b = build_lattice(32);
    CHECK(b.station_count() == 1024);
    CHECK(b.link_count() == 2 * 32 * 31);
}

TEST_CASE("lattice: ids and positions follow i*edge+j") {
    const Backbone b = build_lattice(5);
    const int id = lattice_station_id(5, 3, 2);
    CHECK(b.pos_x[id] == 3.0);
    CHECK(b.pos_y[id] == 2.0);
    const auto nbrs = b.neighbors(id);
    const std::set<int> got(nbrs.begin(), nbrs.end());
    CHECK(got == std::set<int>{lattice_station_id(5, 2, 2), lattice_station_id(5, 4, 2),
                               lattice_station_id(5, 3, 1), lattice_station_id(5, 3, 3)});
}

TEST_CASE("lattice: rejects edge_len below 2") {
    CHECK_THROWS_AS(build_lattice(1), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice(0), std::invalid_argument);
}

TEST_CASE("dbrs: p = 0 leaves the lattice untouched") {
    const Backbone lat = build_lattice(8);
    for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
        Rng rng(seed);
        CHECK(same_adjacency(apply_dbrs(lat, 0.0, rng), lat));
    }
}

TEST_CASE("dbrs: p = 1 on the 2x2 lattice is the identity") {
    const Backbone lat = build_lattice(2);
    Rng rng(3);
    CHECK(same_adjacency(apply_dbrs(lat, 1.0, rng), lat));
}

TEST_CASE("dbrs: rejects p outside [0, 1] and non-lattice input") {
    const Backbone lat = build_lattice(4);
    Rng rng(1);
    CHECK_THROWS_AS(apply_dbrs(lat, -0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(apply_dbrs(lat, 1.1, rng), std::invalid_argument);
    const std::vector<std::pair<int, int>> edges{{0, 1}};
    const Backbone line = backbone_from_edges(2, edges);
    CHECK_THROWS_AS(apply_dbrs(line, 0.5, rng), std::invalid_argument);
}

TEST_CASE("dbrs: link count is conserved and high-degree hubs appear at p = 1") {
    const Backbone lat = build_lattice(32);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const Backbone b = apply_dbrs(lat, 1.0, rng);
        CHECK(b.link_count() == 1984);
        int max_deg = 0;
        for (int s = 0; s < b.station_count(); ++s) max_deg = std::max(max_deg, b.degree(s));
        CHECK(max_deg > 4);
    }
}

TEST_CASE("dbrs: rewired links stay in the original link's row or column, farther out") {
    const Backbone lat = build_lattice(16);
    Rng rng(99);
    const Backbone b = apply_dbrs(lat, 0.6, rng);
    const int e = b.edge_len;
    // Classify every link by the coordinate it keeps fixed. Each station must
    // own exactly one outgoing link per direction it had originally.
    std::vector<int> right_links(b.station_count(), 0), down_links(b.station_count(), 0);
    for (int s = 0; s < b.station_count(); ++s) {
        const int i = s / e, j = s % e;
        for (int w : b.neighbors(s)) {
            if (w <= s) continue;
            const int wi = w / e, wj = w % e;
            const bool horizontal = (wj == j);
            const bool vertical = (wi == i);
            CHECK(horizontal != vertical);
            if (horizontal) {
                CHECK(wi > i);
                ++right_links[s];
            } else {
                CHECK(wj > j);
                ++down_links[s];
            }
        }
    }
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < e; ++j) {
            CHECK(right_links[lattice_station_id(e, i, j)] == (i + 1 < e ? 1 : 0));
            CHECK(down_links[lattice_station_id(e, i, j)] == (j + 1 < e ? 1 : 0));
        }
}

TEST_CASE("dbrs: connectivity holds across 1000 (p, seed) draws") {
    const Backbone lats[] = {build_lattice(4), build_lattice(8), build_lattice(16)};
    Rng meta(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const Backbone& lat = lats[trial % 3];
        const double p = uniform01(meta);
        Rng rng(meta());
        CHECK(is_connected(apply_dbrs(lat, p, rng)));
    }
}

TEST_CASE("dbrs: identical seeds give identical graphs") {
    const Backbone lat = build_lattice(12);
    Rng r1(4242), r2(4242);
    CHECK(same_adjacency(apply_dbrs(lat, 0.35, r1), apply_dbrs(lat, 0.35, r2)));
}

TEST_CASE("distances: hand-checked lattice values") {
    Backbone b2 = build_lattice(2);
    compute_distances(b2);
    CHECK(b2.hops(lattice_station_id(2, 0, 0), lattice_station_id(2, 1, 1)) == 2);
    CHECK(b2.hops(0, 0) == 0);

    Backbone b32 = build_lattice(32);
    compute_distances(b32);
    CHECK(b32.hops(lattice_station_id(32, 0, 0), lattice_station_id(32, 31, 31)) == 62);
}

TEST_CASE("distances: BFS equals Floyd-Warshall on small graphs") {
    std::vector<Backbone> graphs;
    for (int e : {2, 3, 5, 8}) graphs.push_back(build_lattice(e));
    {
        Rng rng(5);
        graphs.push_back(apply_dbrs(build_lattice(8), 1.0, rng));
        graphs.push_back(apply_dbrs(build_lattice(6), 0.4, rng));
    }
    for (Backbone& b : graphs) {
        compute_distances(b);
        const auto fw = hybridnet::testing::floyd_warshall(b);
        const int n = b.station_count();
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) CHECK(b.hops(s, t) == fw[s][t]);
    }
}

TEST_CASE("distances: triangle inequality and zero diagonal") {
    Backbone b = build_lattice(5);
    {
        Rng rng(11);
        b = apply_dbrs(b, 0.5, rng);
    }
    compute_distances(b);
    const int n = b.station_count();
    for (int s = 0; s < n; ++s) {
        CHECK(b.hops(s, s) == 0);
        for (int t = 0; t < n; ++t) {
            CHECK(b.hops(s, t) == b.hops(t, s));
            for (int k = 0; k < n; ++k) CHECK(b.hops(s, t) <= b.hops(s, k) + b.hops(k, t));
        }
    }
}

TEST_CASE("distances: disconnected graph is rejected") {
    const std::vector<std::pair<int, int>> edges{{0, 1}, {2, 3}};
    Backbone b = backbone_from_edges(4, edges);
    CHECK_FALSE(is_connected(b));
    CHECK_THROWS_AS(compute_distances(b), std::runtime_error);
    CHECK_THROWS_AS(compute_betweenness(b), std::runtime_error);
}

TEST_CASE("betweenness: path of three stations") {
    const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}};
    Backbone b = backbone_from_edges(3, edges);
    const auto& score = compute_betweenness(b);
    CHECK(score[0] == doctest::Approx(0.0));
    CHECK(score[1] == doctest::Approx(2.0));
    CHECK(score[2] == doctest::Approx(0.0));
}

TEST_CASE("betweenness: every station of the 4-cycle scores 1") {
    Backbone b = build_lattice(2);
    const auto& score = compute_betweenness(b);
    for (int s = 0; s < 4; ++s) CHECK(score[s] == doctest::Approx(1.0));
}

TEST_CASE("betweenness: matches pairwise path-count oracle") {
    std::vector<Backbone> graphs;
    for (int e : {2, 3, 4, 5, 6}) graphs.push_back(build_lattice(e));
    {
        Rng rng(17);
        graphs.push_back(apply_dbrs(build_lattice(5), 0.7, rng));
        graphs.push_back(apply_dbrs(build_lattice(6), 1.0, rng));
    }
    for (Backbone& b : graphs) {
        const auto expected = hybridnet::testing::brute_betweenness(b);
        const auto& got = compute_betweenness(b);
        for (int s = 0; s < b.station_count(); ++s)
            CHECK(got[s] == doctest::Approx(expected[s]).epsilon(1e-9));
    }
}

TEST_CASE("betweenness: total equals sum over pairs of (hops - 1)") {
    for (int e : {2, 3, 4, 6, 8}) {
        Backbone b = build_lattice(e);
        compute_distances(b);
        const auto& score = compute_betweenness(b);
        const double total = std::accumulate(score.begin(), score.end(), 0.0);
        double expected = 0;
        const int n = b.station_count();
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t)
                if (s != t) expected += b.hops(s, t) - 1;
        CHECK(total == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("degree distribution: exact lattice fractions") {
    {
        const auto hist = degree_distribution(build_lattice(32));
        REQUIRE(hist.size() == 5);
        CHECK(hist[2] == doctest::Approx(4.0 / 1024));
        CHECK(hist[3] == doctest::Approx(120.0 / 1024));
        CHECK(hist[4] == doctest::Approx(900.0 / 1024));
        CHECK(hist[0] == 0.0);
        CHECK(hist[1] == 0.0);
    }
    {
        const auto hist = degree_distribution(build_lattice(2));
        REQUIRE(hist.size() == 3);
        CHECK(hist[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("degree distribution: rewiring broadens it") {
    const Backbone lat = build_lattice(32);
    const double base_moment = degree_second_moment(lat);
    double rewired_moment = 0;
    const int seeds = 1000;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        Rng rng(seed);
        rewired_moment += degree_second_moment(apply_dbrs(lat, 0.25, rng)) / seeds;
    }
    // Mean degree is fixed by the link count, so a larger second moment means
    // a broader distribution.
    CHECK(rewired_moment > base_moment);
}

TEST_CASE("adjacency dump: one sorted line per station") {
    const Backbone b = build_lattice(2);
    std::ostringstream os;
    write_adjacency(b, os);
    CHECK(os.str() == "0 1 2\n1 0 3\n2 0 3\n3 1 2\n");
}

TEST_CASE("from_edges: collapses duplicate edges") {
    const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 0}, {0, 1}, {1, 2}};
    const Backbone b = backbone_from_edges(3, edges);
    CHECK(b.link_count() == 2);
}
