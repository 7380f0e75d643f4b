#include <stdexcept>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hybridnet/backbone.hpp"
#include "hybridnet/mobility.hpp"
#include "oracles.hpp"

using namespace hybridnet;

TEST_CASE("nearest station: coordinate rounding") {
    CHECK(nearest_station(3.2, 4.7, 32) == lattice_station_id(32, 3, 5));
    CHECK(nearest_station(0.0, 0.0, 32) == 0);
    CHECK(nearest_station(31.0, 31.0, 32) == lattice_station_id(32, 31, 31));
}

TEST_CASE("nearest station: halves round down, ties to the smaller id") {
    CHECK(nearest_station(3.5, 4.0, 32) == lattice_station_id(32, 3, 4));
    CHECK(nearest_station(3.0, 4.5, 32) == lattice_station_id(32, 3, 4));
    CHECK(nearest_station(3.5, 4.5, 32) == lattice_station_id(32, 3, 4));
}

TEST_CASE("nearest station: rejects positions outside the square") {
    CHECK_THROWS_AS(nearest_station(-0.01, 5.0, 32), std::invalid_argument);
    CHECK_THROWS_AS(nearest_station(5.0, 31.01, 32), std::invalid_argument);
}

TEST_CASE("nearest station: agrees with brute-force scan on 10^4 points") {
    const Backbone b = build_lattice(13);
    Rng rng(77);
    for (int k = 0; k < 10000; ++k) {
        const double x = 12.0 * uniform01(rng);
        const double y = 12.0 * uniform01(rng);
        const int got = nearest_station(x, y, 13);
        const int expected = hybridnet::testing::brute_nearest(b, x, y);
        if (got != expected) {
            // Allow genuine ties only; they must resolve to the smaller id.
            const double dg = std::hypot(b.pos_x[got] - x, b.pos_y[got] - y);
            const double de = std::hypot(b.pos_x[expected] - x, b.pos_y[expected] - y);
            CHECK(dg == doctest::Approx(de));
            CHECK(got < expected);
        }
    }
}

TEST_CASE("init_users: placement, headings and gateways") {
    Rng rng(5);
    const auto users = init_users(1000, 32, 0.3, rng);
    REQUIRE(users.size() == 1000);
    for (const UserState& u : users) {
        CHECK(u.x >= 0.0);
        CHECK(u.x <= 31.0);
        CHECK(u.y >= 0.0);
        CHECK(u.y <= 31.0);
        CHECK(u.heading >= 0.0);
        CHECK(u.heading < 2 * std::numbers::pi);
        CHECK(u.speed == 0.3);
        CHECK(u.gateway == nearest_station(u.x, u.y, 32));
    }
}

TEST_CASE("init_users: minimum configuration and bad arguments") {
    Rng rng(1);
    const auto users = init_users(2, 2, 0.0, rng);
    CHECK(users.size() == 2);
    CHECK(users[0].speed == 0.0);
    CHECK_THROWS_AS(init_users(1, 32, 0.3, rng), std::invalid_argument);
    CHECK_THROWS_AS(init_users(10, 32, -0.1, rng), std::invalid_argument);
}

TEST_CASE("init_users: mean position sits at the center of the square") {
    Rng rng(12);
    const auto users = init_users(100000, 32, 0.3, rng);
    double mx = 0, my = 0;
    for (const UserState& u : users) {
        mx += u.x / users.size();
        my += u.y / users.size();
    }
    CHECK(mx == doctest::Approx(15.5).epsilon(0.01));
    CHECK(my == doctest::Approx(15.5).epsilon(0.01));
}

TEST_CASE("move_user: zero speed is a no-op") {
    Rng rng(3);
    auto users = init_users(2, 8, 0.0, rng);
    UserState before = users[0];
    move_user(users[0], 8, rng);
    CHECK(users[0].x == before.x);
    CHECK(users[0].y == before.y);
    CHECK(users[0].heading == before.heading);
    CHECK(users[0].gateway == before.gateway);
}

TEST_CASE("move_user: boundary hit resamples into the square") {
    UserState u;
    u.id = 0;
    u.x = 0.1;
    u.y = 5.0;
    u.speed = 0.3;
    set_heading(u, std::numbers::pi);  // due -x, would exit
    Rng rng(9);
    move_user(u, 32, rng);
    CHECK(u.x >= 0.0);
    CHECK(u.x <= 31.0);
    CHECK(u.y >= 0.0);
    CHECK(u.y <= 31.0);
    CHECK(u.heading != doctest::Approx(std::numbers::pi));
    const double displacement = std::hypot(u.x - 0.1, u.y - 5.0);
    CHECK(displacement == doctest::Approx(0.3));
}

TEST_CASE("move_user: containment, gateway consistency, displacement bound") {
    const int edge = 9;
    const Backbone b = build_lattice(edge);
    Rng rng(31);
    for (double speed : {0.05, 0.3, 1.7}) {
        for (BoundaryMode mode : {BoundaryMode::resample, BoundaryMode::reflect}) {
            auto users = init_users(20, edge, speed, rng);
            for (int step = 0; step < 500; ++step) {
                for (UserState& u : users) {
                    const double px = u.x, py = u.y;
                    move_user(u, edge, rng, mode);
                    CHECK(u.x >= 0.0);
                    CHECK(u.x <= edge - 1.0);
                    CHECK(u.y >= 0.0);
                    CHECK(u.y <= edge - 1.0);
                    CHECK(std::hypot(u.x - px, u.y - py) <= speed + 1e-12);
                }
                if (step % 50 == 0)
                    for (const UserState& u : users)
                        CHECK(u.gateway == hybridnet::testing::brute_nearest(b, u.x, u.y));
            }
        }
    }
}

TEST_CASE("move_user: long-run occupancy is uniform over the square") {
    const int edge = 32;
    const double side = edge - 1;
    Rng rng(8);
    auto users = init_users(2, edge, 0.3, rng);
    UserState& u = users[0];
    const int cells = 8;
    std::vector<double> counts(cells * cells, 0.0);
    const int steps = 1000000;
    for (int k = 0; k < steps; ++k) {
        move_user(u, edge, rng);
        int cx = static_cast<int>(u.x / side * cells);
        int cy = static_cast<int>(u.y / side * cells);
        cx = std::min(cx, cells - 1);
        cy = std::min(cy, cells - 1);
        counts[cx * cells + cy] += 1.0;
    }
    const double expected = static_cast<double>(steps) / (cells * cells);
    for (double c : counts) CHECK(std::abs(c - expected) / expected <= 0.05);
}

TEST_CASE("move_user: identical seeds give identical trajectories") {
    Rng r1(444), r2(444);
    auto a = init_users(5, 16, 0.9, r1);
    auto b = init_users(5, 16, 0.9, r2);
    for (int step = 0; step < 200; ++step)
        for (int k = 0; k < 5; ++k) {
            move_user(a[k], 16, r1);
            move_user(b[k], 16, r2);
            CHECK(a[k].x == b[k].x);
            CHECK(a[k].y == b[k].y);
            CHECK(a[k].gateway == b[k].gateway);
        }
}
