#include "hybridnet/mobility.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hybridnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Nearest integer with halves rounded toward the smaller value.
int round_half_down(double v) { return static_cast<int>(std::ceil(v - 0.5)); }

bool inside(double x, double y, double side) {
    return x >= 0.0 && x <= side && y >= 0.0 && y <= side;
}

}  // namespace

void set_heading(UserState& u, double heading) {
    heading = std::fmod(heading, kTwoPi);
    if (heading < 0) heading += kTwoPi;
    u.heading = heading;
    u.dir_x = u.speed * std::cos(heading);
    u.dir_y = u.speed * std::sin(heading);
}

int nearest_station(double x, double y, int edge_len) {
    const double side = edge_len - 1;
    if (!inside(x, y, side))
        throw std::invalid_argument("nearest_station: position outside the bounding square");
    const int i = round_half_down(x);
    const int j = round_half_down(y);
    return i * edge_len + j;
}

std::vector<UserState> init_users(int n, int edge_len, double speed, Rng& rng) {
    if (n < 2) throw std::invalid_argument("init_users: need at least two users");
    if (speed < 0) throw std::invalid_argument("init_users: speed must be >= 0");
    if (edge_len < 2) throw std::invalid_argument("init_users: edge_len must be >= 2");
    const double side = edge_len - 1;
    std::vector<UserState> users(n);
    for (int k = 0; k < n; ++k) {
        UserState& u = users[k];
        u.id = k;
        u.speed = speed;
        u.x = side * uniform01(rng);
        u.y = side * uniform01(rng);
        set_heading(u, kTwoPi * uniform01(rng));
        u.gateway = nearest_station(u.x, u.y, edge_len);
    }
    return users;
}

void move_user(UserState& u, int edge_len, Rng& rng, BoundaryMode mode) {
    if (u.speed == 0.0) return;
    const double side = edge_len - 1;
    double nx = u.x + u.dir_x;
    double ny = u.y + u.dir_y;
    if (!inside(nx, ny, side)) {
        if (mode == BoundaryMode::resample) {
            // Redraw the heading until the whole step stays inside. The
            // admissible set has positive measure whenever speed fits in the
            // square, so this terminates; the cap catches misconfiguration.
            int attempts = 0;
            do {
                if (++attempts > 100000)
                    throw std::runtime_error(
                        "move_user: no admissible heading (speed too large for the area)");
                set_heading(u, kTwoPi * uniform01(rng));
                nx = u.x + u.dir_x;
                ny = u.y + u.dir_y;
            } while (!inside(nx, ny, side));
        } else {
            double dx = u.dir_x;
            double dy = u.dir_y;
            int folds = 0;
            while (!inside(nx, ny, side)) {
                if (++folds > 1000)
                    throw std::runtime_error("move_user: reflection failed to converge");
                if (nx < 0) {
                    nx = -nx;
                    dx = -dx;
                } else if (nx > side) {
                    nx = 2 * side - nx;
                    dx = -dx;
                }
                if (ny < 0) {
                    ny = -ny;
                    dy = -dy;
                } else if (ny > side) {
                    ny = 2 * side - ny;
                    dy = -dy;
                }
            }
            set_heading(u, std::atan2(dy, dx));
        }
    }
    u.x = nx;
    u.y = ny;
    u.gateway = nearest_station(u.x, u.y, edge_len);
}

void write_user_trace(std::span<const UserState> users, int t, std::ostream& os) {
    for (const UserState& u : users)
        os << t << ',' << u.id << ',' << u.x << ',' << u.y << ',' << u.gateway << '\n';
}

}  // namespace hybridnet
