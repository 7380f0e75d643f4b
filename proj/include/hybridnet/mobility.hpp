#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hybridnet/rng.hpp"

namespace hybridnet {

/// What happens when a user's next step would leave the bounding square.
/// `resample` redraws the heading uniformly until the full step stays inside
/// (the default); `reflect` mirrors the step off the walls instead.
enum class BoundaryMode { resample, reflect };

/// A mobile user. Positions live in the square [0, edge_len-1]^2 spanned by
/// the lattice. dir_x/dir_y cache speed * (cos heading, sin heading).
struct UserState {
    int id = 0;
    double x = 0;
    double y = 0;
    double heading = 0;  ///< radians in [0, 2*pi)
    double dir_x = 0;
    double dir_y = 0;
    double speed = 0;
    int gateway = 0;  ///< id of the nearest station
};

void set_heading(UserState& u, double heading);

/// Station nearest to (x, y) in Euclidean distance; equivalent to rounding
/// each coordinate, with halves rounded down so ties go to the smaller
/// station id. Throws std::invalid_argument if the point lies outside
/// [0, edge_len-1]^2.
int nearest_station(double x, double y, int edge_len);

/// n users placed uniformly in the square with uniform headings and constant
/// speed; gateways assigned. Throws std::invalid_argument for n < 2 or
/// speed < 0. Draw order per user: x, y, heading.
std::vector<UserState> init_users(int n, int edge_len, double speed, Rng& rng);

/// Advances one time step: the user moves speed units along its heading.
/// If the move would exit the square the boundary mode applies, and the
/// gateway is recomputed after the move. Zero-speed users are untouched.
void move_user(UserState& u, int edge_len, Rng& rng,
               BoundaryMode mode = BoundaryMode::resample);

/// Debug trace rows "t,user_id,x,y,gateway".
void write_user_trace(std::span<const UserState> users, int t, std::ostream& os);

}  // namespace hybridnet
