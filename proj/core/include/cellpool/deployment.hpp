#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <optional>
#include <vector>

#include "cellpool/analytic.hpp"
#include "cellpool/grid.hpp"

namespace cellpool {

struct Position {
  double x = 0.0;  ///< m
  double y = 0.0;  ///< m

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

/// Axis-aligned scenario area [0, width] x [0, height].
struct Region {
  double width = 20e3;
  double height = 20e3;

  bool contains(const Position& p) const { return p.x >= 0 && p.y >= 0 && p.x <= width && p.y <= height; }
  double area() const { return width * height; }

  friend bool operator==(const Region&, const Region&) = default;
};

/// Contiguous block of global subchannel indices a BS may transmit on.
struct SubchannelRange {
  int first = 0;
  int count = 0;

  bool contains(int c) const { return c >= first && c < first + count; }
  friend bool operator==(const SubchannelRange&, const SubchannelRange&) = default;
};

struct BaseStation {
  int id = 0;
  int op = 1;  ///< owning operator, 1 or 2
  Position position;
  SubchannelRange band;

  friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

struct User {
  int id = 0;
  int op = 1;  ///< subscription
  Position position;
  int serving_bs = -1;  ///< BaseStation::id, -1 until associated

  friend bool operator==(const User&, const User&) = default;
};

enum class LayoutMode { Uniform, PerturbedGrid };

std::string_view to_string(LayoutMode m);
std::optional<LayoutMode> parse_layout_mode(std::string_view text);

/// n1 operator-1 BSs (ids 0..n1-1) then n2 operator-2 BSs, all inside
/// `region`. Uniform draws i.i.d. positions; PerturbedGrid fills randomly
/// chosen cells of a near-square grid with a jittered site each, which is
/// closer to planned macro deployments.
std::vector<BaseStation> synthesize_layout(int n1, int n2, const Region& region, std::uint64_t seed,
                                           LayoutMode mode);

/// ceil(per_cell_target * n_i) users of operator i, uniform over `region`.
/// Operator-1 users come first; ids are sequential.
std::vector<User> deploy_users(double per_cell_target, const std::vector<BaseStation>& layout,
                               const Region& region, std::uint64_t seed);

/// Same with a separate users-per-cell target for each operator.
std::vector<User> deploy_users(std::array<double, 2> per_cell_target, const std::vector<BaseStation>& layout,
                               const Region& region, std::uint64_t seed);

/// Sets User::serving_bs to the BS with the highest long-term average power
/// (`avg_power` is indexed [bs position in layout][user position]). NoCoop
/// restricts candidates to the user's own operator. Ties go to the lower
/// BS id. Throws ValidationError if a user has no candidate.
std::vector<User> associate(std::vector<User> users, const std::vector<BaseStation>& layout, Strategy strategy,
                            const Matrix<double>& avg_power);

/// Operator densities implied by a layout over `region` (BS/m^2), with
/// user density = users_per_cell * bs density.
OperatorParams implied_operator(const std::vector<BaseStation>& layout, int op, const Region& region,
                                double bandwidth, double users_per_cell);

}  // namespace cellpool
