#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cellpool/deployment.hpp"
#include "cellpool/grid.hpp"

namespace cellpool {

enum class PathLossKind {
  PureExponent,  ///< d^{-alpha}, the stochastic-geometry model
  LogDistance,   ///< L(d)_dB = intercept + slope * log10(d / 1 m)
};

struct PathLossModel {
  PathLossKind kind = PathLossKind::LogDistance;
  double exponent = 3.76;       ///< PureExponent only
  double intercept_db = 17.39;  ///< LogDistance only
  double slope_db = 3.76;       ///< LogDistance only, dB per decade

  static PathLossModel pure_exponent(double alpha) { return {PathLossKind::PureExponent, alpha, 0.0, 0.0}; }
  static PathLossModel log_distance(double intercept_db, double slope_db) {
    return {PathLossKind::LogDistance, 0.0, intercept_db, slope_db};
  }
  /// 17.39 + 3.76 log10(d), coefficients exactly as tabulated.
  static PathLossModel literal() { return log_distance(17.39, 3.76); }
  /// 17.39 + 37.6 log10(d): 802.16m urban macro, 130.19 + 37.6 log10(d_km).
  static PathLossModel urban_macro() { return log_distance(17.39, 37.6); }

  friend bool operator==(const PathLossModel&, const PathLossModel&) = default;
};

/// Linear power gain 10^{-L(d)/10}; strictly decreasing in d.
/// Throws DomainError for d <= 0.
double path_loss(double d, const PathLossModel& model);

std::string_view to_string(PathLossKind k);

/// Named models: "pure-exponent" (alpha 3.76), "literal" (17.39 + 3.76 log10 d),
/// "urban-macro" (17.39 + 37.6 log10 d).
std::optional<PathLossModel> path_loss_preset(std::string_view name);

/// Components of one link's power gain.
struct LinkGain {
  double path_loss_linear = 1.0;
  double shadow_linear = 1.0;
  double fast_fade_linear = 1.0;

  /// Antenna gain, cable and penetration loss, noise figure: net 0 dB.
  static constexpr double kNetAntennaLinear = 1.0;

  double combined() const { return path_loss_linear * shadow_linear * fast_fade_linear * kNetAntennaLinear; }
};

struct ChannelConfig {
  PathLossModel path_loss = PathLossModel::literal();
  double shadowing_sigma_db = 8.0;
  double min_distance = 10.0;  ///< m; shorter links are clamped

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

/// Per (BS, user) quantities that are fixed for a whole scenario run.
/// Rows follow the layout order, columns the user order.
struct ChannelStatics {
  Matrix<double> distance;     ///< m, after clamping
  Matrix<double> path_gain;    ///< linear
  Matrix<double> shadow;       ///< linear, log-normal

  /// Long-term average power gain (path loss x shadowing, no fast fading).
  Matrix<double> average_gain() const;
};

/// Shadowing of a link depends only on (seed, BS id, user id).
ChannelStatics compute_statics(const std::vector<BaseStation>& layout, const std::vector<User>& users,
                               const ChannelConfig& config, std::uint64_t seed);

/// Unit-mean exponential power fade for one (frame, BS, user, subchannel);
/// a pure function of its arguments.
double fast_fade(std::uint64_t seed, std::uint64_t frame, int bs_id, int user_id, int subchannel);

/// A frame's fast fading over a band, indices local to the band. Stored
/// subchannel-major, then user, then BS, which is the scheduler's access
/// order.
struct ChannelRealization {
  std::vector<int> bs;           ///< layout positions
  std::vector<int> users;        ///< user positions
  std::vector<int> subchannels;  ///< global subchannel indices
  std::vector<double> fade;      ///< [c][m][b]

  double fade_at(std::size_t b, std::size_t m, std::size_t c) const {
    return fade[(c * users.size() + m) * bs.size() + b];
  }
};

/// Draws fast fading for one frame. Identical (seed, frame) give identical
/// tables, and a (BS, user, subchannel) triple gets the same fade no matter
/// which band it is drawn in.
ChannelRealization draw_channel(std::uint64_t frame_index, const std::vector<BaseStation>& layout,
                                const std::vector<User>& user_list, std::span<const int> bs_subset,
                                std::span<const int> user_subset, std::span<const int> subchannels,
                                std::uint64_t seed);

/// Per-subchannel link budget.
struct LinkBudget {
  double tx_power = 0.0;           ///< W on this subchannel (P_t / C)
  double noise_power = 0.0;        ///< W, N0 * W_C
  double bandwidth = 0.0;          ///< Hz, W_C
  bool interference_power_literal = false;  ///< drop P_t/C from interference terms
};

/// W_C log2(1 + P g_0 / (N0 W_C + sum_b P g_b)), with `interferer_gains`
/// the combined gains from the other active BSs on the tile.
double tile_rate(double serving_gain, std::span<const double> interferer_gains, const LinkBudget& budget);

}  // namespace cellpool
