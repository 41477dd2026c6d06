#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cellpool/analytic.hpp"
#include "cellpool/channel.hpp"
#include "cellpool/deployment.hpp"
#include "cellpool/scheduler.hpp"

namespace cellpool {

/// Where the BSs come from: a fixed list (e.g. loaded from CSV) or a
/// synthesized layout.
struct LayoutSource {
  std::vector<BaseStation> stations;  ///< used when non-empty
  std::string file;                   ///< provenance label for a loaded layout
  int count1 = 16;
  int count2 = 13;
  LayoutMode mode = LayoutMode::PerturbedGrid;
  std::uint64_t seed = 1;

  friend bool operator==(const LayoutSource&, const LayoutSource&) = default;
};

struct OperatorConfig {
  double bandwidth = 10e6;       ///< Hz
  double users_per_cell = 100.0;

  friend bool operator==(const OperatorConfig&, const OperatorConfig&) = default;
};

struct OfdmaParams {
  int subchannels_per_band = 32;
  int slots = 60;
  int frames = 30;
  int runs = 5;

  friend bool operator==(const OfdmaParams&, const OfdmaParams&) = default;
};

struct ScenarioConfig {
  Region region;
  LayoutSource layout;
  std::array<OperatorConfig, 2> operators{};
  double tx_power = 39.810717055349734;      ///< W (46 dBm)
  double noise_density = 3.981071705534986e-21;  ///< W/Hz (-174 dBm/Hz)
  ChannelConfig channel;
  OfdmaParams ofdma;
  Strategy strategy = Strategy::NoCoop;
  std::uint64_t seed = 1;
  double epsilon = 1.0;  ///< bit/s
  bool interference_power_literal = false;
  unsigned threads = 0;

  /// Throws ValidationError listing every invalid field.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Canonical one-line-per-field rendering; stable across runs and used for
/// the provenance hash.
std::string canonical_text(const ScenarioConfig& config);
std::string config_hash(const ScenarioConfig& config);

struct UserThroughput {
  int run = 0;
  int user_id = 0;
  int op = 1;
  int serving_bs = -1;
  double throughput_bps = 0.0;
};

struct OperatorMeans {
  double op1 = 0.0;
  double op2 = 0.0;
  double overall = 0.0;
};

struct ThroughputReport {
  Strategy strategy = Strategy::NoCoop;
  std::vector<UserThroughput> users;  ///< every run, run-major
  std::vector<OperatorMeans> per_run;
  OperatorMeans means;
  std::string config_hash;
  std::string layout_label;
  std::vector<std::uint64_t> run_seeds;
  double wall_time_s = 0.0;
};

/// Run seed r (0-based) of a scenario; user placement, shadowing and fading
/// of run r all derive from it.
std::uint64_t run_seed(std::uint64_t scenario_seed, int run);

/// The BS list a config resolves to.
std::vector<BaseStation> resolve_layout(const ScenarioConfig& config);

ThroughputReport run_scenario(const ScenarioConfig& config);

struct ComparisonRow {
  Strategy strategy = Strategy::NoCoop;
  int op = 0;  ///< 0 = all users
  double mean_bps = 0.0;
  double gain_vs_nocoop = 0.0;  ///< fraction, 0.25 = +25%
  double median_bps = 0.0;
  double median_gain_vs_nocoop = 0.0;
};

struct StrategyComparison {
  std::array<ThroughputReport, 3> reports;  ///< NoCoop, FlexRoam, Merger
  std::vector<ComparisonRow> rows;
};

/// All three strategies on common random numbers (same users, shadowing and
/// fades); `config.strategy` is ignored.
StrategyComparison compare_strategies(const ScenarioConfig& config);

/// Empirical CDF of all per-user throughputs at `n_points` quantile-spaced
/// abscissae: (throughput, fraction of users at or below it).
std::vector<std::pair<double, double>> emit_cdf(const ThroughputReport& report, std::size_t n_points);

/// One independently scheduled band: layout positions of its BSs, user-list
/// positions of the users it serves (grouped by serving BS), and global
/// subchannel indices with their width and per-subchannel power.
struct BandPlan {
  std::vector<int> bs;
  std::vector<int> users;
  std::vector<int> subchannels;
  double width = 0.0;
  double tx_per_subchannel = 0.0;
};

/// NoCoop and FlexRoam: one band per operator with that operator's BSs and
/// the users they serve. Merger: a single band with every BS, user and
/// subchannel, each subchannel (W1 + W2) / (C1 + C2) wide at P / (C1 + C2).
std::vector<BandPlan> plan_bands(const ScenarioConfig& config, Strategy strategy,
                                 const std::vector<BaseStation>& layout, const std::vector<User>& users);

/// Scheduling input for one band of one frame. `bs` and `users` are layout
/// and user-list positions, `subchannels` global indices.
SchedulingProblem build_problem(const ScenarioConfig& config, const std::vector<BaseStation>& layout,
                                const std::vector<User>& users, const Matrix<double>& average_gain,
                                const ChannelRealization& realization, double subchannel_bandwidth,
                                double tx_power_per_subchannel);

}  // namespace cellpool
