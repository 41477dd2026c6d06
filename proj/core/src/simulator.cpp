#include "cellpool/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "cellpool/errors.hpp"
#include "cellpool/parallel.hpp"
#include "cellpool/random.hpp"
#include "cellpool/stats.hpp"

namespace cellpool {

namespace {

constexpr std::array kStrategies{Strategy::NoCoop, Strategy::FlexRoam, Strategy::Merger};

// Users of the same cell become neighbours in the band, so the scheduler
// reads each cell's gain rows contiguously.
void group_by_serving(BandPlan& band, const std::vector<User>& users) {
  std::stable_sort(band.users.begin(), band.users.end(), [&](int a, int b) {
    return users[static_cast<std::size_t>(a)].serving_bs < users[static_cast<std::size_t>(b)].serving_bs;
  });
}

int band_subchannels(const ScenarioConfig& config, int op) {
  return config.operators[static_cast<std::size_t>(op - 1)].bandwidth > 0.0 ? config.ofdma.subchannels_per_band : 0;
}

}  // namespace

std::vector<BandPlan> plan_bands(const ScenarioConfig& config, Strategy strategy,
                                 const std::vector<BaseStation>& layout, const std::vector<User>& users) {
  const int c1 = band_subchannels(config, 1);
  const int c2 = band_subchannels(config, 2);
  std::vector<BandPlan> bands;
  if (strategy == Strategy::Merger) {
    BandPlan band;
    for (std::size_t b = 0; b < layout.size(); ++b) band.bs.push_back(static_cast<int>(b));
    for (std::size_t m = 0; m < users.size(); ++m) band.users.push_back(static_cast<int>(m));
    for (int c = 0; c < c1 + c2; ++c) band.subchannels.push_back(c);
    group_by_serving(band, users);
    if (c1 + c2 > 0) {
      band.width = (config.operators[0].bandwidth + config.operators[1].bandwidth) / (c1 + c2);
      band.tx_per_subchannel = config.tx_power / (c1 + c2);
    }
    bands.push_back(std::move(band));
    return bands;
  }
  std::unordered_map<int, int> op_of;
  for (const BaseStation& b : layout) op_of[b.id] = b.op;
  for (int op = 1; op <= 2; ++op) {
    BandPlan band;
    const int count = op == 1 ? c1 : c2;
    const int first = op == 1 ? 0 : c1;
    for (std::size_t b = 0; b < layout.size(); ++b)
      if (layout[b].op == op) band.bs.push_back(static_cast<int>(b));
    for (std::size_t m = 0; m < users.size(); ++m)
      if (op_of.at(users[m].serving_bs) == op) band.users.push_back(static_cast<int>(m));
    for (int c = 0; c < count; ++c) band.subchannels.push_back(first + c);
    group_by_serving(band, users);
    if (count > 0) {
      band.width = config.operators[static_cast<std::size_t>(op - 1)].bandwidth / count;
      band.tx_per_subchannel = config.tx_power / count;
    }
    bands.push_back(std::move(band));
  }
  return bands;
}

namespace {

OperatorMeans means_of(const std::vector<UserThroughput>& users) {
  stats::CompensatedSum s1, s2, all;
  std::size_t n1 = 0, n2 = 0;
  for (const UserThroughput& u : users) {
    all.add(u.throughput_bps);
    if (u.op == 1) {
      s1.add(u.throughput_bps);
      ++n1;
    } else {
      s2.add(u.throughput_bps);
      ++n2;
    }
  }
  OperatorMeans m;
  if (n1) m.op1 = s1.value() / static_cast<double>(n1);
  if (n2) m.op2 = s2.value() / static_cast<double>(n2);
  if (!users.empty()) m.overall = all.value() / static_cast<double>(users.size());
  return m;
}

struct RunOutput {
  std::vector<UserThroughput> users;
  double seconds = 0.0;
};

// One run of each requested strategy on shared users, shadowing and fades.
std::vector<RunOutput> simulate_run(const ScenarioConfig& config, const std::vector<BaseStation>& layout, int run,
                                    const std::vector<Strategy>& strategies) {
  const std::uint64_t seed = run_seed(config.seed, run);
  const std::vector<User> placed = deploy_users(
      std::array{config.operators[0].users_per_cell, config.operators[1].users_per_cell}, layout, config.region, seed);
  const ChannelStatics statics = compute_statics(layout, placed, config.channel, seed);
  const Matrix<double> average = statics.average_gain();

  std::vector<RunOutput> out;
  for (Strategy strategy : strategies) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<User> users = associate(placed, layout, strategy, average);
    const std::vector<BandPlan> bands = plan_bands(config, strategy, layout, users);
    std::vector<double> sums(users.size(), 0.0);
    for (int frame = 0; frame < config.ofdma.frames; ++frame) {
      for (const BandPlan& band : bands) {
        if (band.subchannels.empty() || band.users.empty()) continue;
        const ChannelRealization realization = draw_channel(static_cast<std::uint64_t>(frame), layout, users, band.bs,
                                                            band.users, band.subchannels, seed);
        const SchedulingProblem problem =
            build_problem(config, layout, users, average, realization, band.width, band.tx_per_subchannel);
        const AllocationState state = allocate_frame(problem);
        std::vector<double> band_sums(band.users.size(), 0.0);
        accumulate_throughput(state, band_sums);
        for (std::size_t k = 0; k < band.users.size(); ++k)
          sums[static_cast<std::size_t>(band.users[k])] += band_sums[k];
      }
    }
    RunOutput result;
    for (std::size_t m = 0; m < users.size(); ++m)
      result.users.push_back(
          {run, users[m].id, users[m].op, users[m].serving_bs, sums[m] / static_cast<double>(config.ofdma.frames)});
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(result));
  }
  return out;
}

std::vector<ThroughputReport> simulate(const ScenarioConfig& config, const std::vector<Strategy>& strategies) {
  config.validate();
  const std::vector<BaseStation> layout = resolve_layout(config);
  const auto runs = static_cast<std::size_t>(config.ofdma.runs);
  std::vector<std::vector<RunOutput>> per_run(runs);
  parallel_for(runs, config.threads,
               [&](std::size_t r) { per_run[r] = simulate_run(config, layout, static_cast<int>(r), strategies); });

  std::vector<ThroughputReport> reports;
  const std::string hash = config_hash(config);
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    ThroughputReport rep;
    rep.strategy = strategies[s];
    rep.config_hash = hash;
    rep.layout_label = config.layout.stations.empty() ? "synthetic:" + std::string(to_string(config.layout.mode))
                                                      : "file:" + config.layout.file;
    for (std::size_t r = 0; r < runs; ++r) {
      const RunOutput& ro = per_run[r][s];
      rep.per_run.push_back(means_of(ro.users));
      rep.users.insert(rep.users.end(), ro.users.begin(), ro.users.end());
      rep.run_seeds.push_back(run_seed(config.seed, static_cast<int>(r)));
      rep.wall_time_s += ro.seconds;
    }
    rep.means = means_of(rep.users);
    reports.push_back(std::move(rep));
  }
  return reports;
}

double median_of(const ThroughputReport& report, int op) {
  std::vector<double> v;
  for (const UserThroughput& u : report.users)
    if (op == 0 || u.op == op) v.push_back(u.throughput_bps);
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return stats::order_statistic(v, 0.5);
}

}  // namespace

void ScenarioConfig::validate() const {
  std::vector<std::string> p;
  if (!(region.width > 0.0)) p.emplace_back("region.width must be positive");
  if (!(region.height > 0.0)) p.emplace_back("region.height must be positive");
  if (layout.stations.empty()) {
    if (layout.count1 < 0) p.emplace_back("layout.count1 must be non-negative");
    if (layout.count2 < 0) p.emplace_back("layout.count2 must be non-negative");
    if (layout.count1 + layout.count2 < 1) p.emplace_back("layout needs at least one base station");
  }
  for (const BaseStation& b : layout.stations)
    if (b.op != 1 && b.op != 2) {
      p.emplace_back("layout.stations: operator must be 1 or 2");
      break;
    }
  for (int i = 0; i < 2; ++i) {
    const std::string key = "operators[" + std::to_string(i + 1) + "].";
    if (!(operators[static_cast<std::size_t>(i)].bandwidth >= 0.0)) p.push_back(key + "bandwidth must be non-negative");
    if (!(operators[static_cast<std::size_t>(i)].users_per_cell > 0.0)) p.push_back(key + "users_per_cell must be positive");
  }
  if (!(tx_power > 0.0)) p.emplace_back("tx_power must be positive");
  if (!(noise_density >= 0.0)) p.emplace_back("noise_density must be non-negative");
  if (!(channel.shadowing_sigma_db >= 0.0)) p.emplace_back("channel.shadowing_sigma must be non-negative");
  if (!(channel.min_distance > 0.0)) p.emplace_back("channel.min_distance must be positive");
  if (channel.path_loss.kind == PathLossKind::PureExponent && !(channel.path_loss.exponent > 0.0))
    p.emplace_back("channel.path_loss.exponent must be positive");
  if (channel.path_loss.kind == PathLossKind::LogDistance && !(channel.path_loss.slope_db > 0.0))
    p.emplace_back("channel.path_loss.slope must be positive");
  if (ofdma.subchannels_per_band < 1) p.emplace_back("ofdma.subchannels must be at least 1");
  if (ofdma.slots < 1) p.emplace_back("ofdma.slots must be at least 1");
  if (ofdma.frames < 1) p.emplace_back("ofdma.frames must be at least 1");
  if (ofdma.runs < 1) p.emplace_back("ofdma.runs must be at least 1");
  if (!(epsilon > 0.0)) p.emplace_back("epsilon must be positive");
  if (!p.empty()) throw ValidationError(std::move(p));
}

std::string canonical_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "region=" << c.region.width << "x" << c.region.height << "\n";
  if (c.layout.stations.empty()) {
    os << "layout=synthetic," << c.layout.count1 << "," << c.layout.count2 << "," << to_string(c.layout.mode) << ","
       << c.layout.seed << "\n";
  } else {
    os << "layout=file," << c.layout.file << "\n";
    for (const BaseStation& b : c.layout.stations)
      os << "bs=" << b.id << "," << b.op << "," << b.position.x << "," << b.position.y << "\n";
  }
  for (int i = 0; i < 2; ++i)
    os << "op" << i + 1 << "=" << c.operators[static_cast<std::size_t>(i)].bandwidth << ","
       << c.operators[static_cast<std::size_t>(i)].users_per_cell << "\n";
  os << "tx_power=" << c.tx_power << "\nnoise_density=" << c.noise_density << "\n";
  os << "path_loss=" << to_string(c.channel.path_loss.kind) << "," << c.channel.path_loss.exponent << ","
     << c.channel.path_loss.intercept_db << "," << c.channel.path_loss.slope_db << "\n";
  os << "shadowing=" << c.channel.shadowing_sigma_db << "\nmin_distance=" << c.channel.min_distance << "\n";
  os << "ofdma=" << c.ofdma.subchannels_per_band << "," << c.ofdma.slots << "," << c.ofdma.frames << ","
     << c.ofdma.runs << "\n";
  os << "strategy=" << to_string(c.strategy) << "\nseed=" << c.seed << "\nepsilon=" << c.epsilon
     << "\ninterference_power_literal=" << c.interference_power_literal << "\n";
  return os.str();
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char ch : canonical_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t run_seed(std::uint64_t scenario_seed, int run) {
  return stream_id({scenario_seed, 0x52554Eull, static_cast<std::uint64_t>(run)});
}

std::vector<BaseStation> resolve_layout(const ScenarioConfig& config) {
  std::vector<BaseStation> layout =
      config.layout.stations.empty()
          ? synthesize_layout(config.layout.count1, config.layout.count2, config.region, config.layout.seed,
                              config.layout.mode)
          : config.layout.stations;
  const int c1 = band_subchannels(config, 1);
  for (BaseStation& b : layout) b.band = b.op == 1 ? SubchannelRange{0, c1} : SubchannelRange{c1, band_subchannels(config, 2)};
  return layout;
}

SchedulingProblem build_problem(const ScenarioConfig& config, const std::vector<BaseStation>& layout,
                                const std::vector<User>& users, const Matrix<double>& average_gain,
                                const ChannelRealization& realization, double subchannel_bandwidth,
                                double tx_power_per_subchannel) {
  SchedulingProblem p;
  p.n_bs = realization.bs.size();
  p.n_users = realization.users.size();
  p.n_subchannels = realization.subchannels.size();
  p.n_slots = static_cast<std::size_t>(config.ofdma.slots);
  std::unordered_map<int, std::size_t> local_bs;
  for (std::size_t b = 0; b < p.n_bs; ++b) {
    const BaseStation& bs = layout[static_cast<std::size_t>(realization.bs[b])];
    p.bs_ids.push_back(bs.id);
    local_bs[bs.id] = b;
  }
  for (int m : realization.users) {
    const User& u = users[static_cast<std::size_t>(m)];
    p.user_ids.push_back(u.id);
    const auto it = local_bs.find(u.serving_bs);
    if (it == local_bs.end()) throw DomainError("build_problem: a user's serving BS is outside the band");
    p.serving.push_back(it->second);
  }
  p.gain.resize(realization.fade.size());
  for (std::size_t c = 0; c < p.n_subchannels; ++c)
    for (std::size_t m = 0; m < p.n_users; ++m) {
      const auto um = static_cast<std::size_t>(realization.users[m]);
      const std::size_t row = (c * p.n_users + m) * p.n_bs;
      for (std::size_t b = 0; b < p.n_bs; ++b)
        p.gain[row + b] = realization.fade[row + b] * average_gain(static_cast<std::size_t>(realization.bs[b]), um);
    }
  p.tx_power = tx_power_per_subchannel;
  p.subchannel_bandwidth = subchannel_bandwidth;
  p.noise_power = config.noise_density * subchannel_bandwidth;
  p.interference_power_literal = config.interference_power_literal;
  p.epsilon = config.epsilon;
  return p;
}

ThroughputReport run_scenario(const ScenarioConfig& config) {
  return std::move(simulate(config, {config.strategy}).front());
}

StrategyComparison compare_strategies(const ScenarioConfig& config) {
  auto reports = simulate(config, {kStrategies.begin(), kStrategies.end()});
  StrategyComparison out;
  for (std::size_t s = 0; s < 3; ++s) out.reports[s] = std::move(reports[s]);
  const ThroughputReport& base = out.reports[0];
  auto pick = [](const OperatorMeans& m, int op) { return op == 0 ? m.overall : op == 1 ? m.op1 : m.op2; };
  for (std::size_t s = 0; s < 3; ++s) {
    for (int op = 0; op <= 2; ++op) {
      ComparisonRow row;
      row.strategy = kStrategies[s];
      row.op = op;
      row.mean_bps = pick(out.reports[s].means, op);
      const double base_mean = pick(base.means, op);
      row.gain_vs_nocoop = base_mean > 0.0 ? row.mean_bps / base_mean - 1.0 : 0.0;
      row.median_bps = median_of(out.reports[s], op);
      const double base_median = median_of(base, op);
      row.median_gain_vs_nocoop = base_median > 0.0 ? row.median_bps / base_median - 1.0 : 0.0;
      out.rows.push_back(row);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> emit_cdf(const ThroughputReport& report, std::size_t n_points) {
  if (report.users.empty()) throw DomainError("emit_cdf: empty report");
  if (n_points < 1) throw DomainError("emit_cdf: n_points must be at least 1");
  std::vector<double> v;
  v.reserve(report.users.size());
  for (const UserThroughput& u : report.users) v.push_back(u.throughput_bps);
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  const auto n = static_cast<double>(v.size());
  for (std::size_t k = 1; k <= n_points; ++k) {
    const double x = stats::order_statistic(v, static_cast<double>(k) / static_cast<double>(n_points));
    const auto below = std::upper_bound(v.begin(), v.end(), x) - v.begin();
    out.emplace_back(x, static_cast<double>(below) / n);
  }
  return out;
}

}  // namespace cellpool
