#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numeric>

#include "cellpool/errors.hpp"
#include "cellpool/simulator.hpp"

using namespace cellpool;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.region = {8000.0, 8000.0};
  c.layout.count1 = 5;
  c.layout.count2 = 4;
  c.layout.mode = LayoutMode::Uniform;
  c.layout.seed = 3;
  c.operators[0].users_per_cell = 6;
  c.operators[1].users_per_cell = 6;
  c.channel.path_loss = PathLossModel::urban_macro();
  c.ofdma = {8, 10, 2, 2};
  c.threads = 1;
  return c;
}

std::vector<double> throughputs(const ThroughputReport& r) {
  std::vector<double> v;
  for (const auto& u : r.users) v.push_back(u.throughput_bps);
  return v;
}

}  // namespace

TEST(Simulator, SingleLinkMatchesShannonOverRayleigh) {
  // One BS, one user: every tile goes to the user, so the throughput is
  // W E[log2(1 + snr h)] with h ~ Exp(1), i.e. W e^{1/s} E1(1/s) / ln 2.
  ScenarioConfig c;
  c.region = {2000.0, 2000.0};
  c.layout.stations = {{0, 1, {1000.0, 1000.0}, {}}};
  c.layout.file = "inline";
  c.operators[0].users_per_cell = 1;
  c.operators[1].bandwidth = 0.0;
  c.channel.path_loss = PathLossModel::urban_macro();
  c.ofdma = {32, 2, 300, 1};
  c.threads = 1;
  const ThroughputReport rep = run_scenario(c);
  ASSERT_EQ(rep.users.size(), 1u);

  const std::uint64_t seed = run_seed(c.seed, 0);
  const auto layout = resolve_layout(c);
  const auto users = deploy_users(std::array{1.0, 1.0}, layout, c.region, seed);
  const double g = compute_statics(layout, users, c.channel, seed).average_gain()(0, 0);
  const double wc = 10e6 / 32, snr = (c.tx_power / 32) * g / (c.noise_density * wc);

  // Exact replay of the fades the simulator drew.
  double replay = 0.0;
  for (int f = 0; f < 300; ++f)
    for (int sc = 0; sc < 32; ++sc) replay += wc * std::log2(1.0 + snr * fast_fade(seed, f, 0, 0, sc));
  replay /= 300;
  EXPECT_NEAR(rep.users[0].throughput_bps, replay, 1e-9 * replay);

  const double expected = 10e6 * std::exp(1.0 / snr) * boost::math::expint(1, 1.0 / snr) / std::log(2.0);
  EXPECT_NEAR(rep.users[0].throughput_bps, expected, 0.03 * expected);
}

TEST(Simulator, Deterministic) {
  const ScenarioConfig c = small_config();
  const ThroughputReport a = run_scenario(c), b = run_scenario(c);
  EXPECT_EQ(throughputs(a), throughputs(b));
  EXPECT_EQ(a.config_hash, b.config_hash);
  EXPECT_EQ(a.run_seeds, b.run_seeds);
  ScenarioConfig threaded = c;
  threaded.threads = 2;
  EXPECT_EQ(throughputs(run_scenario(threaded)), throughputs(a));
}

TEST(Simulator, ComparisonUsesCommonRandomNumbers) {
  ScenarioConfig c = small_config();
  const StrategyComparison cmp = compare_strategies(c);
  for (Strategy s : {Strategy::NoCoop, Strategy::FlexRoam, Strategy::Merger}) {
    c.strategy = s;
    EXPECT_EQ(throughputs(run_scenario(c)), throughputs(cmp.reports[static_cast<int>(s)])) << to_string(s);
  }
  ASSERT_EQ(cmp.rows.size(), 9u);
  EXPECT_EQ(cmp.rows[0].gain_vs_nocoop, 0.0);
}

TEST(Simulator, StrategyOrderingOnSmallScenario) {
  ScenarioConfig c = small_config();
  c.ofdma.runs = 3;
  const StrategyComparison cmp = compare_strategies(c);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_LT(cmp.reports[0].per_run[r].overall, cmp.reports[1].per_run[r].overall) << r;
    EXPECT_LT(cmp.reports[1].per_run[r].overall, cmp.reports[2].per_run[r].overall) << r;
  }
}

TEST(Simulator, SingleOperatorDegeneracy) {
  ScenarioConfig c = small_config();
  c.layout.count2 = 0;
  c.operators[1].bandwidth = 0.0;
  const StrategyComparison cmp = compare_strategies(c);
  const auto base = throughputs(cmp.reports[0]);
  EXPECT_EQ(throughputs(cmp.reports[1]), base);
  EXPECT_EQ(throughputs(cmp.reports[2]), base);
}

TEST(Simulator, MeansAreArithmeticMeans) {
  const ThroughputReport r = run_scenario(small_config());
  double all = 0, one = 0;
  int n1 = 0;
  for (const auto& u : r.users) {
    all += u.throughput_bps;
    if (u.op == 1) {
      one += u.throughput_bps;
      ++n1;
    }
  }
  EXPECT_NEAR(r.means.overall, all / r.users.size(), 1e-9 * r.means.overall);
  EXPECT_NEAR(r.means.op1, one / n1, 1e-9 * r.means.op1);
  EXPECT_EQ(r.per_run.size(), 2u);
}

TEST(BandPlan, SeparateStrategiesStayInOwnSpectrum) {
  ScenarioConfig c = small_config();
  const auto layout = resolve_layout(c);
  const auto placed = deploy_users(6.0, layout, c.region, 1);
  Matrix<double> power(layout.size(), placed.size());
  for (std::size_t b = 0; b < layout.size(); ++b)
    for (std::size_t m = 0; m < placed.size(); ++m)
      power(b, m) = 1.0 / (1.0 + distance(layout[b].position, placed[m].position));
  for (Strategy s : {Strategy::NoCoop, Strategy::FlexRoam}) {
    const auto users = associate(placed, layout, s, power);
    const auto bands = plan_bands(c, s, layout, users);
    ASSERT_EQ(bands.size(), 2u);
    std::size_t covered = 0;
    for (int op = 1; op <= 2; ++op) {
      const BandPlan& band = bands[op - 1];
      for (int b : band.bs) EXPECT_EQ(layout[b].op, op);
      for (int m : band.users) EXPECT_EQ(layout[users[m].serving_bs].op, op);
      for (int sc : band.subchannels) EXPECT_TRUE(layout[band.bs.front()].band.contains(sc));
      EXPECT_DOUBLE_EQ(band.width, 10e6 / 8);
      EXPECT_DOUBLE_EQ(band.tx_per_subchannel, c.tx_power / 8);
      covered += band.users.size();
    }
    EXPECT_EQ(covered, users.size());
  }
}

TEST(BandPlan, MergerPoolsEverythingWithUniformWidth) {
  ScenarioConfig c = small_config();
  c.operators[1].bandwidth = 5e6;
  const auto layout = resolve_layout(c);
  const auto users = associate(deploy_users(6.0, layout, c.region, 1), layout, Strategy::Merger,
                               Matrix<double>(layout.size(), 54, 1.0));
  const auto bands = plan_bands(c, Strategy::Merger, layout, users);
  ASSERT_EQ(bands.size(), 1u);
  EXPECT_EQ(bands[0].bs.size(), layout.size());
  EXPECT_EQ(bands[0].users.size(), users.size());
  EXPECT_EQ(bands[0].subchannels.size(), 16u);
  EXPECT_DOUBLE_EQ(bands[0].width, 15e6 / 16);
  EXPECT_DOUBLE_EQ(bands[0].tx_per_subchannel, c.tx_power / 16);
}

TEST(Simulator, TilesAreConservedPerFrame) {
  ScenarioConfig c = small_config();
  const auto layout = resolve_layout(c);
  const auto placed = deploy_users(6.0, layout, c.region, 5);
  const ChannelStatics st = compute_statics(layout, placed, c.channel, 5);
  const auto avg = st.average_gain();
  const auto users = associate(placed, layout, Strategy::Merger, avg);
  const auto band = plan_bands(c, Strategy::Merger, layout, users).front();
  const auto real = draw_channel(0, layout, users, band.bs, band.users, band.subchannels, 5);
  const SchedulingProblem p = build_problem(c, layout, users, avg, real, band.width, band.tx_per_subchannel);
  const AllocationState s = allocate_frame(p);
  std::size_t x = 0, y = 0;
  for (std::size_t t = 0; t < p.n_slots; ++t)
    for (std::size_t sc = 0; sc < p.n_subchannels; ++sc) {
      for (std::size_t m = 0; m < p.n_users; ++m) x += s.assigned(m, sc, t);
      for (std::size_t b = 0; b < p.n_bs; ++b) y += s.active(b, sc, t);
    }
  EXPECT_EQ(x, y);
  EXPECT_GT(x, 0u);
}

TEST(Cdf, Properties) {
  const ThroughputReport r = run_scenario(small_config());
  const auto cdf = emit_cdf(r, 50);
  ASSERT_EQ(cdf.size(), 50u);
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    EXPECT_LE(cdf[i - 1].first, cdf[i].first);
    EXPECT_LE(cdf[i - 1].second, cdf[i].second);
  }
  double mx = 0;
  for (const auto& u : r.users) mx = std::max(mx, u.throughput_bps);
  EXPECT_EQ(cdf.back().first, mx);
  EXPECT_EQ(cdf.back().second, 1.0);
  // Quantile round trip: the k-th abscissa covers at least k/n of users.
  for (std::size_t k = 0; k < cdf.size(); ++k) EXPECT_GE(cdf[k].second + 1e-12, double(k + 1) / 50.0);
}

TEST(Cdf, SingleUserIsAStep) {
  ThroughputReport r;
  r.users = {{0, 0, 1, 0, 1234.0}};
  const auto cdf = emit_cdf(r, 3);
  for (const auto& [x, f] : cdf) {
    EXPECT_EQ(x, 1234.0);
    EXPECT_EQ(f, 1.0);
  }
  EXPECT_THROW(emit_cdf(ThroughputReport{}, 3), DomainError);
}

TEST(Config, ValidateListsEveryProblem) {
  ScenarioConfig c;
  c.region.width = -1;
  c.operators[0].bandwidth = -5;
  c.ofdma.frames = 0;
  c.epsilon = 0;
  try {
    c.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.problems().size(), 4u);
    EXPECT_NE(std::string(e.what()).find("operators[1].bandwidth"), std::string::npos);
  }
}

TEST(Config, HashTracksContent) {
  ScenarioConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, RunSeedsDiffer) {
  EXPECT_NE(run_seed(1, 0), run_seed(1, 1));
  EXPECT_NE(run_seed(1, 0), run_seed(2, 0));
}
