#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "cellpool/analytic.hpp"
#include "cellpool/errors.hpp"
#include "cellpool/mc_oracle.hpp"
#include "cellpool/stats.hpp"

using namespace cellpool;
using std::numbers::pi;

namespace {

constexpr double kLambda = 4e-8;
const OperatorParams kOp{kLambda, 10e6, 100 * kLambda};

double poisson_pmf(int k, double mean) { return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0)); }

}  // namespace

TEST(Ppp, EmptyAndBounded) {
  EXPECT_TRUE(mc::sample_ppp(0.0, 1000.0, 1).points.empty());
  const auto s = mc::sample_ppp(kLambda, 50e3, 3);
  for (const auto& p : s.points) EXPECT_LE(std::hypot(p.x, p.y), 50e3);
  EXPECT_EQ(mc::sample_ppp(kLambda, 50e3, 3).points.size(), s.points.size());
  EXPECT_THROW(mc::sample_ppp(-1.0, 10.0, 1), DomainError);
}

TEST(Ppp, CountIsPoissonWithMeanLambdaArea) {
  const double mean = kLambda * pi * 50e3 * 50e3;  // 314.16
  const int n = 10000;
  std::map<int, int> hist;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = static_cast<int>(mc::sample_ppp(kLambda, 50e3, 1000 + i).points.size());
    ++hist[k];
    total += k;
  }
  EXPECT_NEAR(total / n, mean, 4.0 * std::sqrt(mean / n));

  // Chi-square over bins of at least ~50 expected counts.
  double chi = 0.0;
  int dof = -1;
  int lo = 0;
  while (lo < 700) {
    double expect = 0.0;
    int hi = lo;
    while (hi < 700 && (expect < 50.0 || (lo < mean && hi < mean))) expect += n * poisson_pmf(hi++, mean);
    if (hi >= 700) break;
    int observed = 0;
    for (int k = lo; k < hi; ++k) observed += hist.count(k) ? hist[k] : 0;
    chi += (observed - expect) * (observed - expect) / expect;
    ++dof;
    lo = hi;
    if (expect < 50.0) break;
  }
  ASSERT_GT(dof, 5);
  EXPECT_GT(stats::chi_square_pvalue(chi, dof), 0.01);
}

TEST(Ppp, PointsUniformOnDisk) {
  // Radius^2 / R^2 is uniform on (0, 1).
  std::vector<double> u;
  for (int i = 0; i < 50; ++i)
    for (const auto& p : mc::sample_ppp(kLambda, 50e3, 77 + i).points) u.push_back((p.x * p.x + p.y * p.y) / 2.5e9);
  std::sort(u.begin(), u.end());
  EXPECT_GT(stats::ks_pvalue(stats::ks_statistic(u, [](double x) { return x; }), u.size()), 0.01);
}

TEST(Oracle, NoCoopAgreesWithQuadrature) {
  const auto mc = mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), 200000, 1);
  const double q = rate_nocoop(kOp.bandwidth, kOp.bs_density, default_radio()).spectral_rate_nats;
  EXPECT_TRUE(mc.contains(q)) << mc.mean << " +- " << mc.half_width_99 << " vs " << q;
  EXPECT_EQ(mc.n_samples, 200000);
}

TEST(Oracle, FlexRoamAgreesWithQuadratureAsymmetric) {
  const OperatorParams op2{2 * kLambda, 5e6, 0};
  const auto mc = mc::estimate_rate(Strategy::FlexRoam, kOp, op2, default_radio(), 200000, 2);
  const double q = rate_flexroam(kOp, op2, default_radio()).spectral_rate_nats;
  EXPECT_TRUE(mc.contains(q)) << mc.mean << " +- " << mc.half_width_99 << " vs " << q;
}

TEST(Oracle, NoiseFreeAlpha4) {
  const RadioParams radio{1.0, 0.0, 4.0};
  const auto mc = mc::estimate_rate(Strategy::NoCoop, kOp, kOp, radio, 200000, 3);
  const double q = rate_nocoop(kOp.bandwidth, kOp.bs_density, radio).spectral_rate_nats;
  EXPECT_TRUE(mc.contains(q)) << mc.mean << " +- " << mc.half_width_99 << " vs " << q;
}

TEST(Oracle, MergerUsesNoCoopStreamsOnSums) {
  const OperatorParams op2{0.5 * kLambda, 5e6, 0};
  const auto m = mc::estimate_rate(Strategy::Merger, kOp, op2, default_radio(), 20000, 4);
  const OperatorParams sum{1.5 * kLambda, 15e6, 0};
  const auto n = mc::estimate_rate(Strategy::NoCoop, sum, sum, default_radio(), 20000, 4);
  EXPECT_EQ(m.mean, n.mean);
  EXPECT_EQ(m.half_width_99, n.half_width_99);
}

TEST(Oracle, FlexRoamWithAbsentOperatorIsNoCoop) {
  const OperatorParams none{0.0, 10e6, 0};
  const auto f = mc::estimate_rate(Strategy::FlexRoam, kOp, none, default_radio(), 20000, 5);
  const auto n = mc::estimate_rate(Strategy::NoCoop, kOp, none, default_radio(), 20000, 5);
  EXPECT_EQ(f.mean, n.mean);
}

TEST(Oracle, Deterministic) {
  mc::RateOptions one;
  one.threads = 1;
  mc::RateOptions many;
  many.threads = 3;
  const auto a = mc::estimate_rate(Strategy::FlexRoam, kOp, kOp, default_radio(), 30000, 9, one);
  const auto b = mc::estimate_rate(Strategy::FlexRoam, kOp, kOp, default_radio(), 30000, 9, many);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.half_width_99, b.half_width_99);
  EXPECT_NE(a.mean, mc::estimate_rate(Strategy::FlexRoam, kOp, kOp, default_radio(), 30000, 10, one).mean);
}

TEST(Oracle, TruncationBiasIsNegligible) {
  // Same streams, horizon 4x farther: the paired difference bounds the bias.
  mc::RateOptions near, far;
  far.near_field_ratio = 48.0;
  const auto a = mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), 20000, 6, near);
  const auto b = mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), 20000, 6, far);
  EXPECT_LT(std::abs(a.mean - b.mean), 1e-3 * b.mean);
}

TEST(Oracle, HalfWidthShrinksAsRootN) {
  const auto a = mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), 10000, 7);
  const auto b = mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), 40000, 7);
  EXPECT_NEAR(b.half_width_99 / a.half_width_99, 0.5, 0.1);
}

TEST(Oracle, SampleBudgetError) {
  mc::RateOptions opt;
  opt.target_half_width = 1e-6;
  EXPECT_THROW(mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), 1000, 1, opt), SampleBudgetError);
  RadioParams bad = default_radio();
  bad.path_loss_exponent = 2.0;
  EXPECT_THROW(mc::estimate_rate(Strategy::NoCoop, kOp, kOp, bad, 1000, 1), DomainError);
}

TEST(Oracle, TailInterferenceMean) {
  EXPECT_EQ(mc::tail_interference_mean(0.0, 100.0, 4.0), 0.0);
  // 2 pi lambda R^{-2} / 2 at alpha = 4.
  EXPECT_DOUBLE_EQ(mc::tail_interference_mean(1e-6, 1000.0, 4.0), pi * 1e-6 / 1e6);
}

TEST(Association, MatchesDensityShare) {
  for (double ratio : {1.0, 2.0}) {
    const auto est = mc::empirical_association_prob(kLambda, ratio * kLambda, 20000, 11);
    const double p = 1.0 / (1.0 + ratio);
    EXPECT_NEAR(est.mean, p, 3.0 * std::sqrt(p * (1 - p) / 20000)) << ratio;
  }
  EXPECT_EQ(mc::empirical_association_prob(kLambda, 0.0, 2000, 1).mean, 1.0);
}

TEST(NearestDistance, RayleighLawKs) {
  // P(R <= r) = 1 - exp(-pi (l1 + l2) r^2)
  for (double l2 : {kLambda, 0.0}) {
    const auto d = mc::empirical_nearest_distance_cdf(kLambda, l2, 100000, 12);
    const double lt = kLambda + l2;
    const double ks = stats::ks_statistic(d, [&](double r) { return 1.0 - std::exp(-pi * lt * r * r); });
    EXPECT_GT(stats::ks_pvalue(ks, d.size()), 0.01) << l2;
    const double median = stats::order_statistic(d, 0.5);
    EXPECT_NEAR(median, std::sqrt(std::log(2.0) / (pi * lt)), 0.02 * median);
  }
}
