#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cellpool/analytic.hpp"

// Monte Carlo counterpart of the analytic module: simulates the Poisson
// fields, fading, and association directly around a typical user at the
// origin. Kept independent of the quadrature code on purpose; nothing in
// here calls into analytic.cpp.
namespace cellpool::mc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct PppSample {
  std::vector<Point> points;
  double region_radius = 0.0;  ///< m
  double density = 0.0;        ///< per m^2
};

struct McEstimate {
  double mean = 0.0;
  double half_width_99 = 0.0;
  std::int64_t n_samples = 0;

  bool contains(double value) const { return value >= mean - half_width_99 && value <= mean + half_width_99; }
};

/// Homogeneous PPP on a disk: Poisson count, then i.i.d. uniform points.
PppSample sample_ppp(double density, double region_radius, std::uint64_t seed);

struct RateOptions {
  /// Typical user's subscription for NoCoop (1 or 2). Ignored otherwise.
  int for_operator = 1;
  /// Interferers are drawn explicitly out to
  ///   R = near_field_ratio * max(r_serving, 1 / sqrt(pi lambda));
  /// the shot noise beyond R enters through its closed-form mean
  /// 2 pi lambda R^{2-alpha} / (alpha - 2). At 12 the residual bias on the
  /// rate is below 1e-5 nats for alpha = 3.76.
  double near_field_ratio = 12.0;
  /// When set, fail with SampleBudgetError if the 99% half-width is larger.
  std::optional<double> target_half_width;
  unsigned threads = 0;
};

/// E[ln(1 + SINR)] in nats/s/Hz, mean with 99% confidence half-width.
/// Merger is evaluated as NoCoop on the summed bandwidth and density with
/// the same random streams.
McEstimate estimate_rate(Strategy strategy, const OperatorParams& op1, const OperatorParams& op2,
                         const RadioParams& radio, std::int64_t n_samples, std::uint64_t seed,
                         const RateOptions& options = {});

/// Fraction of samples whose nearest OP1 BS is closer than the nearest OP2 BS.
McEstimate empirical_association_prob(double lambda1, double lambda2, std::int64_t n_samples,
                                      std::uint64_t seed);

/// Sorted nearest-BS distances (union of both operators), one per sample.
std::vector<double> empirical_nearest_distance_cdf(double lambda1, double lambda2, std::int64_t n_samples,
                                                   std::uint64_t seed);

/// Expected shot-noise power (per unit tx power, unit-mean fading) from a
/// PPP of `density` beyond `radius`.
double tail_interference_mean(double density, double radius, double alpha);

}  // namespace cellpool::mc
