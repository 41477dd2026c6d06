#include "cellpool/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cellpool/errors.hpp"
#include "cellpool/parallel.hpp"
#include "cellpool/random.hpp"
#include "cellpool/stats.hpp"

namespace cellpool::mc {

namespace {

using std::numbers::pi;

constexpr std::int64_t kBlock = 4096;

// Nearest-first generation of a PPP's distances from the origin: the values
// pi * lambda * r_k^2 are the arrival times of a unit-rate Poisson process.
// Work is done in arrival-time units to avoid a sqrt per point.
class RadialPpp {
 public:
  RadialPpp(double density, Philox4x32 gen) : density_(density), gen_(gen) {}

  /// Arrival time pi * lambda * r^2 of the next-nearest point, +inf if empty.
  double next_arrival() {
    if (density_ <= 0.0) return std::numeric_limits<double>::infinity();
    arrival_ += exponential(gen_);
    return arrival_;
  }
  double distance(double arrival) const { return std::sqrt(arrival / (pi * density_)); }
  double fade() { return exponential(gen_); }
  double density() const { return density_; }

 private:
  double density_;
  Philox4x32 gen_;
  double arrival_ = 0.0;
};

struct BlockSums {
  stats::CompensatedSum sum;
  stats::CompensatedSum sum_sq;
};

template <class SampleFn>
McEstimate run_blocks(std::int64_t n_samples, unsigned threads, SampleFn&& sample) {
  if (n_samples < 1) throw DomainError("n_samples must be at least 1");
  const auto n_blocks = static_cast<std::size_t>((n_samples + kBlock - 1) / kBlock);
  std::vector<BlockSums> blocks(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t end = std::min(n_samples, begin + kBlock);
    for (std::int64_t i = begin; i < end; ++i) {
      const double x = sample(static_cast<std::uint64_t>(i));
      blocks[b].sum.add(x);
      blocks[b].sum_sq.add(x * x);
    }
  });
  stats::CompensatedSum sum, sum_sq;
  for (const auto& b : blocks) {
    sum.merge(b.sum);
    sum_sq.merge(b.sum_sq);
  }
  const double n = static_cast<double>(n_samples);
  McEstimate est;
  est.n_samples = n_samples;
  est.mean = sum.value() / n;
  if (n_samples >= 2) {
    const double var = std::max(0.0, (sum_sq.value() - n * est.mean * est.mean) / (n - 1.0));
    est.half_width_99 = stats::kZ99 * std::sqrt(var / n);
  }
  return est;
}

struct LinkSetup {
  double bandwidth;
  double density;
  std::uint64_t stream_tag;
};

// ln(1 + SINR) for one typical-user sample. `serving` is the process the
// serving BS belongs to, already advanced past the serving point (arrival
// time a0); the remaining points of that process interfere.
double log1p_sinr(RadialPpp& serving, double a0, double bandwidth, const RadioParams& radio,
                  double near_field_ratio, Philox4x32& fade_gen) {
  const double alpha = radio.path_loss_exponent;
  const double half_alpha = alpha / 2.0;
  const double h = exponential(fade_gen);
  // Path gain r^{-alpha} = (arrival / (pi lambda))^{-alpha/2}; accumulate in
  // arrival units and rescale once. The horizon never shrinks below
  // near_field_ratio typical spacings, so a lucky close serving BS does not
  // push the real nearest interferers into the mean-field tail.
  const double horizon_arrival = near_field_ratio * near_field_ratio * std::max(a0, 1.0);
  double shot = 0.0;
  for (double a = serving.next_arrival(); a <= horizon_arrival; a = serving.next_arrival())
    shot += serving.fade() * std::pow(a, -half_alpha);
  const double scale = std::pow(pi * serving.density(), half_alpha);
  const double interference =
      shot * scale + tail_interference_mean(serving.density(), serving.distance(horizon_arrival), alpha);
  const double noise = radio.noise_density * bandwidth / radio.tx_power;
  const double signal = h * std::pow(a0, -half_alpha) * scale;
  return std::log1p(signal / (noise + interference));
}

McEstimate estimate_single_operator(const LinkSetup& link, const RadioParams& radio, std::int64_t n_samples,
                                    std::uint64_t seed, const RateOptions& options) {
  if (!(link.density > 0.0) || !(link.bandwidth >= 0.0))
    throw DomainError("estimate_rate: serving operator needs positive density");
  return run_blocks(n_samples, options.threads, [&](std::uint64_t i) {
    RadialPpp field(link.density, Philox4x32(seed, stream_id({i, link.stream_tag})));
    Philox4x32 fade_gen(seed, stream_id({i, 0}));
    const double a0 = field.next_arrival();
    return log1p_sinr(field, a0, link.bandwidth, radio, options.near_field_ratio, fade_gen);
  });
}

}  // namespace

double tail_interference_mean(double density, double radius, double alpha) {
  if (density <= 0.0) return 0.0;
  return 2.0 * pi * density * std::pow(radius, 2.0 - alpha) / (alpha - 2.0);
}

PppSample sample_ppp(double density, double region_radius, std::uint64_t seed) {
  if (!(density >= 0.0) || !(region_radius > 0.0)) throw DomainError("sample_ppp: invalid density or radius");
  PppSample out;
  out.density = density;
  out.region_radius = region_radius;
  if (density == 0.0) return out;
  Philox4x32 gen(seed, stream_id({0x5050u}));
  std::poisson_distribution<long long> count(density * pi * region_radius * region_radius);
  const long long n = count(gen);
  out.points.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    const double r = region_radius * std::sqrt(uniform_open(gen));
    const double theta = 2.0 * pi * uniform_open(gen);
    out.points.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return out;
}

McEstimate estimate_rate(Strategy strategy, const OperatorParams& op1, const OperatorParams& op2,
                         const RadioParams& radio, std::int64_t n_samples, std::uint64_t seed,
                         const RateOptions& options) {
  if (!(radio.path_loss_exponent > 2.0)) throw DomainError("path-loss exponent must exceed 2");
  if (!(options.near_field_ratio > 1.0)) throw DomainError("near_field_ratio must exceed 1");

  McEstimate est;
  switch (strategy) {
    case Strategy::NoCoop: {
      if (options.for_operator != 1 && options.for_operator != 2)
        throw DomainError("operator index must be 1 or 2");
      const OperatorParams& own = options.for_operator == 1 ? op1 : op2;
      est = estimate_single_operator({own.bandwidth, own.bs_density, static_cast<std::uint64_t>(options.for_operator)},
                                     radio, n_samples, seed, options);
      break;
    }
    case Strategy::Merger:
      est = estimate_single_operator(
          {op1.bandwidth + op2.bandwidth, op1.bs_density + op2.bs_density, 1}, radio, n_samples, seed, options);
      break;
    case Strategy::FlexRoam: {
      if (!(op1.bs_density >= 0.0) || !(op2.bs_density >= 0.0) || !(op1.bs_density + op2.bs_density > 0.0))
        throw DomainError("estimate_rate: densities must be non-negative with a positive sum");
      est = run_blocks(n_samples, options.threads, [&](std::uint64_t i) {
        RadialPpp field1(op1.bs_density, Philox4x32(seed, stream_id({i, 1})));
        RadialPpp field2(op2.bs_density, Philox4x32(seed, stream_id({i, 2})));
        Philox4x32 fade_gen(seed, stream_id({i, 0}));
        const double a1 = field1.next_arrival();
        const double a2 = field2.next_arrival();
        // Nearest overall wins; only the winner's band carries interference.
        if (field1.distance(a1) <= field2.distance(a2))
          return log1p_sinr(field1, a1, op1.bandwidth, radio, options.near_field_ratio, fade_gen);
        return log1p_sinr(field2, a2, op2.bandwidth, radio, options.near_field_ratio, fade_gen);
      });
      break;
    }
  }
  if (options.target_half_width && est.half_width_99 > *options.target_half_width)
    throw SampleBudgetError("Monte Carlo half-width exceeds target; increase the sample budget");
  return est;
}

namespace {

// Nearest point of each operator's PPP, simulated on a disk large enough
// that the union is empty with probability e^{-30}. An operator with no
// point inside the disk reports +inf (it is farther than the disk edge).
std::pair<double, double> nearest_pair(double lambda1, double lambda2, std::uint64_t seed, std::uint64_t i) {
  const double radius = std::sqrt(30.0 / (pi * (lambda1 + lambda2)));
  auto nearest = [&](double lambda, std::uint64_t tag) {
    double best = std::numeric_limits<double>::infinity();
    if (lambda <= 0.0) return best;
    for (const Point& p : sample_ppp(lambda, radius, stream_id({seed, i, tag})).points)
      best = std::min(best, std::hypot(p.x, p.y));
    return best;
  };
  return {nearest(lambda1, 1), nearest(lambda2, 2)};
}

void check_pair(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 >= 0.0)) throw DomainError("densities must be positive");
}

}  // namespace

McEstimate empirical_association_prob(double lambda1, double lambda2, std::int64_t n_samples,
                                      std::uint64_t seed) {
  check_pair(lambda1, lambda2);
  McEstimate est = run_blocks(n_samples, 0, [&](std::uint64_t i) {
    const auto [d1, d2] = nearest_pair(lambda1, lambda2, seed, i);
    return d1 < d2 ? 1.0 : 0.0;
  });
  // Binomial interval; stays positive when every sample agrees.
  const double p = est.mean;
  const double n = static_cast<double>(n_samples);
  est.half_width_99 = stats::kZ99 * std::sqrt(std::max(p * (1.0 - p), 0.25 / n) / n);
  return est;
}

std::vector<double> empirical_nearest_distance_cdf(double lambda1, double lambda2, std::int64_t n_samples,
                                                   std::uint64_t seed) {
  check_pair(lambda1, lambda2);
  if (n_samples < 1) throw DomainError("n_samples must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(n_samples));
  parallel_for(out.size(), 0, [&](std::size_t i) {
    const auto [d1, d2] = nearest_pair(lambda1, lambda2, seed, i);
    out[i] = std::min(d1, d2);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cellpool::mc
