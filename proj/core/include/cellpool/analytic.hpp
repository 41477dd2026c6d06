#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cellpool {

/// One operator's deployment in the stochastic-geometry model.
struct OperatorParams {
  double bs_density = 0.0;    ///< BSs per m^2
  double bandwidth = 0.0;     ///< Hz
  double user_density = 0.0;  ///< subscribers per m^2
};

/// Radio parameters shared by every BS (linear SI units).
struct RadioParams {
  double tx_power = 0.0;            ///< W
  double noise_density = 0.0;       ///< W/Hz
  double path_loss_exponent = 0.0;  ///< dimensionless, > 2
};

enum class Strategy { NoCoop, FlexRoam, Merger };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

struct QuadratureConfig {
  double rel_tol = 1e-7;
  double abs_tol = 0.0;
  int max_subdivisions = 4096;
};

/// `spectral_rate_nats` is E[ln(1+SINR)]. `throughput_bps` depends on the
/// producer: the rate_* functions report the bandwidth-scaled cell rate,
/// throughput() reports the per-user share.
struct RateResult {
  double spectral_rate_nats = 0.0;
  double throughput_bps = 0.0;
  double error_estimate = 0.0;
};

/// Table-I style baseline: 46 dBm, -174 dBm/Hz, alpha = 3.76.
RadioParams default_radio();

/// rho(t, alpha) = (e^t - 1)^{2/alpha} * Integral_{(e^t-1)^{-2/alpha}}^inf dx / (1 + x^{alpha/2}).
///
/// Throws DomainError when alpha <= 2 or t < 0.
double interference_integral(double t, double alpha, const QuadratureConfig& quad = {});

/// Ergodic rate of a user served by the nearest of `serving_density` BSs and
/// interfered by the rest of an independent `interferer_density` field
/// beyond the serving distance. rate_nocoop and the FLEXROAM components are
/// both instances of this.
RateResult serving_rate(double bandwidth, double serving_density, double interferer_density,
                        const RadioParams& radio, const QuadratureConfig& quad = {});

/// Average ergodic rate without cooperation. Throws DomainError for w <= 0
/// or lambda <= 0, QuadratureError on non-convergence.
RateResult rate_nocoop(double bandwidth, double bs_density, const RadioParams& radio,
                       const QuadratureConfig& quad = {});

/// Shared-infrastructure rate: lambda-weighted mixture of the per-operator
/// serving rates. Accepts op2 with zero density as the single-operator limit.
RateResult rate_flexroam(const OperatorParams& op1, const OperatorParams& op2, const RadioParams& radio,
                         const QuadratureConfig& quad = {});

/// Pooled infrastructure and spectrum; delegates to rate_nocoop on the sums.
RateResult rate_merger(const OperatorParams& op1, const OperatorParams& op2, const RadioParams& radio,
                       const QuadratureConfig& quad = {});

/// Per-user average throughput for `for_operator` (1 or 2). Shared
/// strategies return the same value for both operators.
RateResult throughput(Strategy strategy, const OperatorParams& op1, const OperatorParams& op2,
                      const RadioParams& radio, const QuadratureConfig& quad, int for_operator);

enum class SweepAxis { BsDensity, UserDensity, Bandwidth };

std::string_view to_string(SweepAxis a);
std::optional<SweepAxis> parse_sweep_axis(std::string_view text);

struct SweepRow {
  double ratio = 0.0;
  Strategy strategy = Strategy::NoCoop;
  int op = 1;
  double throughput_bps = 0.0;
  double spectral_rate_nats = 0.0;
  bool ok = true;
  std::string error;  ///< set when ok == false
};

/// Apply `ratio` to OP2 along `axis` relative to OP1. Along BsDensity the
/// users-per-cell ratio of OP2 is held fixed, so user_density scales too.
OperatorParams scaled_op2(const OperatorParams& op1, const OperatorParams& op2_base, SweepAxis axis,
                          double ratio);

/// One row per (ratio, strategy, operator). A failed row (bad ratio,
/// quadrature failure) is flagged and the sweep continues. `threads` = 0
/// means hardware concurrency.
std::vector<SweepRow> sweep(const std::vector<Strategy>& strategies, const OperatorParams& op1,
                            const OperatorParams& op2_base, const RadioParams& radio,
                            const QuadratureConfig& quad, SweepAxis axis, const std::vector<double>& grid,
                            unsigned threads = 0);

/// Smallest user-density ratio eta2/eta1 in [lo, hi] at which OP2 stops
/// losing under `strategy` relative to NOCOOP (bisection on the gain sign).
/// Returns nullopt when the sign does not change on the bracket.
std::optional<double> op2_break_even_user_ratio(Strategy strategy, const OperatorParams& op1,
                                                const RadioParams& radio, const QuadratureConfig& quad,
                                                double lo, double hi, double ratio_tol = 1e-4);

}  // namespace cellpool
