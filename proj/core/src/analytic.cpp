#include "cellpool/analytic.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cellpool/errors.hpp"
#include "cellpool/parallel.hpp"
#include "cellpool/units.hpp"

namespace cellpool {

namespace {

using std::numbers::pi;
using std::numbers::ln2;

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

template <class F>
Integral integrate(F&& f, double a, double b, double rel_tol, double abs_tol, int max_subdivisions) {
  using Gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto depth = static_cast<unsigned>(std::bit_width(static_cast<unsigned>(std::max(1, max_subdivisions))));
  Integral out;
  double l1 = 0.0;
  out.value = Gk::integrate(f, a, b, depth, rel_tol, &out.error, &l1);
  out.converged = std::isfinite(out.value) && out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 2.0)) throw DomainError("path-loss exponent must exceed 2 (interference integral diverges)");
}

void check_quad(const QuadratureConfig& quad) {
  if (!(quad.rel_tol > 0.0) || !(quad.abs_tol >= 0.0) || quad.max_subdivisions < 1)
    throw DomainError("invalid quadrature configuration");
}

// Integral_0^inf dx / (1 + x^{alpha/2}) = (2 pi / alpha) / sin(2 pi / alpha).
double full_tail(double alpha) {
  const double a = 2.0 * pi / alpha;
  return a / std::sin(a);
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::NoCoop: return "nocoop";
    case Strategy::FlexRoam: return "flexroam";
    case Strategy::Merger: return "merger";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "nocoop") return Strategy::NoCoop;
  if (text == "flexroam") return Strategy::FlexRoam;
  if (text == "merger") return Strategy::Merger;
  return std::nullopt;
}

RadioParams default_radio() {
  return RadioParams{units::dbm_to_watt(46.0), units::dbm_to_watt(-174.0), 3.76};
}

double interference_integral(double t, double alpha, const QuadratureConfig& quad) {
  check_alpha(alpha);
  if (!(t >= 0.0)) throw DomainError("interference_integral: t must be non-negative");
  const double z = std::expm1(t);
  if (z == 0.0) return 0.0;
  if (!std::isfinite(z)) return std::numeric_limits<double>::infinity();

  const double tol = quad.rel_tol;
  Integral part;
  double value = 0.0;
  if (z > 1.0) {
    // Lower limit below 1: subtract the finite head from the closed-form total.
    const double lower = std::pow(z, -2.0 / alpha);
    part = integrate([&](double x) { return 1.0 / (1.0 + std::pow(x, alpha / 2.0)); }, 0.0, lower, tol,
                     0.0, quad.max_subdivisions);
    const double tail = full_tail(alpha) - part.value;
    part.converged = std::isfinite(part.value) && part.error <= tol * tail;
    value = std::pow(z, 2.0 / alpha) * tail;
  } else {
    // x = L u^{-q} with q(alpha/2 - 1) = 1 maps the tail onto (0, 1] with a
    // bounded integrand: rho = Integral_0^1 q z / (z u^p + 1) du, p = alpha/(alpha-2).
    const double q = 2.0 / (alpha - 2.0);
    const double p = alpha / (alpha - 2.0);
    part = integrate([&](double u) { return q * z / (z * std::pow(u, p) + 1.0); }, 0.0, 1.0, tol, 0.0,
                     quad.max_subdivisions);
    value = part.value;
  }
  if (!part.converged)
    throw QuadratureError("interference_integral did not converge", value, part.error);
  return value;
}

RateResult serving_rate(double bandwidth, double serving_density, double interferer_density,
                        const RadioParams& radio, const QuadratureConfig& quad) {
  const double alpha = radio.path_loss_exponent;
  check_alpha(alpha);
  check_quad(quad);
  if (!(bandwidth >= 0.0) || !(serving_density > 0.0) || !(interferer_density >= 0.0) ||
      !(radio.tx_power > 0.0) || !(radio.noise_density >= 0.0))
    throw DomainError("serving_rate: invalid parameters");

  // With s = pi * lambda_s * r^2 the distance integral becomes
  //   Integral_0^inf exp(-s (1 + kappa rho(t)) - c (e^t - 1) s^{alpha/2}) ds
  // where kappa = lambda_i / lambda_s and c collects the noise term.
  const double kappa = interferer_density / serving_density;
  const double c = radio.noise_density * bandwidth / radio.tx_power *
                   std::pow(pi * serving_density, -alpha / 2.0);
  const double inner_tol = quad.rel_tol / 10.0;
  const QuadratureConfig rho_quad{inner_tol, 0.0, quad.max_subdivisions};

  bool inner_failed = false;
  double worst_inner_rel = 0.0;

  auto distance_integral = [&](double t) -> double {
    const double rho = interference_integral(t, alpha, rho_quad);
    const double a = 1.0 + kappa * rho;
    if (!std::isfinite(a)) return 0.0;
    const double b = c * std::expm1(t);
    if (b == 0.0) return 1.0 / a;  // noise-free: exact
    if (!std::isfinite(b)) return 0.0;
    // y = a s; beta folds a into the noise term; v/(1-v) with a width
    // matched to where exp(-beta y^{alpha/2}) cuts off.
    const double beta = b * std::pow(a, -alpha / 2.0);
    const double width = 1.0 / (1.0 + std::pow(beta, 2.0 / alpha));
    auto f = [&](double v) {
      const double one_minus = 1.0 - v;
      const double y = width * v / one_minus;
      const double jac = width / (one_minus * one_minus);
      const double e = y + beta * std::pow(y, alpha / 2.0);
      return std::exp(-e) * jac;
    };
    const Integral in = integrate(f, 0.0, 1.0, inner_tol, 0.0, quad.max_subdivisions);
    if (!in.converged) inner_failed = true;
    if (in.value > 0.0) worst_inner_rel = std::max(worst_inner_rel, in.error / in.value);
    return in.value / a;
  };

  auto outer = [&](double u) {
    const double one_minus = 1.0 - u;
    const double t = u / one_minus;
    return distance_integral(t) / (one_minus * one_minus);
  };

  const Integral out = integrate(outer, 0.0, 1.0, quad.rel_tol, quad.abs_tol, quad.max_subdivisions);
  RateResult result;
  result.spectral_rate_nats = out.value;
  result.error_estimate = out.error + worst_inner_rel * std::abs(out.value);
  result.throughput_bps = bandwidth * out.value / ln2;
  if (!out.converged || inner_failed)
    throw QuadratureError("rate quadrature did not reach tolerance", out.value, result.error_estimate);
  return result;
}

RateResult rate_nocoop(double bandwidth, double bs_density, const RadioParams& radio,
                       const QuadratureConfig& quad) {
  if (!(bandwidth > 0.0)) throw DomainError("rate_nocoop: bandwidth must be positive");
  if (!(bs_density > 0.0)) throw DomainError("rate_nocoop: BS density must be positive");
  return serving_rate(bandwidth, bs_density, bs_density, radio, quad);
}

RateResult rate_flexroam(const OperatorParams& op1, const OperatorParams& op2, const RadioParams& radio,
                         const QuadratureConfig& quad) {
  const double l1 = op1.bs_density;
  const double l2 = op2.bs_density;
  if (!(l1 >= 0.0) || !(l2 >= 0.0) || !(l1 + l2 > 0.0))
    throw DomainError("rate_flexroam: densities must be non-negative with a positive sum");
  const double total = l1 + l2;

  RateResult mix;
  for (const auto* op : {&op1, &op2}) {
    if (op->bs_density == 0.0) continue;
    const RateResult part = serving_rate(op->bandwidth, total, op->bs_density, radio, quad);
    const double weight = op->bs_density / total;
    mix.spectral_rate_nats += weight * part.spectral_rate_nats;
    mix.throughput_bps += weight * part.throughput_bps;
    mix.error_estimate += weight * part.error_estimate;
  }
  return mix;
}

RateResult rate_merger(const OperatorParams& op1, const OperatorParams& op2, const RadioParams& radio,
                       const QuadratureConfig& quad) {
  return rate_nocoop(op1.bandwidth + op2.bandwidth, op1.bs_density + op2.bs_density, radio, quad);
}

RateResult throughput(Strategy strategy, const OperatorParams& op1, const OperatorParams& op2,
                      const RadioParams& radio, const QuadratureConfig& quad, int for_operator) {
  if (for_operator != 1 && for_operator != 2) throw DomainError("operator index must be 1 or 2");
  const OperatorParams& own = for_operator == 1 ? op1 : op2;

  RateResult cell;
  double users_per_bs = 0.0;
  switch (strategy) {
    case Strategy::NoCoop:
      if (!(own.user_density > 0.0)) throw DomainError("user density must be positive");
      cell = rate_nocoop(own.bandwidth, own.bs_density, radio, quad);
      users_per_bs = own.user_density / own.bs_density;
      break;
    case Strategy::FlexRoam:
    case Strategy::Merger: {
      const double eta = op1.user_density + op2.user_density;
      if (!(eta > 0.0)) throw DomainError("user density must be positive");
      cell = strategy == Strategy::FlexRoam ? rate_flexroam(op1, op2, radio, quad)
                                            : rate_merger(op1, op2, radio, quad);
      users_per_bs = eta / (op1.bs_density + op2.bs_density);
      break;
    }
  }
  RateResult out = cell;
  out.throughput_bps = cell.throughput_bps / users_per_bs;
  out.error_estimate = cell.error_estimate;
  return out;
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::BsDensity: return "bs-density";
    case SweepAxis::UserDensity: return "user-density";
    case SweepAxis::Bandwidth: return "bandwidth";
  }
  return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view text) {
  if (text == "bs-density" || text == "lambda") return SweepAxis::BsDensity;
  if (text == "user-density" || text == "eta") return SweepAxis::UserDensity;
  if (text == "bandwidth" || text == "w") return SweepAxis::Bandwidth;
  return std::nullopt;
}

OperatorParams scaled_op2(const OperatorParams& op1, const OperatorParams& op2_base, SweepAxis axis,
                          double ratio) {
  OperatorParams op2 = op2_base;
  switch (axis) {
    case SweepAxis::BsDensity: {
      const double users_per_cell = op2_base.user_density / op2_base.bs_density;
      op2.bs_density = ratio * op1.bs_density;
      op2.user_density = users_per_cell * op2.bs_density;
      break;
    }
    case SweepAxis::UserDensity: op2.user_density = ratio * op1.user_density; break;
    case SweepAxis::Bandwidth: op2.bandwidth = ratio * op1.bandwidth; break;
  }
  return op2;
}

std::vector<SweepRow> sweep(const std::vector<Strategy>& strategies, const OperatorParams& op1,
                            const OperatorParams& op2_base, const RadioParams& radio,
                            const QuadratureConfig& quad, SweepAxis axis, const std::vector<double>& grid,
                            unsigned threads) {
  const std::size_t per_point = strategies.size() * 2;
  std::vector<SweepRow> rows(grid.size() * per_point);
  parallel_for(grid.size() * strategies.size(), threads, [&](std::size_t job) {
    const std::size_t gi = job / strategies.size();
    const std::size_t si = job % strategies.size();
    const double ratio = grid[gi];
    const Strategy strategy = strategies[si];
    SweepRow* out = &rows[gi * per_point + si * 2];
    for (int op = 1; op <= 2; ++op) {
      out[op - 1].ratio = ratio;
      out[op - 1].strategy = strategy;
      out[op - 1].op = op;
    }
    auto fail = [&](const std::string& msg) {
      for (int k = 0; k < 2; ++k) {
        out[k].ok = false;
        out[k].error = msg;
      }
    };
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
      fail("ratio must be positive");
      return;
    }
    try {
      const OperatorParams op2 = scaled_op2(op1, op2_base, axis, ratio);
      if (strategy == Strategy::NoCoop) {
        for (int op = 1; op <= 2; ++op) {
          const RateResult r = throughput(strategy, op1, op2, radio, quad, op);
          out[op - 1].throughput_bps = r.throughput_bps;
          out[op - 1].spectral_rate_nats = r.spectral_rate_nats;
        }
      } else {
        const RateResult r = throughput(strategy, op1, op2, radio, quad, 1);
        for (int k = 0; k < 2; ++k) {
          out[k].throughput_bps = r.throughput_bps;
          out[k].spectral_rate_nats = r.spectral_rate_nats;
        }
      }
    } catch (const std::exception& e) {
      fail(e.what());
    }
  });
  return rows;
}

std::optional<double> op2_break_even_user_ratio(Strategy strategy, const OperatorParams& op1,
                                                const RadioParams& radio, const QuadratureConfig& quad,
                                                double lo, double hi, double ratio_tol) {
  // OP2 mirrors OP1 except for its user density. Rates do not depend on
  // user density, so evaluate them once and bisect the closed-form gain.
  const OperatorParams op2 = op1;
  const RateResult shared_cell = strategy == Strategy::FlexRoam ? rate_flexroam(op1, op2, radio, quad)
                                 : strategy == Strategy::Merger ? rate_merger(op1, op2, radio, quad)
                                                                : rate_nocoop(op1.bandwidth, op1.bs_density, radio, quad);
  const RateResult own_cell = rate_nocoop(op2.bandwidth, op2.bs_density, radio, quad);
  const double lambda_sum = op1.bs_density + op2.bs_density;

  auto gain = [&](double ratio) {
    const double eta2 = ratio * op1.user_density;
    const double shared = strategy == Strategy::NoCoop
                              ? own_cell.throughput_bps * op2.bs_density / eta2
                              : shared_cell.throughput_bps * lambda_sum / (op1.user_density + eta2);
    const double alone = own_cell.throughput_bps * op2.bs_density / eta2;
    return shared / alone - 1.0;
  };

  double g_lo = gain(lo);
  const double g_hi = gain(hi);
  if ((g_lo < 0.0) == (g_hi < 0.0)) return std::nullopt;
  while (hi - lo > ratio_tol) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = gain(mid);
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cellpool
