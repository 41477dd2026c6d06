#pragma once

#include <cstddef>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace cellpool::stats {

/// Neumaier-compensated accumulator. Merging partial sums in a fixed order
/// keeps parallel reductions reproducible.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// z such that P(|Z| <= z) = 0.99.
inline constexpr double kZ99 = 2.5758293035489004;

/// Two-sided one-sample Kolmogorov-Smirnov statistic; `sorted` ascending.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Asymptotic p-value of the KS statistic (Stephens' small-n correction).
double ks_pvalue(double d, std::size_t n);

/// Upper-tail p-value of a chi-square statistic.
double chi_square_pvalue(double statistic, double dof);

/// Value at quantile p of sorted data (order statistic ceil(p n) - 1).
double order_statistic(std::span<const double> sorted, double p);

}  // namespace cellpool::stats
