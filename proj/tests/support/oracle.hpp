#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "cellpool/stats.hpp"

// Test-side reference computations. Deliberately simple and slow; nothing
// here shares code with the library's own numerics.
namespace cellpool::oracle {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// rho(t, alpha) via x = L w^{-4}, which maps [L, inf) onto (0, 1] with a
/// smooth integrand for alpha near 4.
inline double rho_reference(double t, double alpha, int panels = 200000) {
  if (t == 0.0) return 0.0;
  const double z = std::expm1(t);
  const double lower = std::pow(z, -2.0 / alpha);
  const double k = 4.0;
  auto g = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double e = k * alpha / 2.0 - k - 1.0;
    return k * lower * std::pow(w, e) / (std::pow(w, k * alpha / 2.0) + std::pow(lower, alpha / 2.0));
  };
  return std::pow(z, 2.0 / alpha) * simpson(g, 0.0, 1.0, panels);
}

/// Closed-form rho for alpha = 4: sqrt(e^t - 1) * atan(sqrt(e^t - 1)).
inline double rho_alpha4(double t) {
  const double s = std::sqrt(std::expm1(t));
  return s * std::atan(s);
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic, effective size).
inline double two_sample_ks_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  const double ne = double(a.size()) * b.size() / (a.size() + b.size());
  return stats::ks_pvalue(d, static_cast<std::size_t>(ne));
}

}  // namespace cellpool::oracle
