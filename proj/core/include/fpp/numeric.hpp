#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fpp {

/// Pairwise summation; error grows as O(log N) ulps.
double pairwise_sum(std::span<const double> xs) noexcept;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion at the given z.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Two-sided Student-t quantile, e.g. t_quantile(0.975, dof).
double t_quantile(double p, double dof);
double normal_quantile(double p);

/// Ordinary least squares y = intercept + slope * x with t-based CIs.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  Interval intercept_ci;
  Interval slope_ci;
  double r2 = 0.0;
  std::vector<double> residuals;
  std::size_t dof = 0;
};

/// Requires at least 3 points and two distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y, double confidence = 0.95);

/// Weighted least squares (weights = 1 / sigma^2); CIs use the supplied
/// sigmas (normal quantile) rather than residual scatter.
LinearFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                            std::span<const double> sigma, double confidence = 0.95);

/// Least squares y = c * x through the origin.
struct ProportionalFit {
  double coefficient = 0.0;
  double coefficient_se = 0.0;
  Interval ci;
  double r2 = 0.0;  // uncentred R^2
  std::vector<double> residuals;
};

ProportionalFit fit_proportional(std::span<const double> x, std::span<const double> y,
                                 double confidence = 0.95);

/// Pearson correlation coefficient.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace fpp
