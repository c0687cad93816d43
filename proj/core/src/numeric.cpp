#include "fpp/numeric.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "fpp/errors.hpp"

namespace fpp {

double pairwise_sum(std::span<const double> xs) noexcept {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double t_quantile(double p, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

double normal_quantile(double p) {
  boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

namespace {

void check_sizes(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw DomainError("fit: x and y differ in length");
  if (x.size() < min_points) throw DomainError("fit: too few points");
}

}  // namespace

LinearFit fit_line(std::span<const double> x, std::span<const double> y, double confidence) {
  check_sizes(x, y, 3);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    sse += r * r;
  }
  f.dof = x.size() - 2;
  const double s2 = sse / static_cast<double>(f.dof);
  f.slope_se = std::sqrt(s2 / sxx);
  f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  const double t = t_quantile(0.5 + confidence / 2.0, static_cast<double>(f.dof));
  f.slope_ci = {f.slope - t * f.slope_se, f.slope + t * f.slope_se};
  f.intercept_ci = {f.intercept - t * f.intercept_se, f.intercept + t * f.intercept_se};
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

LinearFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                            std::span<const double> sigma, double confidence) {
  check_sizes(x, y, 2);
  if (sigma.size() != x.size()) throw DomainError("fit: sigma length mismatch");
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw DomainError("fit: sigma must be positive");
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  if (det <= 0.0) throw DomainError("fit: degenerate design");
  LinearFit f;
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swxx * swy - swx * swxy) / det;
  f.slope_se = std::sqrt(sw / det);
  f.intercept_se = std::sqrt(swxx / det);
  const double z = normal_quantile(0.5 + confidence / 2.0);
  f.slope_ci = {f.slope - z * f.slope_se, f.slope + z * f.slope_se};
  f.intercept_ci = {f.intercept - z * f.intercept_se, f.intercept + z * f.intercept_se};
  double my = swy / sw, sse = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    sse += w * r * r;
    syy += w * (y[i] - my) * (y[i] - my);
  }
  f.dof = x.size() - 2;
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

ProportionalFit fit_proportional(std::span<const double> x, std::span<const double> y, double confidence) {
  check_sizes(x, y, 2);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  if (sxx == 0.0) throw DomainError("fit: x values are all zero");
  ProportionalFit f;
  f.coefficient = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.coefficient * x[i];
    f.residuals.push_back(r);
    sse += r * r;
  }
  const double dof = static_cast<double>(x.size() - 1);
  f.coefficient_se = std::sqrt(sse / dof / sxx);
  const double t = t_quantile(0.5 + confidence / 2.0, dof);
  f.ci = {f.coefficient - t * f.coefficient_se, f.coefficient + t * f.coefficient_se};
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y, 2);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace fpp
