#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lnport {

/// Standard normal distribution function. Absolute error below 1e-12 on
/// |x| <= 8; exact symmetry Phi(-x) = 1 - Phi(x) up to rounding.
double normal_cdf(double x) noexcept;

/// Inverse of normal_cdf (Wichura's AS 241, ~1e-16 relative accuracy).
double normal_quantile(double p);

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// Shapiro-Wilk W test with Royston's approximations for the coefficients
/// and for the null distribution of W. 3 <= n <= 5000.
TestResult shapiro_wilk(std::span<const double> sample);

/// Right-continuous empirical distribution function.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);

  /// Fraction of values <= x.
  double operator()(double x) const noexcept;

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::vector<double> values);

/// Type-7 sample quantile (linear interpolation between order statistics).
double quantile(std::span<const double> values, double q);

}  // namespace lnport
