// Shapiro-Wilk W test for complete samples, following Royston's algorithm
// AS R94 (Appl. Statist. 44(4), 1995).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "lnport/error.hpp"
#include "lnport/stats.hpp"

namespace lnport {

namespace {

template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
  double result = 0.0;
  for (std::size_t i = N; i-- > 0;) result = result * x + c[i];
  return result;
}

constexpr std::array<double, 2> kGamma = {-2.273, 0.459};
constexpr std::array<double, 6> kC1 = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr std::array<double, 6> kC2 = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr std::array<double, 4> kC3 = {0.544, -0.39978, 0.025054, -6.714e-4};
constexpr std::array<double, 4> kC4 = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr std::array<double, 4> kC5 = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr std::array<double, 3> kC6 = {-0.4803, -0.082676, 0.0030302};

// Coefficients a_1..a_{n/2} for the upper half of the order statistics.
std::vector<double> half_coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
    return a;
  }
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

  std::size_t first_scaled;
  double fac;
  if (n > 5) {
    first_scaled = 2;
    const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                    (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    first_scaled = 1;
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

TestResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw Error(ErrorCode::kInvalidArgument, "Shapiro-Wilk needs 3 <= n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::kInvalidArgument, "Shapiro-Wilk sample contains non-finite values");
  }
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19 * std::max(1.0, std::abs(x.front())))) {
    throw Error(ErrorCode::kInvalidArgument, "Shapiro-Wilk sample has zero variance");
  }

  const auto half_a = half_coefficients(n);
  // Full antisymmetric coefficient vector aligned with the ascending sample.
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 0; i < half_a.size(); ++i) {
    a[i] = -half_a[i];
    a[n - 1 - i] = half_a[i];
  }

  // W as the squared correlation between coefficients and range-scaled data.
  double mean_a = 0.0;
  double mean_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_x += x[i] / range;
  }
  mean_a /= static_cast<double>(n);
  mean_x /= static_cast<double>(n);
  double ssa = 0.0;
  double ssx = 0.0;
  double sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double dx = x[i] / range - mean_x;
    ssa += da * da;
    ssx += dx * dx;
    sax += da * dx;
  }
  // 1 - W computed directly to keep precision when W is close to 1.
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  if (n == 3) {
    constexpr double six_over_pi = 6.0 / std::numbers::pi;
    constexpr double pi_over_3 = std::numbers::pi / 3.0;
    const double p = six_over_pi * (std::asin(std::sqrt(w)) - pi_over_3);
    return {w, std::clamp(p, 0.0, 1.0)};
  }

  const double an = static_cast<double>(n);
  double y = std::log(w1);
  double m;
  double s;
  if (n <= 11) {
    const double gamma = poly(kGamma, an);
    if (y >= gamma) return {w, 1e-99};
    y = -std::log(gamma - y);
    m = poly(kC3, an);
    s = std::exp(poly(kC4, an));
  } else {
    const double ln_n = std::log(an);
    m = poly(kC5, ln_n);
    s = std::exp(poly(kC6, ln_n));
  }
  const double p = normal_cdf((m - y) / s);
  return {w, std::clamp(p, 0.0, 1.0)};
}

}  // namespace lnport
