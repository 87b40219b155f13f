#include "lnport/lognormal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lnport/error.hpp"
#include "lnport/stats.hpp"

namespace lnport {

LogNormalParams LogNormalParams::make(double alpha, double beta2) {
  if (!std::isfinite(alpha) || !std::isfinite(beta2) || !(beta2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "log-normal parameters need finite alpha and beta2 > 0");
  }
  return {alpha, beta2};
}

double lognormal_moment(const LogNormalParams& p, double tau) {
  const double exponent = p.alpha * tau + 0.5 * p.beta2 * tau * tau;
  if (exponent > 700.0) throw Error(ErrorCode::kOverflow, "log-normal moment overflows");
  return std::exp(exponent);
}

LogNormalParams match_params(double mean, double variance) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorCode::kNonPositiveMean, "gross-return mean must be positive");
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorCode::kInvalidArgument, "variance must be positive");
  }
  // beta2 = ln(1 + V/E^2), alpha = 2 ln E - ln(V + E^2)/2 = ln E - beta2/2.
  const double beta2 = std::log1p(variance / (mean * mean));
  return LogNormalParams::make(std::log(mean) - 0.5 * beta2, beta2);
}

double psi(double x, double mu, double sigma) {
  const double normal = normal_cdf((x - mu) / sigma);
  if (!(x > 0.0)) return normal;
  return normal - normal_cdf((std::log(x) - std::log(mu)) / (sigma / mu));
}

double psi_sup_bound(double mu, double sigma) {
  const double x = sigma / mu;
  const double x2 = x * x;
  const double root = std::sqrt(x2 * x2 + 1.0);
  const double left = (std::exp(1.0 - x2 - root) - 2.0 + x2 + root) / x;
  // expm1 keeps the right branch accurate for tiny x.
  const double right = (std::expm1(2.0 * x) - 2.0 * x) / x;
  return std::max(left, right) / std::sqrt(2.0 * std::numbers::pi);
}

double psi_sup_empirical(double mu, double sigma, int n_grid) {
  if (n_grid < 1000) throw Error(ErrorCode::kInvalidArgument, "n_grid >= 1000 required");
  const double x = sigma / mu;
  const double x2 = x * x;
  double best = 0.0;
  auto visit = [&](double t) { best = std::max(best, std::abs(psi(t, mu, sigma))); };

  auto linear = [&](double a, double b) {
    if (a > b) std::swap(a, b);
    for (int i = 0; i < n_grid; ++i) visit(a + (b - a) * i / (n_grid - 1));
  };
  // Bracketing intervals for the two extrema, in units of mu.
  linear(mu * std::exp(1.0 - x2 - std::sqrt(x2 * x2 + 1.0)), mu * std::exp(-2.0 * x2));
  linear(mu, mu * std::exp(2.0 * x));
  // Envelope in log space.
  const double lo = std::log(mu) - 10.0 * x;
  const double hi = std::log(mu) + 10.0 * x;
  for (int i = 0; i < n_grid; ++i) visit(std::exp(lo + (hi - lo) * i / (n_grid - 1)));
  return best;
}

}  // namespace lnport
