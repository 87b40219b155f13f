#pragma once

namespace lnport {

/// Parameters of ln N(alpha, beta2): ln Z ~ N(alpha, beta2).
struct LogNormalParams {
  double alpha = 0.0;
  double beta2 = 0.0;

  /// Throws unless beta2 > 0 and both fields are finite.
  static LogNormalParams make(double alpha, double beta2);
};

/// E[Z^tau] = exp(alpha tau + beta2 tau^2 / 2). Throws kOverflow when the
/// exponent exceeds 700.
double lognormal_moment(const LogNormalParams& p, double tau);

/// Log-normal law with mean `mean` and variance `variance`.
LogNormalParams match_params(double mean, double variance);

/// Difference between the N(mu, sigma^2) distribution function and the
/// ln N(ln mu, sigma^2/mu^2) one at x. The log-normal CDF is 0 for x <= 0.
double psi(double x, double mu, double sigma);

/// Analytic upper bound on sup |psi| as a function of sigma/mu.
double psi_sup_bound(double mu, double sigma);

/// Grid estimate of sup |psi|. The grid covers the two intervals that
/// bracket the extrema of psi plus a log-spaced envelope over
/// (mu e^{-10 sigma/mu}, mu e^{10 sigma/mu}).
double psi_sup_empirical(double mu, double sigma, int n_grid = 10000);

}  // namespace lnport
