#pragma once

#include "lnport/market.hpp"

namespace lnport {

/// Fully invested portfolio weights (shorting allowed). Construction rejects
/// non-finite entries and sums farther than kWeightSumTolerance from one.
class Weights {
 public:
  explicit Weights(Vector w);

  const Vector& values() const noexcept { return w_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t i) const { return w_(static_cast<Eigen::Index>(i)); }

 private:
  Vector w_;
};

inline constexpr double kWeightSumTolerance = 1e-10;

/// Below this slope the feasible set collapses to a single mean.
inline constexpr double kMinSlope = 1e-12;

/// Efficient-set constants: GMV mean and variance, the frontier slope s and
/// the matrix Q = Sigma^{-1} - Sigma^{-1} 1 1' Sigma^{-1} / 1' Sigma^{-1} 1.
struct FrontierConstants {
  double r_gmv = 0.0;
  double v_gmv = 0.0;
  double s = 0.0;
  Matrix q;
  Vector q_mu;         // Q mu, the direction along the parabola
  Vector gmv_weights;  // Sigma^{-1} 1 / 1' Sigma^{-1} 1
};

FrontierConstants efficient_constants(const MarketParams& params);

Weights gmv_weights(const MarketParams& params);

/// Sigma^{-1} mu / 1' Sigma^{-1} mu, with mu the gross-return mean. Throws
/// kUndefinedPortfolio when the denominator vanishes.
Weights sharpe_weights(const MarketParams& params);

/// Expected gross return mu' Sigma^{-1} mu / 1' Sigma^{-1} mu of the Sharpe
/// portfolio.
double sharpe_return(const MarketParams& params);

struct Moments {
  double x = 0.0;  // mean, w' mu
  double v = 0.0;  // variance, w' Sigma w
};

Moments portfolio_moments(const Weights& w, const MarketParams& params);

/// Minimum-variance portfolio with mean `x_target`:
/// w_GMV + (x_target - R_GMV) / s * Q mu.
Weights markowitz_weights(double x_target, const MarketParams& params,
                          const FrontierConstants& constants);

/// Variance on the feasible-set parabola at mean x.
double parabola_variance(double x, const FrontierConstants& constants);

}  // namespace lnport
