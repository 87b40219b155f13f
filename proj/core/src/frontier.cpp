#include "lnport/frontier.hpp"

#include <cmath>
#include <sstream>

#include "lnport/error.hpp"

namespace lnport {

namespace {

void require_slope(const FrontierConstants& c) {
  if (!(c.s > kMinSlope)) {
    throw Error(ErrorCode::kDegenerateFrontier,
                "degenerate frontier: all feasible portfolios share one mean");
  }
}

}  // namespace

Weights::Weights(Vector w) : w_(std::move(w)) {
  if (w_.size() == 0 || !w_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "weights must be finite and non-empty");
  }
  const double gap = std::abs(w_.sum() - 1.0);
  if (gap > kWeightSumTolerance) {
    std::ostringstream msg;
    msg << "weights sum to 1 + " << (w_.sum() - 1.0);
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

FrontierConstants efficient_constants(const MarketParams& params) {
  const auto k = static_cast<Eigen::Index>(params.k());
  const Vector ones = Vector::Ones(k);
  const Matrix sigma_inv = params.solve(Matrix(Matrix::Identity(k, k)));
  const Vector inv_ones = sigma_inv * ones;
  const double a = ones.dot(inv_ones);
  const double b = inv_ones.dot(params.mu());

  FrontierConstants c;
  c.v_gmv = 1.0 / a;
  c.r_gmv = b / a;
  c.q = sigma_inv - inv_ones * inv_ones.transpose() / a;
  c.q = 0.5 * (c.q + c.q.transpose());
  c.q_mu = c.q * params.mu();
  // mu' Q mu >= 0 analytically; rounding can push it a hair below zero.
  c.s = std::max(0.0, params.mu().dot(c.q_mu));
  c.gmv_weights = inv_ones / a;
  return c;
}

Weights gmv_weights(const MarketParams& params) {
  const Vector inv_ones = params.solve(Vector(Vector::Ones(static_cast<Eigen::Index>(params.k()))));
  return Weights(inv_ones / inv_ones.sum());
}

Weights sharpe_weights(const MarketParams& params) {
  const Vector inv_mu = params.solve(params.mu());
  const double denom = inv_mu.sum();
  if (!(std::abs(denom) > 1e-300) || !std::isfinite(denom)) {
    throw Error(ErrorCode::kUndefinedPortfolio, "Sharpe portfolio undefined: 1' Sigma^{-1} mu = 0");
  }
  return Weights(inv_mu / denom);
}

double sharpe_return(const MarketParams& params) {
  const Vector inv_mu = params.solve(params.mu());
  const double denom = inv_mu.sum();
  if (!(std::abs(denom) > 1e-300)) {
    throw Error(ErrorCode::kUndefinedPortfolio, "Sharpe portfolio undefined: 1' Sigma^{-1} mu = 0");
  }
  return params.mu().dot(inv_mu) / denom;
}

Moments portfolio_moments(const Weights& w, const MarketParams& params) {
  if (w.size() != params.k()) throw Error(ErrorCode::kInvalidArgument, "weight dimension mismatch");
  const Vector& v = w.values();
  return {v.dot(params.mu()), std::max(0.0, v.dot(params.sigma() * v))};
}

Weights markowitz_weights(double x_target, const MarketParams& params,
                          const FrontierConstants& constants) {
  require_slope(constants);
  if (constants.gmv_weights.size() != static_cast<Eigen::Index>(params.k())) {
    throw Error(ErrorCode::kInvalidArgument, "constants do not belong to these parameters");
  }
  const double step = (x_target - constants.r_gmv) / constants.s;
  return Weights(constants.gmv_weights + step * constants.q_mu);
}

double parabola_variance(double x, const FrontierConstants& constants) {
  require_slope(constants);
  const double d = x - constants.r_gmv;
  return d * d / constants.s + constants.v_gmv;
}

}  // namespace lnport
