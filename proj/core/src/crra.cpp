#include "lnport/crra.hpp"

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

// Clamps rounding-level negative discriminants to zero; anything more
// negative means gamma is below gamma_min.
double checked_sqrt_discriminant(double d, double gamma, double r_gmv) {
  if (d >= 0.0) return std::sqrt(d);
  const double scale = r_gmv * r_gmv * (gamma + 2.0) * (gamma + 2.0);
  if (d > -1e-12 * scale) return 0.0;
  std::ostringstream msg;
  msg << "no solution exists below gamma_min (gamma = " << gamma << ", D = " << d << ")";
  throw Error(ErrorCode::kNoSolution, msg.str());
}

struct RootMoments {
  double x;
  double y;
};

// The X_- root of (1+s)X^2 - (gamma+2)R X + (gamma+1)(R^2 + sV) = 0 and the
// matching Y = (gamma/s)(X R - R^2 - sV). For R > 0 both are rearranged so
// that no difference of nearly equal terms is formed; this matters for large
// gamma, where (gamma+2)R and sqrt(D) agree to many digits.
RootMoments lower_root(double gamma, double sqrt_d, const FrontierConstants& c) {
  const double r = c.r_gmv;
  const double s = c.s;
  const double p = r * r + s * c.v_gmv;
  if (r > 0.0) {
    const double upper = (gamma + 2.0) * r + sqrt_d;
    const double x = 2.0 * (gamma + 1.0) * p / upper;
    const double y = 4.0 * gamma * (gamma + 1.0) * p * (r * r + (1.0 + s) * c.v_gmv) /
                     ((gamma * r + sqrt_d) * upper);
    return {x, y};
  }
  const double x = ((gamma + 2.0) * r - sqrt_d) / (2.0 * (1.0 + s));
  return {x, gamma / s * (x * r - p)};
}

Weights weights_from_moments(double gamma, double x, double y, const MarketParams& params) {
  // Sigma^{-1} [ (-1 + (gamma+1) mu / x) y / gamma - x mu ]
  const auto k = static_cast<Eigen::Index>(params.k());
  Matrix rhs(k, 2);
  rhs.col(0).setOnes();
  rhs.col(1) = params.mu();
  const Matrix solved = params.solve(rhs);
  const double y_over_gamma = y / gamma;
  const double mu_coef = (gamma + 1.0) * y_over_gamma / x - x;
  Vector w = -y_over_gamma * solved.col(0) + mu_coef * solved.col(1);
  try {
    return Weights(std::move(w));
  } catch (const Error& e) {
    throw Error(ErrorCode::kInternal, std::string("closed-form weights failed validation: ") + e.what());
  }
}

CrraSolution finish(double gamma, RootMoments root, const MarketParams& params,
                    const FrontierConstants& c, double w0) {
  if (!(root.x > 0.0)) {
    throw Error(ErrorCode::kNonPositiveMean,
                "optimal mean non-positive; log-utility objective undefined");
  }
  if (!(root.y > 0.0)) {
    throw Error(ErrorCode::kInternal, "optimal second moment is not positive");
  }
  Weights w = weights_from_moments(gamma, root.x, root.y, params);
  return CrraSolution{
      .gamma = gamma,
      .x = root.x,
      .y = root.y,
      .v = root.y - root.x * root.x,
      .weights = std::move(w),
      .expected_utility = utility_from_moments(root.x, root.y, gamma, w0),
      .mv_efficient = c.r_gmv > 0.0 && root.x > c.r_gmv,
      .w0 = w0,
  };
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double discriminant(double gamma, const FrontierConstants& c) {
  const double r2 = c.r_gmv * c.r_gmv;
  return (gamma + 2.0) * (gamma + 2.0) * r2 -
         4.0 * (gamma + 1.0) * (1.0 + c.s) * (r2 + c.s * c.v_gmv);
}

double gamma_min(const FrontierConstants& c) {
  require_slope(c);
  if (c.r_gmv == 0.0) throw Error(ErrorCode::kInvalidArgument, "gamma_min undefined for R_GMV = 0");
  const double s = c.s;
  const double ratio = c.v_gmv / (c.r_gmv * c.r_gmv);
  const double root = std::sqrt(s * (1.0 + s) * (1.0 + s * ratio) * (1.0 + (1.0 + s) * ratio));
  return 2.0 * s + 2.0 * (s * (1.0 + s) * ratio + root);
}

GammaCondition gamma_condition(const FrontierConstants& c) {
  return {gamma_min(c), c.r_gmv > 0.0};
}

bool is_mv_efficient_power(double gamma, const FrontierConstants& c) {
  if (!(c.r_gmv > 0.0)) return false;
  return gamma >= gamma_min(c);
}

double utility_from_moments(double x, double y, double gamma, double w0) {
  if (gamma == 1.0) return std::log(w0) + 2.0 * std::log(x) - 0.5 * std::log(y);
  const double exponent = (1.0 - gamma * gamma) * std::log(x) + 0.5 * (gamma * gamma - gamma) * std::log(y);
  return std::pow(w0, 1.0 - gamma) / (1.0 - gamma) * std::exp(exponent);
}

double objective_value(const Weights& w, const MarketParams& params, double gamma, double w0) {
  require_positive(gamma, "gamma");
  require_positive(w0, "initial wealth");
  const Moments m = portfolio_moments(w, params);
  if (!(m.x > 0.0)) throw Error(ErrorCode::kOutsideDomain, "outside objective domain: w' mu <= 0");
  return utility_from_moments(m.x, m.v + m.x * m.x, gamma, w0);
}

CrraSolution power_solution(double gamma, const MarketParams& params, double w0) {
  return power_solution(gamma, params, efficient_constants(params), w0);
}

CrraSolution power_solution(double gamma, const MarketParams& params,
                            const FrontierConstants& constants, double w0) {
  require_positive(gamma, "gamma");
  require_positive(w0, "initial wealth");
  if (gamma == 1.0) return log_solution(params, constants, w0);
  require_slope(constants);
  const double sqrt_d = checked_sqrt_discriminant(discriminant(gamma, constants), gamma, constants.r_gmv);
  return finish(gamma, lower_root(gamma, sqrt_d, constants), params, constants, w0);
}

CrraSolution log_solution(const MarketParams& params, double w0) {
  return log_solution(params, efficient_constants(params), w0);
}

CrraSolution log_solution(const MarketParams& params, const FrontierConstants& c, double w0) {
  require_positive(w0, "initial wealth");
  require_slope(c);
  const double r2 = c.r_gmv * c.r_gmv;
  const double d = 9.0 * r2 - 8.0 * (1.0 + c.s) * (r2 + c.s * c.v_gmv);
  double sqrt_d;
  try {
    sqrt_d = checked_sqrt_discriminant(d, 1.0, c.r_gmv);
  } catch (const Error&) {
    throw Error(ErrorCode::kNoSolution, "log-utility solution does not exist for this market (gamma_min > 1)");
  }
  return finish(1.0, lower_root(1.0, sqrt_d, c), params, c, w0);
}

MonotonicityReport monotonicity_check(const MarketParams& params, std::span<const double> gammas) {
  const FrontierConstants c = efficient_constants(params);
  if (!(c.r_gmv > 0.0)) throw Error(ErrorCode::kInvalidArgument, "monotonicity check requires R_GMV > 0");
  for (std::size_t i = 1; i < gammas.size(); ++i) {
    if (!(gammas[i] > gammas[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "gamma grid must be strictly ascending");
    }
  }
  MonotonicityReport report;
  report.sharpe_x = sharpe_return(params);
  for (double gamma : gammas) {
    const CrraSolution sol = power_solution(gamma, params, c);
    MonotonicityRow row{gamma, sol.x, sol.v, sol.x >= report.sharpe_x};
    if (!report.rows.empty()) {
      report.x_decreasing = report.x_decreasing && row.x < report.rows.back().x;
      report.v_decreasing = report.v_decreasing && row.v < report.rows.back().v;
    }
    report.above_sharpe = report.above_sharpe && row.above_sharpe;
    report.rows.push_back(row);
  }
  return report;
}

namespace detail {

double discriminant_alt(double gamma, const FrontierConstants& c) {
  const double r2 = c.r_gmv * c.r_gmv;
  const double shifted = gamma - 2.0 * c.s;
  return shifted * shifted * r2 - 4.0 * (1.0 + c.s) * c.s * (r2 + (gamma + 1.0) * c.v_gmv);
}

double gamma_min_by_bisection(const FrontierConstants& c) {
  require_slope(c);
  if (c.r_gmv == 0.0) throw Error(ErrorCode::kInvalidArgument, "gamma_min undefined for R_GMV = 0");
  // D is a convex parabola in gamma, minimal at gamma* >= 2s with D(gamma*) < 0.
  double lo = 2.0 * c.s * (1.0 + (1.0 + c.s) * c.v_gmv / (c.r_gmv * c.r_gmv));
  double hi = 2.0 * c.s + 10.0;
  while (discriminant(hi, c) <= 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (discriminant(mid, c) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

}  // namespace lnport
