#pragma once

#include <span>
#include <vector>

#include "lnport/frontier.hpp"
#include "lnport/market.hpp"

namespace lnport {

/// Optimal portfolio for a CRRA investor under the log-normal approximation of
/// the portfolio gross return. gamma == 1 denotes logarithmic utility.
struct CrraSolution {
  double gamma = 0.0;
  double x = 0.0;  // optimal expected gross return
  double y = 0.0;  // second moment E[(w'R)^2] = v + x^2
  double v = 0.0;  // variance
  Weights weights;
  double expected_utility = 0.0;
  bool mv_efficient = false;
  double w0 = 1.0;
};

/// Smallest relative risk aversion for which the power-utility optimum exists.
/// Requires s > kMinSlope and R_GMV != 0.
double gamma_min(const FrontierConstants& constants);

/// D(gamma) = (gamma+2)^2 R^2 - 4 (gamma+1)(1+s)(R^2 + s V). The optimum
/// exists iff D >= 0.
double discriminant(double gamma, const FrontierConstants& constants);

/// Existence data for one market.
struct GammaCondition {
  double gamma_min = 0.0;
  bool r_gmv_positive = false;

  bool exists(double gamma) const noexcept { return gamma >= gamma_min; }
};

GammaCondition gamma_condition(const FrontierConstants& constants);

/// Mean-variance efficiency of the power-utility optimum:
/// gamma >= gamma_min and R_GMV > 0.
bool is_mv_efficient_power(double gamma, const FrontierConstants& constants);

/// Closed-form power-utility optimum. gamma == 1 dispatches to log_solution.
/// Throws kNoSolution below gamma_min and kNonPositiveMean when the selected
/// root is not positive (only possible for R_GMV <= 0).
CrraSolution power_solution(double gamma, const MarketParams& params, double w0 = 1.0);
CrraSolution power_solution(double gamma, const MarketParams& params,
                            const FrontierConstants& constants, double w0 = 1.0);

/// Closed-form log-utility optimum; requires gamma_min <= 1.
CrraSolution log_solution(const MarketParams& params, double w0 = 1.0);
CrraSolution log_solution(const MarketParams& params, const FrontierConstants& constants,
                          double w0 = 1.0);

/// Expected utility of an arbitrary feasible portfolio under the log-normal
/// model. Throws kOutsideDomain when w' mu <= 0.
double objective_value(const Weights& w, const MarketParams& params, double gamma, double w0 = 1.0);

/// Expected utility as a function of the portfolio mean x and second moment y.
double utility_from_moments(double x, double y, double gamma, double w0 = 1.0);

struct MonotonicityRow {
  double gamma = 0.0;
  double x = 0.0;
  double v = 0.0;
  bool above_sharpe = false;
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;
  double sharpe_x = 0.0;
  bool x_decreasing = true;
  bool v_decreasing = true;
  bool above_sharpe = true;

  bool passed() const noexcept { return x_decreasing && v_decreasing && above_sharpe; }
};

/// Evaluates the power-utility optimum along an ascending gamma grid and
/// checks that X and V strictly decrease and that X stays at or above the
/// Sharpe portfolio's mean. Requires R_GMV > 0 and every gamma >= gamma_min.
MonotonicityReport monotonicity_check(const MarketParams& params, std::span<const double> gammas);

namespace detail {

/// gamma_min recomputed by bisection on the sign change of D; self-check only.
double gamma_min_by_bisection(const FrontierConstants& constants);

/// D in the alternative arrangement (gamma - 2s)^2 R^2 - 4(1+s)s(R^2 + (gamma+1)V).
double discriminant_alt(double gamma, const FrontierConstants& constants);

}  // namespace detail

}  // namespace lnport
