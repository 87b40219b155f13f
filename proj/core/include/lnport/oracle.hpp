#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lnport/frontier.hpp"
#include "lnport/market.hpp"

namespace lnport {

struct OracleConfig {
  int n_starts = 16;
  int max_iters = 50000;  // per simplex run
  double tol_obj = 1e-12;
  double tol_w = 1e-6;
  std::uint64_t seed = 20240917;
  /// Search is confined to portfolios with sqrt(V)/X <= max_cv, the regime
  /// where the log-normal approximation is meaningful. Far outside it the
  /// expected-utility formula creeps back toward its supremum at infinity.
  double max_cv = 1.0;

  void validate() const;
};

struct OracleResult {
  Weights weights;
  double objective = 0.0;
  int feasible_starts = 0;
  int boundary_runs = 0;  // runs discarded for ending on the cv barrier
};

/// Brute-force maximizer of the log-normal expected utility over w'1 = 1.
/// The constraint is eliminated by substitution, w = (u, 1 - sum u), and the
/// reduced problem is solved with a restarted Nelder-Mead simplex from GMV,
/// Sharpe, equal weights and seeded random feasible starts. The result is the
/// best interior local maximum: runs that end on the max_cv barrier are
/// dropped, since for gamma > 1 the objective creeps toward its supremum at
/// infinity and for gamma < 1 it is unbounded. Throws kNoSolution when every
/// run ends on the barrier.
OracleResult maximize_numeric(const MarketParams& params, double gamma, const OracleConfig& cfg = {},
                              double w0 = 1.0);

struct FeasibleDraws {
  std::vector<Weights> draws;
  std::size_t skipped = 0;  // draws abandoned after 100 tries with w'mu <= 0
};

/// n feasible portfolios with w'mu > 0: the first k-1 entries are uniform on
/// [-2, 3] and the last closes the budget.
FeasibleDraws random_feasible(const MarketParams& params, std::size_t n, std::uint64_t seed);

/// Random verification market: gross means 1 + N(0.01, 0.02^2), volatilities
/// uniform on [0.05, 0.2], correlations from a diagonally loaded Gaussian
/// factor matrix. Deterministic in seed.
MarketParams random_market(std::size_t k, std::uint64_t seed);

/// Minimal derivative-free minimizer used by the oracle.
struct SimplexOptions {
  int max_iters = 50000;
  double initial_step = 0.05;
  double f_tol = 1e-15;  // relative spread of simplex values
  double x_tol = 1e-11;  // simplex diameter
};

struct SimplexResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
};

/// Nelder-Mead with dimension-adaptive coefficients. `f` may return +inf to
/// mark points outside the domain; `x0` must be finite-valued.
SimplexResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                          const SimplexOptions& options);

}  // namespace lnport
