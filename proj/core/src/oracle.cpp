#include "lnport/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lnport/error.hpp"

namespace lnport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Expected utility of the full portfolio, written out here rather than taken
// from the crra module so the oracle shares nothing with the closed form.
double expected_utility(double x, double y, double gamma, double w0) {
  if (gamma == 1.0) return std::log(w0) + 2.0 * std::log(x) - 0.5 * std::log(y);
  const double e = (1.0 - gamma * gamma) * std::log(x) + 0.5 * (gamma * gamma - gamma) * std::log(y);
  return std::pow(w0, 1.0 - gamma) / (1.0 - gamma) * std::exp(e);
}

Vector expand(const Vector& u) {
  Vector w(u.size() + 1);
  w.head(u.size()) = u;
  w(u.size()) = 1.0 - u.sum();
  return w;
}

}  // namespace

void OracleConfig::validate() const {
  if (n_starts < 1) throw Error(ErrorCode::kInvalidArgument, "oracle needs n_starts >= 1");
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "oracle needs max_iters >= 1");
  if (!(tol_obj > 0.0) || !(tol_w > 0.0) || !(max_cv > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "oracle tolerances must be positive");
  }
}

SimplexResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                          const SimplexOptions& options) {
  const auto n = x0.size();
  const double dim = static_cast<double>(std::max<Eigen::Index>(n, 1));
  // Gao & Han (2012) adaptive coefficients.
  const double reflect = 1.0;
  const double expand_coef = 1.0 + 2.0 / dim;
  const double contract = 0.75 - 0.5 / dim;
  const double shrink = 1.0 - 1.0 / dim;

  std::vector<Vector> pts(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> vals(pts.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double step = x0(i) != 0.0 ? options.initial_step * std::max(1.0, std::abs(x0(i)))
                                     : options.initial_step;
    pts[static_cast<std::size_t>(i) + 1](i) += step;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(pts.size());
  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).cwiseAbs().maxCoeff());
    const double spread = vals[worst] - vals[best];
    if (std::isfinite(spread) &&
        spread <= options.f_tol * std::max(std::abs(vals[best]), 1e-300) &&
        diameter <= options.x_tol) {
      break;
    }
    if (diameter < 1e-15 * std::max(1.0, pts[best].cwiseAbs().maxCoeff())) break;

    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != worst) centroid += pts[i];
    centroid /= dim;

    const Vector xr = centroid + reflect * (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < vals[best]) {
      const Vector xe = centroid + expand_coef * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (fr < vals[worst]) {
      const Vector xc = centroid + contract * (xr - centroid);
      const double fc = f(xc);
      if (fc <= fr) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
    } else {
      const Vector xc = centroid - contract * (centroid - pts[worst]);
      const double fc = f(xc);
      if (fc < vals[worst]) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + shrink * (pts[i] - pts[best]);
      vals[i] = f(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], iter};
}

FeasibleDraws random_feasible(const MarketParams& params, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "random_feasible needs n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 3.0);
  const auto k = static_cast<Eigen::Index>(params.k());
  FeasibleDraws out;
  out.draws.reserve(n);
  Vector w(k);
  for (std::size_t i = 0; i < n; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
      for (Eigen::Index j = 0; j + 1 < k; ++j) w(j) = box(rng);
      w(k - 1) = 1.0 - w.head(k - 1).sum();
      accepted = w.dot(params.mu()) > 0.0;
    }
    if (accepted) {
      out.draws.emplace_back(w);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

MarketParams random_market(std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "random_market needs k >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(k);
  Vector mu(n);
  Vector vol(n);
  Matrix factors(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vol(i) = 0.05 + 0.15 * unit(rng);
    mu(i) = 1.01 + 0.02 * normal(rng);
    for (Eigen::Index j = 0; j < n; ++j) factors(i, j) = normal(rng);
  }
  Matrix corr = factors * factors.transpose() + static_cast<double>(k) * Matrix::Identity(n, n);
  const Vector scale = corr.diagonal().cwiseSqrt().cwiseInverse();
  corr = scale.asDiagonal() * corr * scale.asDiagonal();
  Matrix sigma = vol.asDiagonal() * corr * vol.asDiagonal();
  sigma = 0.5 * (sigma + sigma.transpose());
  return MarketParams(std::move(mu), std::move(sigma));
}

OracleResult maximize_numeric(const MarketParams& params, double gamma, const OracleConfig& cfg, double w0) {
  cfg.validate();
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  if (!(w0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "initial wealth must be positive");
  const auto k = static_cast<Eigen::Index>(params.k());
  const Vector& mu = params.mu();
  const Matrix& sigma = params.sigma();

  auto neg_utility = [&](const Vector& u) {
    const Vector w = expand(u);
    const double x = w.dot(mu);
    if (!(x > 1e-10)) return kInf;
    const double v = std::max(0.0, w.dot(sigma * w));
    if (std::sqrt(v) > cfg.max_cv * x) return kInf;
    const double value = -expected_utility(x, v + x * x, gamma, w0);
    return std::isnan(value) ? kInf : value;
  };

  std::vector<Vector> starts;
  const Vector ones = Vector::Ones(k);
  const Vector inv_ones = params.solve(ones);
  starts.push_back(inv_ones / inv_ones.sum());
  const Vector inv_mu = params.solve(mu);
  if (std::abs(inv_mu.sum()) > 1e-300) starts.push_back(inv_mu / inv_mu.sum());
  starts.push_back(ones / static_cast<double>(k));
  if (cfg.n_starts > 3) {
    const auto extra = random_feasible(params, static_cast<std::size_t>(cfg.n_starts - 3), cfg.seed);
    for (const auto& d : extra.draws) starts.push_back(d.values());
  }
  if (starts.size() > static_cast<std::size_t>(cfg.n_starts)) starts.resize(static_cast<std::size_t>(cfg.n_starts));

  SimplexOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.f_tol = cfg.tol_obj * 1e-3;
  opts.x_tol = cfg.tol_w * 1e-5;

  // A run that ends against the cv barrier has not found a stationary point:
  // the objective keeps improving toward the barrier, so it is discarded.
  auto on_barrier = [&](const Vector& u) {
    const Vector w = expand(u);
    const double x = w.dot(mu);
    return std::sqrt(std::max(0.0, w.dot(sigma * w))) >= cfg.max_cv * x * (1.0 - 1e-6);
  };

  Vector best_u;
  double best_f = kInf;
  int feasible = 0;
  int on_boundary = 0;
  for (const Vector& start : starts) {
    Vector u = start.head(k - 1);
    if (!std::isfinite(neg_utility(u))) continue;
    ++feasible;
    opts.initial_step = 0.05;
    SimplexResult run = nelder_mead(neg_utility, u, opts);
    // Restart from the incumbent with a fresh simplex until it stops moving;
    // plain Nelder-Mead can stall on a degenerate simplex.
    for (int restart = 0; restart < 20; ++restart) {
      opts.initial_step = 1e-3;
      const SimplexResult again = nelder_mead(neg_utility, run.x, opts);
      const double gain = run.f - again.f;
      const double moved = (again.x - run.x).cwiseAbs().maxCoeff();
      if (again.f <= run.f) run = again;
      if (gain <= 1e-15 * std::abs(run.f) && moved <= opts.x_tol) break;
    }
    if (on_barrier(run.x)) {
      ++on_boundary;
      continue;
    }
    if (run.f < best_f) {
      best_f = run.f;
      best_u = run.x;
    }
  }
  if (feasible == 0) throw Error(ErrorCode::kOutsideDomain, "objective domain empty along search");
  if (!std::isfinite(best_f)) {
    throw Error(ErrorCode::kNoSolution, "every search run ended on the cv barrier; no interior maximum found");
  }
  return {Weights(expand(best_u)), -best_f, feasible, on_boundary};
}

}  // namespace lnport
