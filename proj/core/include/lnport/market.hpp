#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace lnport {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n x k matrix of simple (net) returns, one row per period, one column per
/// asset.
class ReturnMatrix {
 public:
  /// Throws Error(kInvalidArgument) unless n >= 2, k >= 2, every entry is
  /// finite and the label count is 0 or k. Missing labels become "A0", "A1"...
  ReturnMatrix(Matrix values, std::vector<std::string> labels = {});

  std::size_t n_periods() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t n_assets() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  Matrix values_;
  std::vector<std::string> labels_;
};

struct CsvOptions {
  char delimiter = ',';
  bool header = false;
};

ReturnMatrix load_returns_csv(const std::filesystem::path& path, const CsvOptions& options = {});
ReturnMatrix parse_returns_csv(std::istream& in, const CsvOptions& options = {});
void write_returns_csv(std::ostream& out, const ReturnMatrix& returns, char delimiter = ',');

/// Mean vector and covariance matrix of gross returns R = 1 + r.
///
/// Construction validates symmetry (relative 1e-10) and positive definiteness.
/// The Cholesky factor is kept so every Sigma^{-1} x downstream is a pair of
/// triangular solves.
class MarketParams {
 public:
  MarketParams(Vector mu, Matrix sigma);

  std::size_t k() const noexcept { return static_cast<std::size_t>(mu_.size()); }
  const Vector& mu() const noexcept { return mu_; }
  const Matrix& sigma() const noexcept { return sigma_; }

  /// Sigma^{-1} b.
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

 private:
  Vector mu_;
  Matrix sigma_;
  Eigen::LLT<Matrix> llt_;
};

/// Smallest accepted Cholesky pivot relative to the largest diagonal entry.
inline constexpr double kPivotTolerance = 1e-12;

/// Sample mean (plus one) and unbiased sample covariance of the return rows.
MarketParams estimate_params(const ReturnMatrix& returns);

struct SynthSpec {
  std::size_t n_periods = 0;
  Vector mu0;     // gross-return means
  Matrix sigma0;  // covariance, must be PD
  std::vector<std::string> labels;
};

/// i.i.d. multivariate normal simple returns with mean mu0 - 1 and covariance
/// sigma0. Deterministic in `seed`.
ReturnMatrix synth_market(const SynthSpec& spec, std::uint64_t seed);

/// Restriction of (mu, Sigma) to the given assets, in the given order.
MarketParams subset(const MarketParams& params, std::span<const std::size_t> indices);

}  // namespace lnport
