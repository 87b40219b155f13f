#include "lnport/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "lnport/error.hpp"

namespace lnport {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kSingularCovariance: return "singular_covariance";
    case ErrorCode::kDegenerateFrontier: return "degenerate_frontier";
    case ErrorCode::kUndefinedPortfolio: return "undefined_portfolio";
    case ErrorCode::kNoSolution: return "no_solution";
    case ErrorCode::kNonPositiveMean: return "non_positive_mean";
    case ErrorCode::kOutsideDomain: return "outside_domain";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-numeric cell at row " << row << ", column " << col << ": '" << cell << "'";
    throw Error(ErrorCode::kParse, msg.str());
  }
  return value;
}

void check_pd(const Eigen::LLT<Matrix>& llt, const Matrix& sigma) {
  const std::string msg = "singular covariance; need n > k and non-degenerate returns";
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularCovariance, msg);
  const double max_diag = sigma.diagonal().maxCoeff();
  const Matrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(pivot > kPivotTolerance * max_diag)) throw Error(ErrorCode::kSingularCovariance, msg);
  }
}

}  // namespace

ReturnMatrix::ReturnMatrix(Matrix values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.rows() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "n_periods >= 2 required");
  }
  if (values_.cols() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "n_assets >= 2 required");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "return matrix contains non-finite entries");
  }
  if (labels_.empty()) {
    labels_.reserve(n_assets());
    for (std::size_t j = 0; j < n_assets(); ++j) labels_.push_back("A" + std::to_string(j));
  } else if (labels_.size() != n_assets()) {
    throw Error(ErrorCode::kInvalidArgument, "label count does not match asset count");
  }
}

ReturnMatrix parse_returns_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;

    const auto cells = split(view, options.delimiter);
    if (header_pending) {
      header_pending = false;
      for (auto c : cells) labels.emplace_back(c);
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      std::ostringstream msg;
      msg << "ragged row at line " << line_no << ": expected " << width << " columns, got "
          << cells.size();
      throw Error(ErrorCode::kParse, msg.str());
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) row.push_back(parse_cell(cells[j], line_no, j + 1));
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure");
  if (rows.empty()) throw Error(ErrorCode::kParse, "no data rows");

  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return ReturnMatrix(std::move(values), std::move(labels));
}

ReturnMatrix load_returns_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_returns_csv(in, options);
}

void write_returns_csv(std::ostream& out, const ReturnMatrix& returns, char delimiter) {
  const auto& labels = returns.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j) out << delimiter;
    out << labels[j];
  }
  out << '\n';
  std::ostringstream cell;
  cell.precision(17);
  const Matrix& v = returns.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j) out << delimiter;
      cell.str({});
      cell << v(i, j);
      out << cell.str();
    }
    out << '\n';
  }
}

MarketParams::MarketParams(Vector mu, Matrix sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  const auto k = mu_.size();
  if (k < 1 || sigma_.rows() != k || sigma_.cols() != k) {
    throw Error(ErrorCode::kInvalidArgument, "mu/sigma dimension mismatch");
  }
  if (!mu_.allFinite() || !sigma_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "market parameters must be finite");
  }
  const double scale = sigma_.cwiseAbs().maxCoeff();
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "covariance matrix is not symmetric");
  }
  llt_.compute(sigma_);
  check_pd(llt_, sigma_);
}

Vector MarketParams::solve(const Vector& b) const { return llt_.solve(b); }
Matrix MarketParams::solve(const Matrix& b) const { return llt_.solve(b); }

MarketParams estimate_params(const ReturnMatrix& returns) {
  const Matrix gross = returns.values().array() + 1.0;
  const auto n = static_cast<double>(returns.n_periods());
  Vector mu = gross.colwise().mean().transpose();
  const Matrix centered = gross.rowwise() - mu.transpose();
  const auto k = static_cast<Eigen::Index>(returns.n_assets());
  Matrix sigma(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const double c = centered.col(a).dot(centered.col(b)) / (n - 1.0);
      sigma(a, b) = c;
      sigma(b, a) = c;
    }
  }
  return MarketParams(std::move(mu), std::move(sigma));
}

ReturnMatrix synth_market(const SynthSpec& spec, std::uint64_t seed) {
  const auto k = spec.mu0.size();
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "n_assets >= 2 required");
  if (spec.n_periods < 2) throw Error(ErrorCode::kInvalidArgument, "n_periods >= 2 required");
  // Validates shape, symmetry and positive definiteness of sigma0.
  const MarketParams target(spec.mu0, spec.sigma0);
  const Eigen::LLT<Matrix> llt(target.sigma());
  const Matrix l = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(spec.n_periods);
  Matrix values(n, k);
  Vector z(k);
  const Vector shift = spec.mu0.array() - 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) z(j) = normal(rng);
    values.row(i) = (shift + l * z).transpose();
  }
  return ReturnMatrix(std::move(values), spec.labels);
}

MarketParams subset(const MarketParams& params, std::span<const std::size_t> indices) {
  if (indices.size() < 2) throw Error(ErrorCode::kInvalidArgument, "subset needs at least 2 assets");
  std::unordered_set<std::size_t> seen;
  for (auto idx : indices) {
    if (idx >= params.k()) throw Error(ErrorCode::kInvalidArgument, "subset index out of range");
    if (!seen.insert(idx).second) throw Error(ErrorCode::kInvalidArgument, "duplicate subset index");
  }
  const auto m = static_cast<Eigen::Index>(indices.size());
  Vector mu(m);
  Matrix sigma(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto ia = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(a)]);
    mu(a) = params.mu()(ia);
    for (Eigen::Index b = 0; b < m; ++b) {
      sigma(a, b) = params.sigma()(ia, static_cast<Eigen::Index>(indices[static_cast<std::size_t>(b)]));
    }
  }
  return MarketParams(std::move(mu), std::move(sigma));
}

}  // namespace lnport
