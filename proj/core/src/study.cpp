#include "lnport/study.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lnport/crra.hpp"
#include "lnport/error.hpp"
#include "lnport/frontier.hpp"
#include "lnport/stats.hpp"

namespace lnport {

namespace {

using Json = nlohmann::ordered_json;

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

Vector json_vector(const Json& j, const char* name) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, std::string(name) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Matrix json_matrix(const Json& j, const char* name) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::kParse, std::string(name) + " must be a nested array");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::kParse, std::string(name) + " is ragged");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
  }
  return m;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

std::string join(const std::vector<std::size_t>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::string timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void validate(const StudyConfig& cfg) {
  if (cfg.data_csv.has_value() == cfg.synth_spec.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "exactly one of a CSV data file or a synth spec is required");
  }
  if (cfg.gammas.empty()) throw Error(ErrorCode::kInvalidArgument, "gamma grid is empty");
  for (double g : cfg.gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::kInvalidArgument, "gammas must be positive");
  }
  if (cfg.k_range.empty()) throw Error(ErrorCode::kInvalidArgument, "k range is empty");
  if (cfg.subset_cap < 1) throw Error(ErrorCode::kInvalidArgument, "subset cap must be >= 1");
  if (!(cfg.w0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "w0 must be positive");
  for (double q : cfg.quantiles) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "quantiles must lie in [0, 1]");
  }
}

struct SubsetContext {
  MarketParams params;
  FrontierConstants constants;
  Matrix gross;  // n x k gross returns of the subset
};

void evaluate_cell(StudyCell& cell, const SubsetContext& ctx, double w0) {
  const auto& c = ctx.constants;
  cell.r_gmv = c.r_gmv;
  cell.gamma_min = gamma_min(c);
  cell.exists = cell.gamma >= *cell.gamma_min;
  cell.efficient = is_mv_efficient_power(cell.gamma, c);
  if (!cell.exists) {
    cell.error = std::string(to_string(ErrorCode::kNoSolution));
    return;
  }
  const CrraSolution sol = power_solution(cell.gamma, ctx.params, c, w0);
  cell.x = sol.x;
  cell.v = sol.v;
  cell.utility_optimal = sol.expected_utility;

  const auto k = static_cast<Eigen::Index>(ctx.params.k());
  cell.utility_naive =
      objective_value(Weights(Vector::Constant(k, 1.0 / static_cast<double>(k))), ctx.params, cell.gamma, w0);
  cell.utility_sharpe = objective_value(sharpe_weights(ctx.params), ctx.params, cell.gamma, w0);

  const Vector realized = ctx.gross * sol.weights.values();
  if (realized.minCoeff() <= 0.0) {
    cell.error = std::string(to_string(ErrorCode::kOutsideDomain));
    return;
  }
  std::vector<double> logs(static_cast<std::size_t>(realized.size()));
  for (Eigen::Index t = 0; t < realized.size(); ++t) logs[static_cast<std::size_t>(t)] = std::log(realized(t));
  const TestResult sw = shapiro_wilk(logs);
  cell.sw_statistic = sw.statistic;
  cell.sw_p_value = sw.p_value;
}

}  // namespace

SynthSpec load_synth_spec(const std::filesystem::path& path, std::optional<std::uint64_t>* seed_out) {
  const Json j = read_json(path);
  try {
    SynthSpec spec;
    spec.n_periods = j.at("n").get<std::size_t>();
    spec.mu0 = json_vector(j.at("mu0"), "mu0");
    spec.sigma0 = json_matrix(j.at("sigma0"), "sigma0");
    if (j.contains("labels")) spec.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("k") && j.at("k").get<std::size_t>() != static_cast<std::size_t>(spec.mu0.size())) {
      throw Error(ErrorCode::kParse, "k does not match the length of mu0");
    }
    if (seed_out && j.contains("seed")) *seed_out = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

MarketParams load_market_json(const std::filesystem::path& path) {
  const Json j = read_json(path);
  try {
    return MarketParams(json_vector(j.at("mu"), "mu"), json_matrix(j.at("sigma"), "sigma"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

bool ecdf_dominates(const std::vector<double>& better, const std::vector<double>& worse) {
  if (better.empty() || worse.empty()) return true;
  const EmpiricalCdf fb(better);
  const EmpiricalCdf fw(worse);
  auto check = [&](const std::vector<double>& points) {
    return std::all_of(points.begin(), points.end(), [&](double x) { return fb(x) <= fw(x); });
  };
  return check(fb.sorted()) && check(fw.sorted());
}

std::vector<std::vector<std::size_t>> sample_subsets(std::size_t n, std::size_t k, std::size_t cap,
                                                     std::uint64_t seed) {
  if (k < 2 || k > n) throw Error(ErrorCode::kInvalidArgument, "subset size outside [2, n_assets]");
  std::vector<std::vector<std::size_t>> out;
  if (binomial(n, k) <= static_cast<double>(cap)) {
    // Lexicographic enumeration of all k-combinations.
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      out.push_back(idx);
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> pool(n);
  while (out.size() < cap) {
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<std::size_t> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.begin(), s.end());
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

StudyReport run_study(const StudyConfig& cfg) {
  validate(cfg);
  const ReturnMatrix returns = cfg.data_csv ? load_returns_csv(*cfg.data_csv, cfg.csv)
                                            : synth_market(load_synth_spec(*cfg.synth_spec), cfg.seed);
  const MarketParams full = estimate_params(returns);
  const std::size_t n_assets = returns.n_assets();
  for (auto k : cfg.k_range) {
    if (k < 2 || k > n_assets) throw Error(ErrorCode::kInvalidArgument, "k range must lie within [2, n_assets]");
  }

  StudyReport report;
  report.config = cfg;
  report.n_periods = returns.n_periods();
  report.n_assets = n_assets;
  report.asset_labels = returns.labels();
  const Matrix gross_all = returns.values().array() + 1.0;

  auto make_context = [&](const std::vector<std::size_t>& idx) {
    MarketParams p = subset(full, idx);
    FrontierConstants c = efficient_constants(p);
    Matrix g(gross_all.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = gross_all.col(static_cast<Eigen::Index>(idx[j]));
    return SubsetContext{std::move(p), std::move(c), std::move(g)};
  };

  for (auto k : cfg.k_range) {
    const auto subsets = sample_subsets(n_assets, k, cfg.subset_cap, cfg.seed);
    const std::size_t first_cell = report.cells.size();
    for (std::size_t id = 0; id < subsets.size(); ++id) {
      std::optional<SubsetContext> ctx;
      std::string subset_error;
      try {
        ctx.emplace(make_context(subsets[id]));
      } catch (const Error& e) {
        subset_error = std::string(to_string(e.code()));
      }
      for (double gamma : cfg.gammas) {
        StudyCell cell;
        cell.k = k;
        cell.subset_id = id;
        cell.assets = subsets[id];
        cell.gamma = gamma;
        if (!ctx) {
          cell.error = subset_error;
        } else {
          try {
            evaluate_cell(cell, *ctx, cfg.w0);
          } catch (const Error& e) {
            cell.error = std::string(to_string(e.code()));
          }
        }
        report.cells.push_back(std::move(cell));
      }
    }

    for (double gamma : cfg.gammas) {
      StudySummaryRow row;
      row.k = k;
      row.gamma = gamma;
      std::vector<double> pvals;
      std::vector<double> u_opt;
      std::vector<double> u_naive;
      std::vector<double> u_sharpe;
      std::size_t below = 0;
      std::size_t not_efficient = 0;
      for (std::size_t i = first_cell; i < report.cells.size(); ++i) {
        const StudyCell& cell = report.cells[i];
        if (cell.gamma != gamma) continue;
        ++row.n_subsets;
        if (!cell.exists) ++below;
        if (!cell.efficient) ++not_efficient;
        if (cell.x) ++row.n_solved;
        if (cell.sw_p_value) pvals.push_back(*cell.sw_p_value);
        if (cell.utility_optimal && cell.utility_naive && cell.utility_sharpe) {
          u_opt.push_back(*cell.utility_optimal);
          u_naive.push_back(*cell.utility_naive);
          u_sharpe.push_back(*cell.utility_sharpe);
        }
      }
      const double denom = static_cast<double>(std::max<std::size_t>(row.n_subsets, 1));
      row.rate_gamma_below_min = static_cast<double>(below) / denom;
      row.rate_not_efficient = static_cast<double>(not_efficient) / denom;
      row.n_screened = pvals.size();
      if (!pvals.empty()) {
        for (double q : cfg.quantiles) row.p_value_quantiles.push_back(quantile(pvals, q));
      }
      row.optimal_dominates_naive = ecdf_dominates(u_opt, u_naive);
      row.optimal_dominates_sharpe = ecdf_dominates(u_opt, u_sharpe);
      report.summary.push_back(std::move(row));
    }

    // Frontier locations for the first k assets in file order.
    std::vector<std::size_t> leading(k);
    std::iota(leading.begin(), leading.end(), 0);
    try {
      const SubsetContext ctx = make_context(leading);
      const Moments gmv = portfolio_moments(gmv_weights(ctx.params), ctx.params);
      report.frontier.push_back({k, "gmv", 0.0, gmv.x, gmv.v});
      const Moments sharpe = portfolio_moments(sharpe_weights(ctx.params), ctx.params);
      report.frontier.push_back({k, "sharpe", 0.0, sharpe.x, sharpe.v});
      for (double gamma : cfg.gammas) {
        try {
          const CrraSolution sol = power_solution(gamma, ctx.params, ctx.constants, cfg.w0);
          report.frontier.push_back({k, "optimal", gamma, sol.x, sol.v});
        } catch (const Error&) {
          // No optimum for this gamma; the cell table already records why.
        }
      }
    } catch (const Error&) {
    }
  }
  return report;
}

void write_study(const StudyReport& report) {
  const StudyConfig& cfg = report.config;
  std::filesystem::create_directories(cfg.output_dir);
  auto open = [&](const char* name) {
    std::ofstream out(cfg.output_dir / name);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (cfg.output_dir / name).string());
    return out;
  };

  {
    auto out = open("cells.csv");
    out << "k,subset_id,assets,gamma,gamma_min,r_gmv,exists,efficient,x,v,utility_optimal,"
           "utility_sharpe,utility_naive,sw_statistic,sw_p_value,error\n";
    for (const auto& c : report.cells) {
      out << c.k << ',' << c.subset_id << ',' << join(c.assets, ';') << ',' << num(c.gamma) << ','
          << num(c.gamma_min) << ',' << num(c.r_gmv) << ',' << c.exists << ',' << c.efficient << ','
          << num(c.x) << ',' << num(c.v) << ',' << num(c.utility_optimal) << ',' << num(c.utility_sharpe)
          << ',' << num(c.utility_naive) << ',' << num(c.sw_statistic) << ',' << num(c.sw_p_value) << ','
          << c.error << '\n';
    }
  }
  {
    auto out = open("conditions.csv");
    out << "k,gamma,n_subsets,rate_gamma_below_min,rate_not_efficient,n_solved\n";
    for (const auto& r : report.summary) {
      out << r.k << ',' << num(r.gamma) << ',' << r.n_subsets << ',' << num(r.rate_gamma_below_min) << ','
          << num(r.rate_not_efficient) << ',' << r.n_solved << '\n';
    }
  }
  {
    auto out = open("pvalue_quantiles.csv");
    out << "k,gamma,n_screened";
    for (double q : cfg.quantiles) out << ",q" << num(q);
    out << '\n';
    for (const auto& r : report.summary) {
      out << r.k << ',' << num(r.gamma) << ',' << r.n_screened;
      for (std::size_t i = 0; i < cfg.quantiles.size(); ++i) {
        out << ',';
        if (i < r.p_value_quantiles.size()) out << num(r.p_value_quantiles[i]);
      }
      out << '\n';
    }
  }
  {
    auto out = open("frontier.csv");
    out << "k,portfolio,gamma,x,v\n";
    for (const auto& f : report.frontier) {
      out << f.k << ',' << f.portfolio << ',' << num(f.gamma) << ',' << num(f.x) << ',' << num(f.v) << '\n';
    }
  }
  {
    auto out = open("ecdf.csv");
    out << "k,gamma,strategy,utility,ecdf\n";
    std::map<std::pair<std::size_t, double>, std::array<std::vector<double>, 3>> groups;
    for (const auto& c : report.cells) {
      if (!(c.utility_optimal && c.utility_naive && c.utility_sharpe)) continue;
      auto& g = groups[{c.k, c.gamma}];
      g[0].push_back(*c.utility_naive);
      g[1].push_back(*c.utility_sharpe);
      g[2].push_back(*c.utility_optimal);
    }
    static constexpr const char* kNames[] = {"naive", "sharpe", "optimal"};
    for (const auto& [key, samples] : groups) {
      for (std::size_t s = 0; s < 3; ++s) {
        const EmpiricalCdf f(samples[s]);
        for (double u : f.sorted()) {
          out << key.first << ',' << num(key.second) << ',' << kNames[s] << ',' << num(u) << ',' << num(f(u)) << '\n';
        }
      }
    }
  }

  Json summary;
  summary["schema_version"] = kStudySchemaVersion;
  Json meta;
  meta["generated_at"] = timestamp();
  meta["seed"] = cfg.seed;
  meta["data_source"] = cfg.data_csv ? "csv" : "synth";
  meta["data_path"] = cfg.data_csv ? cfg.data_csv->string() : cfg.synth_spec->string();
  meta["n_periods"] = report.n_periods;
  meta["n_assets"] = report.n_assets;
  meta["asset_labels"] = report.asset_labels;
  meta["subset_policy"] =
      "per k: all C(n,k) subsets when C(n,k) <= subset_cap, otherwise subset_cap distinct subsets "
      "sampled uniformly without replacement";
  Json config;
  config["k_range"] = cfg.k_range;
  config["gammas"] = cfg.gammas;
  config["subset_cap"] = cfg.subset_cap;
  config["w0"] = cfg.w0;
  config["quantiles"] = cfg.quantiles;
  meta["config"] = config;
  summary["metadata"] = meta;

  Json rows = Json::array();
  for (const auto& r : report.summary) {
    Json row;
    row["k"] = r.k;
    row["gamma"] = r.gamma;
    row["n_subsets"] = r.n_subsets;
    row["rate_gamma_below_min"] = r.rate_gamma_below_min;
    row["rate_not_efficient"] = r.rate_not_efficient;
    row["n_solved"] = r.n_solved;
    row["n_screened"] = r.n_screened;
    row["p_value_quantiles"] = r.p_value_quantiles;
    row["optimal_dominates_naive"] = r.optimal_dominates_naive;
    row["optimal_dominates_sharpe"] = r.optimal_dominates_sharpe;
    rows.push_back(std::move(row));
  }
  summary["cells"] = rows;
  std::size_t errors = 0;
  std::map<std::string, std::size_t> by_code;
  for (const auto& c : report.cells) {
    if (!c.error.empty()) {
      ++errors;
      ++by_code[c.error];
    }
  }
  summary["n_cells"] = report.cells.size();
  summary["n_cell_errors"] = errors;
  summary["cell_errors_by_code"] = by_code;

  auto out = open("summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace lnport
