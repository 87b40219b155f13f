// lnport: command-line front end for the lnport library.
//
// Every subcommand prints its result on stdout. Failures print one JSON
// object {"error": {"code": ..., "message": ...}} on stderr and exit nonzero:
// 1 for library and data errors, 2 for usage errors, 3 when a check
// (verify, cdf-gap) ran to completion but did not pass.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lnport/crra.hpp"
#include "lnport/error.hpp"
#include "lnport/frontier.hpp"
#include "lnport/lognormal.hpp"
#include "lnport/market.hpp"
#include "lnport/oracle.hpp"
#include "lnport/study.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace lnport;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;

void print_error(std::string_view code, std::string_view message) {
  Json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  std::cerr << j.dump() << '\n';
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// Market given either as {"mu", "sigma"} JSON or as a return CSV to estimate from.
struct MarketInput {
  std::string market_json;
  std::string data_csv;
  bool header = false;
  char delimiter = ',';

  void add_to(CLI::App& cmd) {
    auto* m = cmd.add_option("--market", market_json, "JSON file with gross-return mean and covariance")
                  ->check(CLI::ExistingFile)
                  ->envname("LNPORT_MARKET");
    auto* d = cmd.add_option("--data", data_csv, "CSV of simple returns (rows periods, columns assets)")
                  ->check(CLI::ExistingFile)
                  ->envname("LNPORT_DATA");
    m->excludes(d);
    cmd.add_flag("--header", header, "CSV has a header row of asset labels")->envname("LNPORT_HEADER");
    cmd.add_option("--delimiter", delimiter, "CSV field delimiter")->envname("LNPORT_DELIMITER");
  }

  MarketParams load(std::vector<std::string>* labels = nullptr) const {
    if (!market_json.empty()) return load_market_json(market_json);
    if (data_csv.empty()) throw Error(ErrorCode::kInvalidArgument, "one of --market or --data is required");
    const ReturnMatrix r = load_returns_csv(data_csv, {delimiter, header});
    if (labels) *labels = r.labels();
    return estimate_params(r);
  }
};

Json constants_json(const FrontierConstants& c) {
  Json j;
  j["r_gmv"] = c.r_gmv;
  j["v_gmv"] = c.v_gmv;
  j["s"] = c.s;
  j["gmv_weights"] = to_json(c.gmv_weights);
  return j;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  MarketInput market;
  double gamma = 0.0;
  double w0 = 1.0;
};

int run_solve(const SolveArgs& a) {
  std::vector<std::string> labels;
  const MarketParams params = a.market.load(&labels);
  const FrontierConstants c = efficient_constants(params);
  Json out;
  out["gamma"] = a.gamma;
  out["w0"] = a.w0;
  out["constants"] = constants_json(c);
  const GammaCondition cond = gamma_condition(c);
  out["gamma_min"] = cond.gamma_min;
  out["r_gmv_positive"] = cond.r_gmv_positive;
  out["discriminant"] = discriminant(a.gamma, c);
  const CrraSolution sol = a.gamma == 1.0 ? log_solution(params, c, a.w0) : power_solution(a.gamma, params, c, a.w0);
  out["x"] = sol.x;
  out["y"] = sol.y;
  out["v"] = sol.v;
  out["weights"] = to_json(sol.weights.values());
  if (!labels.empty()) out["labels"] = labels;
  out["expected_utility"] = sol.expected_utility;
  out["mv_efficient"] = sol.mv_efficient;
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------- frontier

struct FrontierArgs {
  MarketInput market;
  int points = 101;
  std::optional<double> x_min;
  std::optional<double> x_max;
};

int run_frontier(const FrontierArgs& a) {
  if (a.points < 2) throw Error(ErrorCode::kInvalidArgument, "--points must be >= 2");
  const MarketParams params = a.market.load();
  const FrontierConstants c = efficient_constants(params);
  const double sharpe_x = sharpe_return(params);
  const double span = std::max(std::abs(sharpe_x - c.r_gmv), std::sqrt(c.v_gmv));
  const double lo = a.x_min.value_or(c.r_gmv - 2.0 * span);
  const double hi = a.x_max.value_or(c.r_gmv + 2.0 * span);
  if (!(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "--x-max must exceed --x-min");

  std::cout << "# r_gmv=" << num(c.r_gmv) << " v_gmv=" << num(c.v_gmv) << " s=" << num(c.s)
            << " sharpe_x=" << num(sharpe_x) << '\n';
  std::cout << "x,v,sd,efficient\n";
  for (int i = 0; i < a.points; ++i) {
    const double x = lo + (hi - lo) * i / (a.points - 1);
    const double v = parabola_variance(x, c);
    std::cout << num(x) << ',' << num(v) << ',' << num(std::sqrt(v)) << ',' << (x >= c.r_gmv) << '\n';
  }
  return 0;
}

// --------------------------------------------------------------- verify

struct VerifyArgs {
  MarketInput market;
  int random = 0;
  std::size_t k_min = 2;
  std::size_t k_max = 8;
  std::vector<double> gammas;
  double gamma_min_offset = 0.1;
  std::uint64_t seed = 1;
  double tol_w = 1e-5;
  double tol_gap = 1e-9;
};

Json verify_market(const MarketParams& params, const VerifyArgs& a, bool& ok) {
  const FrontierConstants c = efficient_constants(params);
  Json market;
  market["k"] = params.k();
  market["constants"] = constants_json(c);
  const double gmin = gamma_min(c);
  market["gamma_min"] = gmin;
  std::vector<double> gammas{gmin + a.gamma_min_offset};
  gammas.insert(gammas.end(), a.gammas.begin(), a.gammas.end());

  Json rows = Json::array();
  for (double gamma : gammas) {
    Json row;
    row["gamma"] = gamma;
    if (gamma < gmin) {
      row["status"] = "below_gamma_min";
      rows.push_back(std::move(row));
      continue;
    }
    try {
      const CrraSolution sol = power_solution(gamma, params, c);
      const OracleResult num_opt = maximize_numeric(params, gamma);
      const double w_err = (sol.weights.values() - num_opt.weights.values()).cwiseAbs().maxCoeff();
      const double gap = (num_opt.objective - sol.expected_utility) / std::abs(sol.expected_utility);
      const bool pass = w_err <= a.tol_w && gap <= a.tol_gap;
      row["status"] = pass ? "pass" : "fail";
      row["weight_error"] = w_err;
      row["relative_gap"] = gap;
      row["closed_form_utility"] = sol.expected_utility;
      row["oracle_utility"] = num_opt.objective;
      ok = ok && pass;
    } catch (const Error& e) {
      row["status"] = "error";
      row["error"] = to_string(e.code());
      row["message"] = e.what();
      ok = false;
    }
    rows.push_back(std::move(row));
  }
  market["rows"] = rows;
  return market;
}

int run_verify(const VerifyArgs& a) {
  const bool from_file = !a.market.market_json.empty() || !a.market.data_csv.empty();
  if (from_file == (a.random > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "give either --market/--data or --random N");
  }
  if (a.k_min < 2 || a.k_max < a.k_min) throw Error(ErrorCode::kInvalidArgument, "need 2 <= --k-min <= --k-max");
  bool ok = true;
  Json out;
  out["tol_w"] = a.tol_w;
  out["tol_gap"] = a.tol_gap;
  Json markets = Json::array();
  if (from_file) {
    markets.push_back(verify_market(a.market.load(), a, ok));
  } else {
    const std::size_t span = a.k_max - a.k_min + 1;
    for (int i = 0; i < a.random; ++i) {
      const std::size_t k = a.k_min + static_cast<std::size_t>(i) % span;
      Json m = verify_market(random_market(k, a.seed + static_cast<std::uint64_t>(i)), a, ok);
      m["seed"] = a.seed + static_cast<std::uint64_t>(i);
      markets.push_back(std::move(m));
    }
  }
  out["markets"] = markets;
  out["passed"] = ok;
  std::cout << out.dump(2) << '\n';
  return ok ? 0 : kExitCheckFailed;
}

// -------------------------------------------------------------- cdf-gap

struct CdfGapArgs {
  double mu = 1.0;
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.01};
  int grid = 10000;
};

int run_cdf_gap(CdfGapArgs a) {
  if (a.ladder.empty()) throw Error(ErrorCode::kInvalidArgument, "ladder is empty");
  std::sort(a.ladder.begin(), a.ladder.end(), std::greater<>());
  std::cout << "cv,sigma,bound,empirical,bound_over_cv\n";
  bool ok = true;
  double prev_bound = INFINITY;
  double prev_emp = INFINITY;
  for (double cv : a.ladder) {
    if (!(cv > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ladder values must be positive");
    const double sigma = cv * a.mu;
    const double bound = psi_sup_bound(a.mu, sigma);
    const double emp = psi_sup_empirical(a.mu, sigma, a.grid);
    std::cout << num(cv) << ',' << num(sigma) << ',' << num(bound) << ',' << num(emp) << ','
              << num(bound / cv) << '\n';
    ok = ok && emp <= bound && bound < prev_bound && emp < prev_emp;
    prev_bound = bound;
    prev_emp = emp;
  }
  if (!ok) {
    print_error("check_failed", "empirical sup exceeds the bound or the ladder is not monotone");
    return kExitCheckFailed;
  }
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  std::optional<std::uint64_t> spec_seed;
  const SynthSpec spec = load_synth_spec(a.spec, &spec_seed);
  const ReturnMatrix r = synth_market(spec, a.seed.value_or(spec_seed.value_or(1)));
  if (a.out.empty()) {
    write_returns_csv(std::cout, r);
    return 0;
  }
  std::ofstream file(a.out);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + a.out);
  write_returns_csv(file, r);
  return 0;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
  std::string data;
  std::string synth;
  bool header = false;
  char delimiter = ',';
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> k_range;
  std::vector<double> gammas{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t subset_cap = 200;
  double w0 = 1.0;
  std::string out = "study_out";
  std::vector<double> quantiles{0.05, 0.10, 0.15, 0.20, 0.25};
};

// "4-14" or "4,6,8" or a mix such as "2,4-6".
std::vector<std::size_t> parse_k_range(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoul(part));
      } else {
        const std::size_t lo = std::stoul(part.substr(0, dash));
        const std::size_t hi = std::stoul(part.substr(dash + 1));
        if (hi < lo) throw Error(ErrorCode::kInvalidArgument, "descending k range: " + part);
        for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "bad k range element: " + part);
    }
  }
  return out;
}

int run_study_cmd(const StudyArgs& a) {
  StudyConfig cfg;
  std::optional<std::uint64_t> spec_seed;
  if (!a.data.empty()) {
    cfg.data_csv = a.data;
    cfg.csv = {a.delimiter, a.header};
  }
  if (!a.synth.empty()) {
    cfg.synth_spec = a.synth;
    load_synth_spec(a.synth, &spec_seed);
  }
  cfg.seed = a.seed.value_or(spec_seed.value_or(1));
  cfg.k_range = a.k_range;
  cfg.gammas = a.gammas;
  cfg.subset_cap = a.subset_cap;
  cfg.w0 = a.w0;
  cfg.output_dir = a.out;
  cfg.quantiles = a.quantiles;
  const StudyReport report = run_study(cfg);
  write_study(report);

  std::size_t errors = 0;
  for (const auto& c : report.cells) errors += !c.error.empty();
  Json out;
  out["output_dir"] = a.out;
  out["seed"] = cfg.seed;
  out["n_cells"] = report.cells.size();
  out["n_cell_errors"] = errors;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form CRRA portfolios under a log-normal return approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lnport 0.1.0");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Optimal portfolio for one market and one gamma (JSON)");
  solve.market.add_to(*solve_cmd);
  solve_cmd->add_option("--gamma", solve.gamma, "Relative risk aversion (1 = log utility)")
      ->required()
      ->check(CLI::PositiveNumber)
      ->envname("LNPORT_GAMMA");
  solve_cmd->add_option("--w0", solve.w0, "Initial wealth")->check(CLI::PositiveNumber)->envname("LNPORT_W0");

  FrontierArgs frontier;
  auto* frontier_cmd = app.add_subcommand("frontier", "Efficient-set constants and sampled parabola (CSV)");
  frontier.market.add_to(*frontier_cmd);
  frontier_cmd->add_option("--points", frontier.points, "Number of sample points")->envname("LNPORT_POINTS");
  frontier_cmd->add_option("--x-min", frontier.x_min, "Smallest mean to sample");
  frontier_cmd->add_option("--x-max", frontier.x_max, "Largest mean to sample");

  VerifyArgs verify;
  verify.gammas = {2, 5, 20};
  auto* verify_cmd = app.add_subcommand("verify", "Closed form vs numerical oracle agreement (JSON)");
  verify.market.add_to(*verify_cmd);
  verify_cmd->add_option("--random", verify.random, "Number of seeded random markets")->envname("LNPORT_RANDOM");
  verify_cmd->add_option("--k-min", verify.k_min, "Smallest random market size");
  verify_cmd->add_option("--k-max", verify.k_max, "Largest random market size");
  verify_cmd->add_option("--gammas", verify.gammas, "Gammas checked besides gamma_min + offset")
      ->delimiter(',')
      ->envname("LNPORT_GAMMAS");
  verify_cmd->add_option("--offset", verify.gamma_min_offset, "Offset above gamma_min for the first gamma");
  verify_cmd->add_option("--seed", verify.seed, "Seed of the first random market")->envname("LNPORT_SEED");
  verify_cmd->add_option("--tol-w", verify.tol_w, "Max-norm tolerance on weights");
  verify_cmd->add_option("--tol-gap", verify.tol_gap, "Tolerance on the relative objective gap");

  CdfGapArgs cdf_gap;
  auto* cdf_gap_cmd = app.add_subcommand("cdf-gap", "Normal vs log-normal CDF gap: bound and grid sup (CSV)");
  cdf_gap_cmd->alias("lemma1");
  cdf_gap_cmd->add_option("--mu", cdf_gap.mu, "Mean")->check(CLI::PositiveNumber);
  cdf_gap_cmd->add_option("--ladder", cdf_gap.ladder, "sigma/mu values")->delimiter(',');
  cdf_gap_cmd->add_option("--grid", cdf_gap.grid, "Grid points per interval");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Draw a synthetic return CSV from a JSON spec");
  synth_cmd->add_option("--synth", synth.spec, "Synthetic market spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile)
      ->envname("LNPORT_SYNTH");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed (defaults to the spec's seed)")->envname("LNPORT_SEED");
  synth_cmd->add_option("--out", synth.out, "Output CSV (stdout if omitted)")->envname("LNPORT_OUT");

  StudyArgs study;
  std::string k_range = "4-14";
  auto* study_cmd = app.add_subcommand("study", "Random-subset study: screening, conditions, strategy ECDFs");
  auto* data_opt = study_cmd->add_option("--data", study.data, "CSV of simple returns")
                       ->check(CLI::ExistingFile)
                       ->envname("LNPORT_DATA");
  auto* synth_opt = study_cmd->add_option("--synth", study.synth, "Synthetic market spec (JSON)")
                        ->check(CLI::ExistingFile)
                        ->envname("LNPORT_SYNTH");
  data_opt->excludes(synth_opt);
  study_cmd->add_flag("--header", study.header, "CSV has a header row")->envname("LNPORT_HEADER");
  study_cmd->add_option("--delimiter", study.delimiter, "CSV field delimiter")->envname("LNPORT_DELIMITER");
  study_cmd->add_option("--seed", study.seed, "Seed (defaults to the spec's seed, else 1)")->envname("LNPORT_SEED");
  study_cmd->add_option("--k-range", k_range, "Subset sizes, e.g. 4-14 or 4,6,8")->envname("LNPORT_K_RANGE");
  study_cmd->add_option("--gammas", study.gammas, "Comma-separated gamma grid")
      ->delimiter(',')
      ->envname("LNPORT_GAMMAS");
  study_cmd->add_option("--subset-cap", study.subset_cap, "Max subsets per k")->envname("LNPORT_SUBSET_CAP");
  study_cmd->add_option("--w0", study.w0, "Initial wealth")->check(CLI::PositiveNumber)->envname("LNPORT_W0");
  study_cmd->add_option("--out", study.out, "Output directory")->envname("LNPORT_OUT");
  study_cmd->add_option("--quantiles", study.quantiles, "p-value quantile levels")
      ->delimiter(',')
      ->envname("LNPORT_QUANTILES");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*frontier_cmd) return run_frontier(frontier);
    if (*verify_cmd) return run_verify(verify);
    if (*cdf_gap_cmd) return run_cdf_gap(cdf_gap);
    if (*synth_cmd) return run_synth(synth);
    if (*study_cmd) {
      study.k_range = parse_k_range(k_range);
      return run_study_cmd(study);
    }
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitError;
  }
  return kExitUsage;
}
