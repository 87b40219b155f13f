#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lnport/market.hpp"

namespace lnport {

inline constexpr int kStudySchemaVersion = 1;

/// Reads {"n": periods, "mu0": [...], "sigma0": [[...]], "labels": [...]}.
/// An optional "seed" field is returned through `seed_out`.
SynthSpec load_synth_spec(const std::filesystem::path& path, std::optional<std::uint64_t>* seed_out = nullptr);

/// Reads {"mu": [...], "sigma": [[...]]} (gross-return moments).
MarketParams load_market_json(const std::filesystem::path& path);

struct StudyConfig {
  std::optional<std::filesystem::path> data_csv;
  CsvOptions csv;
  std::optional<std::filesystem::path> synth_spec;
  std::uint64_t seed = 1;
  std::vector<std::size_t> k_range;
  std::vector<double> gammas;
  std::size_t subset_cap = 200;
  double w0 = 1.0;
  std::filesystem::path output_dir = "study_out";
  std::vector<double> quantiles = {0.05, 0.10, 0.15, 0.20, 0.25};
};

/// One (subset, gamma) evaluation. Optional fields are empty when the value
/// does not exist for this cell; `error` then names the reason.
struct StudyCell {
  std::size_t k = 0;
  std::size_t subset_id = 0;
  std::vector<std::size_t> assets;
  double gamma = 0.0;
  std::optional<double> gamma_min;
  double r_gmv = 0.0;
  bool exists = false;
  bool efficient = false;
  std::optional<double> x;
  std::optional<double> v;
  std::optional<double> utility_optimal;
  std::optional<double> utility_sharpe;
  std::optional<double> utility_naive;
  std::optional<double> sw_statistic;
  std::optional<double> sw_p_value;
  std::string error;
};

struct StudySummaryRow {
  std::size_t k = 0;
  double gamma = 0.0;
  std::size_t n_subsets = 0;
  double rate_gamma_below_min = 0.0;  // share of subsets with gamma < gamma_min
  double rate_not_efficient = 0.0;    // share failing gamma >= gamma_min and R_GMV > 0
  std::size_t n_solved = 0;
  std::size_t n_screened = 0;
  std::vector<double> p_value_quantiles;  // aligned with StudyConfig::quantiles; empty if none screened
  bool optimal_dominates_naive = true;
  bool optimal_dominates_sharpe = true;
};

struct FrontierLocation {
  std::size_t k = 0;
  std::string portfolio;  // "optimal", "sharpe" or "gmv"
  double gamma = 0.0;     // 0 for sharpe and gmv
  double x = 0.0;
  double v = 0.0;
};

struct StudyReport {
  StudyConfig config;
  std::size_t n_periods = 0;
  std::size_t n_assets = 0;
  std::vector<std::string> asset_labels;
  std::vector<StudyCell> cells;
  std::vector<StudySummaryRow> summary;
  std::vector<FrontierLocation> frontier;
};

/// Runs the screening / existence / strategy-comparison pipeline over seeded
/// random asset subsets. Per-cell library errors are recorded, not thrown;
/// only configuration and data errors propagate.
StudyReport run_study(const StudyConfig& cfg);

/// Writes cells.csv, conditions.csv, pvalue_quantiles.csv, frontier.csv,
/// ecdf.csv and summary.json into cfg.output_dir. The only run-dependent byte
/// is metadata.generated_at in summary.json (fixed by SOURCE_DATE_EPOCH).
void write_study(const StudyReport& report);

/// True when the ECDF of `better` lies on or below the ECDF of `worse` at
/// every point of both samples (first-order stochastic dominance).
bool ecdf_dominates(const std::vector<double>& better, const std::vector<double>& worse);

/// Up to `cap` distinct sorted k-subsets of {0..n-1}, drawn without
/// replacement; all of them when C(n, k) <= cap. Deterministic in seed.
std::vector<std::vector<std::size_t>> sample_subsets(std::size_t n, std::size_t k, std::size_t cap,
                                                     std::uint64_t seed);

}  // namespace lnport
