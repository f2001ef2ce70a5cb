#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrecycle/optimize.hpp"

#include <json.hpp>

namespace qrecycle {

enum class RowStatus { NoFilterNeeded, Feasible, Infeasible };

const char* to_string(RowStatus s);

struct SweepSpec {
  SchemeKind scheme = SchemeKind::Full;
  double f_threshold = 0.7;
  double gamma_start = 0.0;
  double gamma_end = 1.0;
  double gamma_step = 1e-3;
  bool restricted_rr_only = false;

  // Around every status change of the coarse grid, gammas within
  // refine_window are re-evaluated on a refine_step grid. Disabled when
  // refine_step >= gamma_step.
  double refine_step = 1e-4;
  double refine_window = 0.02;

  int grid_points = 2001;
  int refine_iters = 60;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
  OptimizerConfig optimizer_config() const;
};

using OutcomeShares = std::vector<std::pair<std::string, double>>;

struct SweepRow {
  double gamma = 0.0;
  RowStatus status = RowStatus::Infeasible;
  std::optional<double> alpha_tier1;
  std::optional<double> alpha_tier2;
  double benchmark_survival = 0.0;
  double recycled_survival = 0.0;
  double gain_points = 0.0;  // 100 * (recycled - benchmark)
  OutcomeShares per_outcome;  // TT, TR, RT, RR (full) or T, RT (partial)
};

/// Keys of SweepRow::per_outcome in display order.
std::vector<std::string> outcome_keys(SchemeKind kind);

/// Evaluates one gamma: no-filter check, tier-1 benchmark, tier-2 recycling.
SweepRow evaluate_gamma(double gamma, const SweepSpec& spec);

/// Rows ordered by gamma ascending; deterministic for any thread count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Sweep that recycles only the both-reflected outcome. Full scheme only.
std::vector<SweepRow> run_restricted_rr(SweepSpec spec);

/// Per-outcome contributions to the recycled survival of a feasible row.
OutcomeShares breakdown(const SweepRow& row);

struct SweepSummary {
  std::size_t rows = 0;
  std::size_t feasible_rows = 0;
  std::optional<std::pair<double, double>> feasible_range;  // first and last feasible gamma
  double max_gain_points = 0.0;
  double min_gain_points = 0.0;
  double gamma_at_max_gain = 0.0;
  double max_recycled_survival = 0.0;
  double max_benchmark_survival = 0.0;
};

SweepSummary summarize(const std::vector<SweepRow>& rows);

/// 10 significant digits, '.' decimal separator, independent of locale.
std::string format_number(double v);

/// `v` rounded to the value format_number prints.
double round_significant(double v);

void write_csv(std::ostream& os, SchemeKind kind, const std::vector<SweepRow>& rows);

nlohmann::json to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace qrecycle
