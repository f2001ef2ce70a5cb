#include "qrecycle/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

#include "qrecycle/metrics.hpp"

namespace qrecycle {

namespace {

constexpr double kGammaEps = 1e-12;

std::string short_key(const Contribution& c, SchemeKind kind) {
  const std::string first = c.label.substr(0, c.label.find('|'));
  if (kind == SchemeKind::Partial && first == "R") return "RT";
  return first;
}

// start + k * step for k = 0, 1, ... while <= end.
std::vector<double> lattice(double start, double end, double step) {
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double g = start + static_cast<double>(k) * step;
    if (g > end + kGammaEps) break;
    out.push_back(std::min(g, end));
  }
  return out;
}

std::vector<SweepRow> evaluate_all(const std::vector<double>& gammas, const SweepSpec& spec) {
  std::vector<SweepRow> rows(gammas.size());
  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(gammas.size(), 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < gammas.size(); ++i) rows[i] = evaluate_gamma(gammas[i], spec);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < gammas.size() && !failed;) {
          try {
            rows[i] = evaluate_gamma(gammas[i], spec);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<double> gammas = lattice(spec.gamma_start, spec.gamma_end, spec.gamma_step);
  std::vector<SweepRow> rows = evaluate_all(gammas, spec);
  if (spec.refine_step >= spec.gamma_step) return rows;

  std::vector<double> extra;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i].status == rows[i + 1].status) continue;
    const double lo = std::max(spec.gamma_start, rows[i].gamma - spec.refine_window);
    const double hi = std::min(spec.gamma_end, rows[i + 1].gamma + spec.refine_window);
    // Stay on the refine lattice anchored at gamma_start.
    const long k0 = static_cast<long>(std::ceil((lo - spec.gamma_start) / spec.refine_step - 1e-9));
    for (long k = k0;; ++k) {
      const double g = spec.gamma_start + static_cast<double>(k) * spec.refine_step;
      if (g > hi + kGammaEps) break;
      extra.push_back(g);
    }
  }
  std::sort(extra.begin(), extra.end());
  std::vector<double> fresh;
  for (double g : extra) {
    const bool known = std::any_of(gammas.begin(), gammas.end(), [&](double x) { return std::abs(x - g) < 1e-9; });
    if (!known && (fresh.empty() || std::abs(fresh.back() - g) >= 1e-9)) fresh.push_back(g);
  }
  auto more = evaluate_all(fresh, spec);
  rows.insert(rows.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.gamma < b.gamma; });
  return rows;
}

double round_sig(double v) { return round_significant(v); }

nlohmann::json maybe(const std::optional<double>& v) {
  return v ? nlohmann::json(round_sig(*v)) : nlohmann::json(nullptr);
}

}  // namespace

const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::NoFilterNeeded: return "no_filter_needed";
    case RowStatus::Feasible: return "feasible";
    case RowStatus::Infeasible: return "infeasible";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (!(gamma_start >= 0.0 && gamma_start < gamma_end && gamma_end <= 1.0)) {
    throw Error("SweepSpec: need 0 <= gamma_start < gamma_end <= 1");
  }
  if (!(gamma_step > 0.0)) throw Error("SweepSpec: gamma_step must be positive");
  if (!(refine_step > 0.0) || !(refine_window >= 0.0)) throw Error("SweepSpec: invalid refinement settings");
  if (restricted_rr_only && scheme != SchemeKind::Full) {
    throw Error("SweepSpec: RR-only recycling is defined for the full scheme only");
  }
  optimizer_config().validate();
}

OptimizerConfig SweepSpec::optimizer_config() const {
  OptimizerConfig cfg;
  cfg.grid_points = grid_points;
  cfg.refine_iters = refine_iters;
  cfg.f_threshold = f_threshold;
  return cfg;
}

std::vector<std::string> outcome_keys(SchemeKind kind) {
  if (kind == SchemeKind::Full) return {"TT", "TR", "RT", "RR"};
  return {"T", "RT"};
}

SweepRow evaluate_gamma(double gamma, const SweepSpec& spec) {
  SweepRow row;
  row.gamma = gamma;
  for (const auto& k : outcome_keys(spec.scheme)) row.per_outcome.emplace_back(k, 0.0);

  const DensityMatrix rho_prime = apply_channel(epr_state(), DampingParams(gamma));
  if (bell_fidelity(rho_prime.matrix()) >= spec.f_threshold) {
    row.status = RowStatus::NoFilterNeeded;
    row.benchmark_survival = row.recycled_survival = 1.0;
    return row;
  }

  const OptimizerConfig cfg = spec.optimizer_config();
  const FilterSolution t1 = solve_tier1(rho_prime, spec.scheme, cfg);
  if (!t1.feasible) {
    row.status = RowStatus::Infeasible;
    return row;
  }
  const RecycleSet set = spec.restricted_rr_only ? RecycleSet::BothReflectedOnly : RecycleSet::All;
  const FilterSolution t2 = solve_tier2(rho_prime, t1, spec.scheme, cfg, set);

  row.status = RowStatus::Feasible;
  row.alpha_tier1 = t1.alpha_star;
  row.alpha_tier2 = t2.alpha_star;
  row.benchmark_survival = t1.objective_value;
  row.recycled_survival = t2.objective_value;
  row.gain_points = 100.0 * (row.recycled_survival - row.benchmark_survival);
  for (const auto& c : t2.contributions) {
    const std::string key = short_key(c, spec.scheme);
    for (auto& [k, p] : row.per_outcome)
      if (k == key) p += c.probability;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) { return sweep(spec); }

std::vector<SweepRow> run_restricted_rr(SweepSpec spec) {
  if (spec.scheme != SchemeKind::Full) throw Error("run_restricted_rr: only the full scheme is supported");
  spec.restricted_rr_only = true;
  return sweep(spec);
}

OutcomeShares breakdown(const SweepRow& row) {
  if (row.status != RowStatus::Feasible) throw Error("breakdown: row is not feasible");
  return row.per_outcome;
}

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  s.rows = rows.size();
  bool first = true;
  for (const auto& r : rows) {
    if (r.status != RowStatus::Feasible) continue;
    ++s.feasible_rows;
    if (first) {
      s.feasible_range = {r.gamma, r.gamma};
      s.max_gain_points = s.min_gain_points = r.gain_points;
      s.gamma_at_max_gain = r.gamma;
      first = false;
    }
    s.feasible_range->first = std::min(s.feasible_range->first, r.gamma);
    s.feasible_range->second = std::max(s.feasible_range->second, r.gamma);
    if (r.gain_points > s.max_gain_points) s.max_gain_points = r.gain_points, s.gamma_at_max_gain = r.gamma;
    s.min_gain_points = std::min(s.min_gain_points, r.gain_points);
    s.max_recycled_survival = std::max(s.max_recycled_survival, r.recycled_survival);
    s.max_benchmark_survival = std::max(s.max_benchmark_survival, r.benchmark_survival);
  }
  return s;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

double round_significant(double v) {
  const std::string s = format_number(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

void write_csv(std::ostream& os, SchemeKind kind, const std::vector<SweepRow>& rows) {
  os << "gamma,status,alpha_tier1,alpha_tier2,benchmark_survival,recycled_survival,gain_points";
  for (const auto& k : outcome_keys(kind)) os << ',' << k;
  os << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows) {
    os << format_number(r.gamma) << ',' << to_string(r.status) << ',' << opt(r.alpha_tier1) << ','
       << opt(r.alpha_tier2) << ',' << format_number(r.benchmark_survival) << ','
       << format_number(r.recycled_survival) << ',' << format_number(r.gain_points);
    for (const auto& [k, p] : r.per_outcome) os << ',' << format_number(p);
    os << '\n';
  }
}

nlohmann::json to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  using nlohmann::json;
  json j;
  j["spec"] = {
      {"scheme", to_string(spec.scheme)},
      {"f_threshold", round_sig(spec.f_threshold)},
      {"gamma_start", round_sig(spec.gamma_start)},
      {"gamma_end", round_sig(spec.gamma_end)},
      {"gamma_step", round_sig(spec.gamma_step)},
      {"refine_step", round_sig(spec.refine_step)},
      {"refine_window", round_sig(spec.refine_window)},
      {"restricted_rr_only", spec.restricted_rr_only},
      {"grid_points", spec.grid_points},
      {"refine_iters", spec.refine_iters},
  };
  json arr = json::array();
  for (const auto& r : rows) {
    json per = json::object();
    for (const auto& [k, p] : r.per_outcome) per[k] = round_sig(p);
    arr.push_back({
        {"gamma", round_sig(r.gamma)},
        {"status", to_string(r.status)},
        {"alpha_tier1", maybe(r.alpha_tier1)},
        {"alpha_tier2", maybe(r.alpha_tier2)},
        {"benchmark_survival", round_sig(r.benchmark_survival)},
        {"recycled_survival", round_sig(r.recycled_survival)},
        {"gain_points", round_sig(r.gain_points)},
        {"per_outcome", per},
    });
  }
  j["rows"] = std::move(arr);

  const SweepSummary s = summarize(rows);
  json summary = {
      {"rows", s.rows},
      {"feasible_rows", s.feasible_rows},
      {"max_gain_points", round_sig(s.max_gain_points)},
      {"min_gain_points", round_sig(s.min_gain_points)},
      {"gamma_at_max_gain", round_sig(s.gamma_at_max_gain)},
      {"max_recycled_survival", round_sig(s.max_recycled_survival)},
      {"max_benchmark_survival", round_sig(s.max_benchmark_survival)},
  };
  summary["feasible_range"] = s.feasible_range
                                  ? json::array({round_sig(s.feasible_range->first), round_sig(s.feasible_range->second)})
                                  : json(nullptr);
  j["summary"] = std::move(summary);
  return j;
}

}  // namespace qrecycle
