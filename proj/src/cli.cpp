#include "qrecycle/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qrecycle/experiment.hpp"
#include "qrecycle/metrics.hpp"

namespace qrecycle::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string scheme = "full";
  double gamma = 0.0;
  double fth = 0.7;
  std::string format;
  bool restricted_rr = false;
  int grid_points = 2001;
  int refine_iters = 60;

  // sweep
  double gamma_start = 0.0;
  double gamma_end = 1.0;
  double gamma_step = 1e-3;
  double refine_step = 1e-4;
  double refine_window = 0.02;
  unsigned threads = 0;
  std::string output;

  // inspect / ppt
  double alpha = 0.5;
  std::optional<double> beta;
  std::optional<double> alpha2;
  std::string state = "rho-prime";
};

const auto kOpenUnit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(s);
      } catch (...) {
        return "not a number: " + s;
      }
      return (v > 0.0 && v < 1.0) ? std::string() : "value " + s + " not in (0, 1)";
    },
    "in (0, 1)");

std::string num(double v) { return format_number(v); }
double jnum(double v) { return round_significant(v); }

std::string cnum(cplx z) {
  std::string s = num(z.real());
  if (z.imag() != 0.0) s += (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
  return s;
}

void print_matrix(std::ostream& out, const Mat4& m) {
  for (std::size_t r = 0; r < 4; ++r) {
    out << "  [";
    for (std::size_t c = 0; c < 4; ++c) out << (c ? ", " : "") << std::setw(14) << cnum(m(r, c));
    out << "]\n";
  }
}

json solution_json(const FilterSolution& s) {
  json j = {{"feasible", s.feasible},
            {"alpha", jnum(s.alpha_star)},
            {"beta", jnum(s.beta_star)},
            {"survival", jnum(s.objective_value)},
            {"min_fidelity", jnum(s.constraint_fidelity)}};
  json parts = json::array();
  for (const auto& c : s.contributions)
    parts.push_back({{"outcome", c.label}, {"probability", jnum(c.probability)}, {"fidelity", jnum(c.fidelity)}});
  j["outcomes"] = std::move(parts);
  return j;
}

void print_solution(std::ostream& out, const char* name, const FilterSolution& s) {
  out << name << ": alpha=" << num(s.alpha_star) << " beta=" << num(s.beta_star)
      << " survival=" << num(s.objective_value) << " min_fidelity=" << num(s.constraint_fidelity) << '\n';
  for (const auto& c : s.contributions)
    out << "  " << std::left << std::setw(6) << c.label << std::right << " p=" << num(c.probability)
        << " F=" << num(c.fidelity) << '\n';
}

int cmd_optimize(const Options& o, std::ostream& out) {
  const SchemeKind kind = scheme_from_string(o.scheme);
  OptimizerConfig cfg;
  cfg.f_threshold = o.fth;
  cfg.grid_points = o.grid_points;
  cfg.refine_iters = o.refine_iters;
  const DensityMatrix rho_prime = apply_channel(epr_state(), DampingParams(o.gamma));
  const double baseline = bell_fidelity(rho_prime.matrix());
  const FilterSolution t1 = solve_tier1(rho_prime, kind, cfg);
  std::optional<FilterSolution> t2;
  if (t1.feasible) {
    t2 = solve_tier2(rho_prime, t1, kind, cfg,
                     o.restricted_rr ? RecycleSet::BothReflectedOnly : RecycleSet::All);
  }

  if (o.format == "json") {
    json j = {{"scheme", o.scheme},
              {"gamma", jnum(o.gamma)},
              {"f_threshold", jnum(o.fth)},
              {"no_filter_fidelity", jnum(baseline)},
              {"no_filter_needed", baseline >= o.fth},
              {"status", t1.feasible ? "feasible" : "infeasible"},
              {"tier1", solution_json(t1)}};
    j["tier2"] = t2 ? solution_json(*t2) : json(nullptr);
    if (t2) j["gain_points"] = jnum(100.0 * (t2->objective_value - t1.objective_value));
    out << j.dump(2) << '\n';
  } else {
    out << "scheme=" << o.scheme << " gamma=" << num(o.gamma) << " F_th=" << num(o.fth)
        << (o.restricted_rr ? " (RR-only recycling)" : "") << '\n';
    out << "no-filter fidelity=" << num(baseline) << (baseline >= o.fth ? " (meets F_th without filtering)" : "")
        << '\n';
    if (!t1.feasible) {
      out << "infeasible: best tier-1 fidelity " << num(t1.constraint_fidelity) << " < F_th\n";
    } else {
      print_solution(out, "tier 1", t1);
      print_solution(out, "tier 2", *t2);
      out << "gain_points=" << num(100.0 * (t2->objective_value - t1.objective_value)) << '\n';
    }
  }
  return t1.feasible ? kOk : kInfeasible;
}

SweepSpec sweep_spec(const Options& o) {
  SweepSpec spec;
  spec.scheme = scheme_from_string(o.scheme);
  spec.f_threshold = o.fth;
  spec.gamma_start = o.gamma_start;
  spec.gamma_end = o.gamma_end;
  spec.gamma_step = o.gamma_step;
  spec.refine_step = o.refine_step;
  spec.refine_window = o.refine_window;
  spec.restricted_rr_only = o.restricted_rr;
  spec.grid_points = o.grid_points;
  spec.refine_iters = o.refine_iters;
  spec.threads = o.threads;
  return spec;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const SweepSpec spec = sweep_spec(o);
  spec.validate();
  std::string format = o.format;
  if (format.empty()) format = o.output.ends_with(".json") ? "json" : "csv";

  std::ofstream file(o.output, std::ios::binary);
  if (!file) {
    err << "error: cannot open '" << o.output << "' for writing\n";
    return kUsage;
  }
  const auto rows = spec.restricted_rr_only ? run_restricted_rr(spec) : run_sweep(spec);
  if (format == "json") {
    file << to_json(spec, rows).dump(2) << '\n';
  } else {
    write_csv(file, spec.scheme, rows);
  }
  file.close();
  if (!file) {
    err << "error: failed writing '" << o.output << "'\n";
    return kUsage;
  }

  const SweepSummary s = summarize(rows);
  out << "rows=" << s.rows << " feasible_rows=" << s.feasible_rows << '\n';
  if (s.feasible_range) {
    out << "feasible_range=[" << num(s.feasible_range->first) << ", " << num(s.feasible_range->second) << "]\n";
    out << "gain_points=[" << num(s.min_gain_points) << ", " << num(s.max_gain_points) << "] max at gamma="
        << num(s.gamma_at_max_gain) << '\n';
    out << "max_benchmark_survival=" << num(s.max_benchmark_survival)
        << " max_recycled_survival=" << num(s.max_recycled_survival) << '\n';
  } else {
    out << "feasible_range=none\n";
  }
  out << "wrote " << o.output << '\n';
  return kOk;
}

int cmd_breakdown(const Options& o, std::ostream& out) {
  SweepSpec spec = sweep_spec(o);
  spec.validate();
  const SweepRow row = evaluate_gamma(o.gamma, spec);
  out << "gamma=" << num(row.gamma) << " status=" << to_string(row.status) << '\n';
  if (row.status != RowStatus::Feasible) return row.status == RowStatus::Infeasible ? kInfeasible : kOk;
  double total = 0.0;
  for (const auto& [label, p] : breakdown(row)) {
    out << std::left << std::setw(3) << label << std::right << ' ' << num(p) << '\n';
    total += p;
  }
  out << "total " << num(total) << " benchmark " << num(row.benchmark_survival) << " gain_points "
      << num(row.gain_points) << '\n';
  return kOk;
}

void print_state_report(std::ostream& out, const DensityMatrix& rho) {
  print_matrix(out, rho.matrix());
  out << "trace=" << num(rho.trace()) << '\n';
  if (rho.normalized()) {
    out << "fidelity=" << num(fidelity(epr_state(), rho)) << '\n';
    out << "concurrence=" << num(concurrence(rho)) << '\n';
  }
  const PptReport ppt = ppt_report(rho);
  out << "ppt_eigenvalues=[";
  for (std::size_t i = 0; i < 4; ++i) out << (i ? ", " : "") << num(ppt.eigenvalues[i]);
  out << "]\nppt_min_eigenvalue=" << num(ppt.min_eigenvalue) << '\n';
  out << (ppt.is_entangled ? "entangled" : "separable") << '\n';
}

int cmd_inspect(const Options& o, std::ostream& out, std::ostream& err) {
  const DensityMatrix rho_prime = apply_channel(epr_state(), DampingParams(o.gamma));
  if (o.state == "rho-prime") {
    out << "state=rho-prime gamma=" << num(o.gamma) << '\n';
    print_state_report(out, rho_prime);
    return kOk;
  }
  static const std::vector<std::string> full{"tt", "tr", "rt", "rr"};
  static const std::vector<std::string> partial{"t", "r"};
  const bool is_full = std::find(full.begin(), full.end(), o.state) != full.end();
  const bool is_partial = std::find(partial.begin(), partial.end(), o.state) != partial.end();
  if (!is_full && !is_partial) {
    err << "error: unknown --state '" << o.state << "'\n";
    return kUsage;
  }
  const Povm tier1(o.alpha);
  std::string upper = o.state;
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(ch));
  for (const auto& b : first_tier_branches(rho_prime, is_full ? SchemeKind::Full : SchemeKind::Partial, tier1)) {
    if (b.label != upper) continue;
    Mat4 num_mat = b.numerator;
    std::string label = b.label;
    if (o.alpha2 && b.recycled()) {
      num_mat = second_tier_numerator(b, Povm(*o.alpha2), true, true);
      label += " then second-tier transmit";
    }
    const Branch br = make_branch(num_mat);
    out << "state=" << label << " gamma=" << num(o.gamma) << " alpha=" << num(o.alpha);
    if (o.alpha2) out << " alpha2=" << num(*o.alpha2);
    out << "\nprobability=" << num(br.probability) << '\n';
    if (!br.state) {
      out << "no state: branch probability below " << num(kNegligibleProbability) << '\n';
      return kOk;
    }
    print_state_report(out, *br.state);
    return kOk;
  }
  return kUsage;
}

int cmd_ppt(const Options& o, std::ostream& out) {
  const double beta = o.beta.value_or(1.0 - o.alpha);
  const DensityMatrix rho_prime = apply_channel(epr_state(), DampingParams(o.gamma));
  const Mat2 reflect = Mat2::diagonal({o.alpha, beta});
  const DensityMatrix rr = filter_numerator(rho_prime, reflect, reflect);
  out << "unnormalized both-reflected state gamma=" << num(o.gamma) << " alpha=" << num(o.alpha)
      << " beta=" << num(beta) << '\n';
  print_state_report(out, rr);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement distillation with recycled Gisin-filter reflections"};
  app.name(args.empty() ? "qrecycle" : args.front());
  app.require_subcommand(1);
  Options o;

  auto add_scheme = [&](CLI::App* sc) {
    sc->add_option("--scheme", o.scheme, "Filter placement")->check(CLI::IsMember({"full", "partial"}));
  };
  auto add_fth = [&](CLI::App* sc, bool required) {
    auto* opt = sc->add_option("--fth", o.fth, "Fidelity threshold F_th")->check(kOpenUnit);
    if (required) opt->required();
  };
  auto add_gamma = [&](CLI::App* sc) {
    sc->add_option("--gamma", o.gamma, "Damping probability")->required()->check(CLI::Range(0.0, 1.0));
  };
  auto add_solver = [&](CLI::App* sc) {
    sc->add_option("--grid-points", o.grid_points, "Optimizer grid size")->check(CLI::Range(3, 10000000));
    sc->add_option("--refine-iters", o.refine_iters, "Refinement iterations")->check(CLI::Range(0, 10000));
  };

  auto* optimize = app.add_subcommand("optimize", "Optimize tier-1 and tier-2 filters at one gamma");
  add_scheme(optimize);
  add_gamma(optimize);
  add_fth(optimize, true);
  add_solver(optimize);
  optimize->add_flag("--restricted-rr", o.restricted_rr, "Recycle only both-reflected pairs");
  optimize->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));

  auto* sweep = app.add_subcommand("sweep", "Sweep gamma and write per-gamma results");
  add_scheme(sweep);
  add_fth(sweep, true);
  add_solver(sweep);
  sweep->add_option("--gamma-start", o.gamma_start)->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--gamma-end", o.gamma_end)->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--gamma-step", o.gamma_step)->check(CLI::PositiveNumber);
  sweep->add_option("--refine-step", o.refine_step, "Step near feasibility boundaries")->check(CLI::PositiveNumber);
  sweep->add_option("--refine-window", o.refine_window)->check(CLI::NonNegativeNumber);
  sweep->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  sweep->add_option("--output", o.output, "Output path")->required();
  sweep->add_option("--format", o.format, "Output format (default from extension)")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_flag("--restricted-rr", o.restricted_rr, "Recycle only both-reflected pairs (full scheme)");

  auto* bd = app.add_subcommand("breakdown", "Per-outcome survival contributions at one gamma");
  add_scheme(bd);
  add_gamma(bd);
  add_fth(bd, true);
  add_solver(bd);
  bd->add_flag("--restricted-rr", o.restricted_rr, "Recycle only both-reflected pairs (full scheme)");

  auto* inspect = app.add_subcommand("inspect", "Print a state with fidelity, concurrence and PPT data");
  add_gamma(inspect);
  inspect->add_option("--alpha", o.alpha, "Tier-1 alpha")->check(kOpenUnit);
  inspect->add_option("--alpha2", o.alpha2, "Tier-2 alpha (recycled states)")->check(kOpenUnit);
  inspect->add_option("--state", o.state, "rho-prime | tt | tr | rt | rr | t | r");

  auto* ppt = app.add_subcommand("ppt", "PPT test of the unnormalized both-reflected state");
  add_gamma(ppt);
  ppt->add_option("--alpha", o.alpha, "Reflect-element alpha")->check(CLI::Range(0.0, 1.0));
  ppt->add_option("--beta", o.beta, "Reflect-element beta (default 1 - alpha)")->check(CLI::Range(0.0, 1.0));

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (bd->parsed()) return cmd_breakdown(o, out);
    if (inspect->parsed()) return cmd_inspect(o, out, err);
    if (ppt->parsed()) return cmd_ppt(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace qrecycle::cli
