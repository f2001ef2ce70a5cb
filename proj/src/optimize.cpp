#include "qrecycle/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrecycle/metrics.hpp"

namespace qrecycle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Refinement brackets stay strictly inside (0, 1) where Povm is defined.
constexpr double kInterior = 1e-9;

struct Point {
  double objective = 0.0;
  double fidelity = 0.0;
  bool feasible = false;
};

double grid_x(int i, int n) { return static_cast<double>(i) / static_cast<double>(n - 1); }

std::pair<double, double> bracket(int i, int n) {
  return {std::max(grid_x(i - 1, n), kInterior), std::min(grid_x(i + 1, n), 1.0 - kInterior)};
}

// Returns the best point seen; golden section assumes a unimodal f on [a, b].
template <class F>
double golden_maximize(F&& f, double a, double b, int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  double best = fc >= fd ? c : d;
  double fbest = std::max(fc, fd);
  for (int k = 0; k < iters; ++k) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc > fbest) fbest = fc, best = c;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd > fbest) fbest = fd, best = d;
    }
  }
  return best;
}

// `bad` fails the predicate, `good` satisfies it; returns a satisfying point
// within (good - bad) / 2^iters of the boundary.
template <class Pred>
double bisect_edge(Pred&& ok, double bad, double good, int iters) {
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (bad + good);
    (ok(mid) ? good : bad) = mid;
  }
  return good;
}

// Local maximization of eval(x).objective over feasible x in [lo, hi],
// starting from a feasible seed. Never returns a worse point than the seed.
template <class Eval>
double refine(Eval&& eval, double lo, double hi, double seed, int iters) {
  auto ok = [&](double x) { return eval(x).feasible; };
  auto value = [&](double x) {
    const Point p = eval(x);
    return p.feasible ? p.objective : kNegInf;
  };
  const double l = ok(lo) ? lo : bisect_edge(ok, lo, seed, iters);
  const double r = ok(hi) ? hi : bisect_edge(ok, hi, seed, iters);
  const double c = l < r ? golden_maximize(value, l, r, iters) : l;
  double best = seed;
  double fbest = value(seed);
  for (double x : {l, c, r}) {
    const double fx = value(x);
    if (fx > fbest || (fx == fbest && x < best)) best = x, fbest = fx;
  }
  return best;
}

Point tier1_point(const Mat4& rho, SchemeKind kind, double alpha, double fth) {
  const Povm povm(alpha);
  const Mat2 t = povm.sqrt_transmit();
  const Mat4 num = local_filter(rho, t, kind == SchemeKind::Full ? std::optional<Mat2>(t) : std::nullopt);
  const Branch b = make_branch(num);
  return {b.probability, b.fidelity, b.state.has_value() && b.fidelity >= fth};
}

std::string success_label(const FirstTierBranch& b, SchemeKind kind) {
  std::string label = b.label + "|";
  label += b.alice_reflected ? 'T' : '-';
  if (kind == SchemeKind::Full) label += b.bob_reflected ? 'T' : '-';
  return label;
}

// Second-tier success terms for one first-tier solution.
class RecycledTerms {
 public:
  RecycledTerms(const DensityMatrix& rho_prime, const FilterSolution& tier1, SchemeKind kind, RecycleSet set)
      : kind_(kind) {
    if (!tier1.feasible) throw Error("solve_tier2: tier-1 solution is infeasible");
    if (set == RecycleSet::BothReflectedOnly && kind == SchemeKind::Partial) {
      throw Error("solve_tier2: RR-only recycling is defined for the full scheme only");
    }
    for (auto& b : first_tier_branches(rho_prime, kind, Povm(tier1.alpha_star, tier1.beta_star))) {
      if (!b.recycled()) {
        base_ = make_branch(b.numerator);
        base_label_ = success_label(b, kind);
        continue;
      }
      if (set == RecycleSet::BothReflectedOnly && !(b.alice_reflected && b.bob_reflected)) continue;
      branches_.push_back(std::move(b));
    }
  }

  std::size_t size() const { return branches_.size(); }

  std::vector<Branch> evaluate(double alpha2) const {
    const Povm tier2(alpha2);
    std::vector<Branch> out;
    out.reserve(branches_.size());
    for (const auto& b : branches_) out.push_back(make_branch(second_tier_numerator(b, tier2, true, true)));
    return out;
  }

  // mask[k] forces term k to be required (restricted) instead of optional.
  Point point(double alpha2, double fth, const std::vector<bool>* required) const {
    const auto terms = evaluate(alpha2);
    Point p{base_.probability, base_.fidelity, true};
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const bool meets = terms[k].state.has_value() && terms[k].fidelity >= fth;
      if (required) {
        if (!(*required)[k]) continue;
        if (!meets) p.feasible = false;
        p.objective += terms[k].probability;
      } else if (meets) {
        p.objective += terms[k].probability;
      }
    }
    return p;
  }

  std::vector<bool> counted(double alpha2, double fth) const {
    const auto terms = evaluate(alpha2);
    std::vector<bool> mask(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) mask[k] = terms[k].state.has_value() && terms[k].fidelity >= fth;
    return mask;
  }

  FilterSolution solution(double alpha2, double fth) const {
    const Povm tier2(alpha2);
    FilterSolution s;
    s.alpha_star = tier2.alpha();
    s.beta_star = tier2.beta();
    s.feasible = true;
    s.objective_value = base_.probability;
    s.constraint_fidelity = base_.fidelity;
    s.contributions.push_back({base_label_, base_.probability, base_.fidelity});
    const auto terms = evaluate(alpha2);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (!terms[k].state.has_value() || terms[k].fidelity < fth) continue;
      s.objective_value += terms[k].probability;
      s.constraint_fidelity = std::min(s.constraint_fidelity, terms[k].fidelity);
      s.contributions.push_back({success_label(branches_[k], kind_), terms[k].probability, terms[k].fidelity});
    }
    return s;
  }

 private:
  SchemeKind kind_;
  Branch base_;
  std::string base_label_;
  std::vector<FirstTierBranch> branches_;
};

void require_normalized(const DensityMatrix& rho) {
  if (!rho.normalized()) throw Error("optimizer: rho_prime must be normalized");
}

}  // namespace

void OptimizerConfig::validate() const {
  if (grid_points < 3) throw Error("OptimizerConfig: grid_points must be >= 3");
  if (refine_iters < 0) throw Error("OptimizerConfig: refine_iters must be >= 0");
  if (!(f_threshold > 0.0 && f_threshold < 1.0)) throw Error("OptimizerConfig: f_threshold must lie in (0, 1)");
}

FilterSolution solve_tier1(const DensityMatrix& rho_prime, SchemeKind kind, const OptimizerConfig& cfg) {
  cfg.validate();
  require_normalized(rho_prime);
  const Mat4& rho = rho_prime.matrix();
  const double fth = cfg.f_threshold;
  const int n = cfg.grid_points;
  auto eval = [&](double a) { return tier1_point(rho, kind, a, fth); };

  int best = -1, best_fid = -1;
  double best_obj = kNegInf, max_fid = kNegInf;
  for (int i = 1; i <= n - 2; ++i) {
    const Point p = eval(grid_x(i, n));
    if (p.fidelity > max_fid) max_fid = p.fidelity, best_fid = i;
    if (p.feasible && p.objective > best_obj) best_obj = p.objective, best = i;
  }

  double seed = 0.0;
  std::pair<double, double> br;
  if (best >= 0) {
    seed = grid_x(best, n);
    br = bracket(best, n);
  } else {
    // The feasible set may be narrower than a grid step; look for it
    // around the grid's fidelity peak.
    br = bracket(best_fid, n);
    seed = golden_maximize([&](double a) { return eval(a).fidelity; }, br.first, br.second, cfg.refine_iters);
    const Point peak = eval(seed);
    if (!peak.feasible) {
      FilterSolution s;
      s.alpha_star = seed;
      s.beta_star = 1.0 - seed;
      s.objective_value = 0.0;
      s.constraint_fidelity = peak.fidelity;
      return s;
    }
  }

  const double alpha = refine(eval, br.first, br.second, seed, cfg.refine_iters);
  const Point p = eval(alpha);
  FilterSolution s;
  s.alpha_star = alpha;
  s.beta_star = 1.0 - alpha;
  s.objective_value = p.objective;
  s.feasible = true;
  s.constraint_fidelity = p.fidelity;
  s.contributions.push_back({kind == SchemeKind::Full ? "TT" : "T", p.objective, p.fidelity});
  return s;
}

FilterSolution solve_tier2(const DensityMatrix& rho_prime, const FilterSolution& tier1, SchemeKind kind,
                           const OptimizerConfig& cfg, RecycleSet set) {
  cfg.validate();
  require_normalized(rho_prime);
  const RecycledTerms terms(rho_prime, tier1, kind, set);
  const double fth = cfg.f_threshold;
  const int n = cfg.grid_points;

  int best = 1;
  double best_obj = kNegInf;
  for (int i = 1; i <= n - 2; ++i) {
    const double obj = terms.point(grid_x(i, n), fth, nullptr).objective;
    if (obj > best_obj) best_obj = obj, best = i;
  }

  // Within the winning plateau the set of counted outcomes is fixed; refine
  // the continuous objective of that set subject to each member's fidelity.
  const double seed = grid_x(best, n);
  const std::vector<bool> active = terms.counted(seed, fth);
  auto restricted = [&](double a) { return terms.point(a, fth, &active); };
  const auto br = bracket(best, n);
  double alpha2 = refine(restricted, br.first, br.second, seed, cfg.refine_iters);
  if (terms.point(alpha2, fth, nullptr).objective < best_obj) alpha2 = seed;
  return terms.solution(alpha2, fth);
}

FilterSolution evaluate_tier2(const DensityMatrix& rho_prime, const FilterSolution& tier1, SchemeKind kind,
                              double alpha2, double f_threshold, RecycleSet set) {
  require_normalized(rho_prime);
  return RecycledTerms(rho_prime, tier1, kind, set).solution(alpha2, f_threshold);
}

}  // namespace qrecycle
