#pragma once

#include <string>
#include <vector>

#include "qrecycle/filtering.hpp"

namespace qrecycle {

struct OptimizerConfig {
  int grid_points = 2001;  // includes the excluded endpoints 0 and 1
  int refine_iters = 60;
  double f_threshold = 0.7;

  void validate() const;
};

/// Which recycled first-tier outcomes may count toward the survival rate.
enum class RecycleSet {
  All,                // TR, RT and RR (full) or R (partial)
  BothReflectedOnly,  // RR only; full scheme
};

struct Contribution {
  std::string label;  // terminal outcome label, e.g. "RR|TT"
  double probability = 0.0;
  double fidelity = 0.0;
};

struct FilterSolution {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  double objective_value = 0.0;  // survival rate
  bool feasible = false;
  double constraint_fidelity = 0.0;  // lowest fidelity among counted outcomes
  std::vector<Contribution> contributions;  // counted outcomes, tree order
};

/// Maximizes the single-filter survival rate subject to the transmitted
/// state's fidelity with |Phi+> reaching f_threshold. One-dimensional in
/// alpha (beta = 1 - alpha); dense grid with feasibility masking, then
/// bisection to the feasible edges and golden-section refinement.
/// Ties go to the smallest alpha.
FilterSolution solve_tier1(const DensityMatrix& rho_prime, SchemeKind kind, const OptimizerConfig& cfg);

/// Chooses the second-tier filter that maximizes the recycled survival
///   S_tier1 + sum_k Pr(k) * 1[F(k) >= f_threshold]
/// over the recycled success outcomes k. Each outcome must individually
/// meet the threshold; the tier-1 outcome is counted as given.
FilterSolution solve_tier2(const DensityMatrix& rho_prime, const FilterSolution& tier1, SchemeKind kind,
                           const OptimizerConfig& cfg, RecycleSet set = RecycleSet::All);

/// Recycled objective at a fixed second-tier alpha; no optimization.
/// Exposed for oracles and inspection.
FilterSolution evaluate_tier2(const DensityMatrix& rho_prime, const FilterSolution& tier1, SchemeKind kind,
                              double alpha2, double f_threshold, RecycleSet set = RecycleSet::All);

}  // namespace qrecycle
