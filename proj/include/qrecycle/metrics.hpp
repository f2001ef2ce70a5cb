#pragma once

#include <array>

#include "qrecycle/channel.hpp"

namespace qrecycle {

// Fidelity here is always the squared Uhlmann form
//   F(rho, sigma) = ( Tr sqrt( sqrt(rho) sigma sqrt(rho) ) )^2,
// which reduces to <psi|sigma|psi> when rho = |psi><psi|.

/// Fidelity of a normalized state against a normalized target. Uses the
/// pure-state overlap when either argument has rank one (within 1e-10).
double fidelity(const DensityMatrix& target, const DensityMatrix& sigma);

/// General Uhlmann formula, no rank shortcut.
double uhlmann_fidelity(const DensityMatrix& target, const DensityMatrix& sigma);

/// <Phi+| sigma |Phi+> for a normalized sigma. Hot path of the optimizers.
double bell_fidelity(const Mat4& sigma);

struct PptReport {
  std::array<double, 4> eigenvalues{};  // of the partial transpose, ascending
  double min_eigenvalue = 0.0;
  bool is_entangled = false;
};

/// Peres-Horodecki test. Accepts any positive scale; the negativity
/// threshold is 1e-10 times the trace so the verdict is scale invariant.
PptReport ppt_report(const DensityMatrix& rho);

/// Wootters concurrence of a normalized two-qubit state.
double concurrence(const DensityMatrix& rho);

}  // namespace qrecycle
