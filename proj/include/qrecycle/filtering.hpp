#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrecycle/channel.hpp"

namespace qrecycle {

/// Gisin filter as a binary POVM with transmissivities (alpha, beta),
/// alpha + beta = 1:
///   reflect  M0 = diag(alpha, beta)
///   transmit M1 = diag(beta, alpha)
class Povm {
 public:
  /// beta = 1 - alpha; alpha must lie in the open interval (0, 1).
  explicit Povm(double alpha);
  Povm(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  Mat2 reflect() const { return Mat2::diagonal({alpha_, beta_}); }
  Mat2 transmit() const { return Mat2::diagonal({beta_, alpha_}); }
  // Both elements are diagonal, so the square roots are entry-wise.
  Mat2 sqrt_reflect() const;
  Mat2 sqrt_transmit() const;

 private:
  double alpha_;
  double beta_;
};

enum class SchemeKind { Full, Partial };

const char* to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& s);

/// Full: both arms filtered. Partial: only Alice's arm is filtered.
struct FilterScheme {
  SchemeKind kind = SchemeKind::Full;
  Povm tier1{0.5};
  std::optional<Povm> tier2;
};

/// Result of one filter branch. `state` is empty when the branch has
/// probability below 1e-14.
struct Branch {
  double probability = 0.0;
  std::optional<DensityMatrix> state;
  double fidelity = 0.0;  // against |Phi+>, 0 for an empty state
};

inline constexpr double kNegligibleProbability = 1e-14;

/// Applies sqrt(op_a) (x) sqrt(op_b) to rho; an absent operator is the
/// identity on that arm. Operators must be POVM elements (0 <= op <= I).
Branch filter_branch(const DensityMatrix& rho, const std::optional<Mat2>& op_a,
                     const std::optional<Mat2>& op_b);

/// Unnormalized numerator (K rho K^dagger) of filter_branch.
DensityMatrix filter_numerator(const DensityMatrix& rho, const std::optional<Mat2>& op_a,
                               const std::optional<Mat2>& op_b);

/// (ka (x) kb) m (ka (x) kb)^dagger with absent factors treated as identity.
Mat4 local_filter(const Mat4& m, const std::optional<Mat2>& ka, const std::optional<Mat2>& kb);

/// Trace, normalized state and Bell fidelity of an unnormalized numerator.
Branch make_branch(const Mat4& numerator);

/// One outcome of the first filter tier. Reflected arms are routed to the
/// second tier.
struct FirstTierBranch {
  std::string label;  // "TT", "TR", "RT", "RR" (full) or "T", "R" (partial)
  Mat4 numerator;
  bool alice_reflected = false;
  bool bob_reflected = false;

  bool recycled() const { return alice_reflected || bob_reflected; }
};

std::vector<FirstTierBranch> first_tier_branches(const DensityMatrix& rho_prime, SchemeKind kind,
                                                 const Povm& tier1);

/// Numerator after the second tier: each reflected arm passes through
/// `tier2` and either transmits (true) or reflects (false).
Mat4 second_tier_numerator(const FirstTierBranch& branch, const Povm& tier2, bool alice_transmits,
                           bool bob_transmits);

struct OutcomeRecord {
  std::string label;        // e.g. "TR|-T": first tier | second tier, '-' = no photon
  std::string first_tier;   // e.g. "TR"
  double probability = 0.0;
  std::optional<DensityMatrix> state;
  double fidelity = 0.0;
  bool in_success_set = false;
};

/// All terminal outcomes of the two-tier full scheme (9 outcomes).
std::vector<OutcomeRecord> enumerate_full_outcomes(const DensityMatrix& rho_prime, const Povm& tier1,
                                                   const Povm& tier2);

/// All terminal outcomes of the two-tier partial scheme (3 outcomes).
std::vector<OutcomeRecord> enumerate_partial_outcomes(const DensityMatrix& rho_prime, const Povm& tier1,
                                                      const Povm& tier2);

/// Dispatches on the scheme; without tier2 every reflected photon fails.
std::vector<OutcomeRecord> enumerate_outcomes(const DensityMatrix& rho_prime, const FilterScheme& scheme);

double survival_rate(const std::vector<OutcomeRecord>& records);

}  // namespace qrecycle
