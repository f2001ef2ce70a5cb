#include "qrecycle/filtering.hpp"

#include <cmath>

#include "qrecycle/metrics.hpp"

namespace qrecycle {

namespace {
constexpr double kTol = 1e-10;
constexpr double kPovmSumTol = 1e-12;

void validate_povm_element(const Mat2& op) {
  if (!is_hermitian(op, kTol)) throw Error("filter: operator is not Hermitian");
  const auto ev = hermitian_eigenvalues(op);
  if (ev[0] < -kTol || ev[1] > 1.0 + kTol) throw Error("filter: operator is not a POVM element");
}

std::optional<Mat2> root_of(const std::optional<Mat2>& op) {
  if (!op) return std::nullopt;
  validate_povm_element(*op);
  return psd_sqrt(*op);
}

char arm_mark(bool reflected, bool transmits) {
  if (!reflected) return '-';
  return transmits ? 'T' : 'R';
}

std::vector<OutcomeRecord> enumerate_two_tier(const DensityMatrix& rho_prime, SchemeKind kind,
                                              const Povm& tier1, const std::optional<Povm>& tier2) {
  std::vector<OutcomeRecord> out;
  for (const auto& b : first_tier_branches(rho_prime, kind, tier1)) {
    if (!b.recycled() || !tier2) {
      const Branch br = make_branch(b.numerator);
      std::string label = b.label;
      if (tier2) label += kind == SchemeKind::Full ? "|--" : "|-";
      out.push_back({label, b.label, br.probability, br.state, br.fidelity, !b.recycled()});
      continue;
    }
    // Each reflected arm transmits or reflects at tier 2; unreflected arms stay fixed.
    for (bool alice_t : {true, false}) {
      if (!b.alice_reflected && !alice_t) continue;
      for (bool bob_t : {true, false}) {
        if (!b.bob_reflected && !bob_t) continue;
        const Branch br = make_branch(second_tier_numerator(b, *tier2, alice_t, bob_t));
        std::string label = b.label + "|";
        label += arm_mark(b.alice_reflected, alice_t);
        if (kind == SchemeKind::Full) label += arm_mark(b.bob_reflected, bob_t);
        const bool success = (!b.alice_reflected || alice_t) && (!b.bob_reflected || bob_t);
        out.push_back({label, b.label, br.probability, br.state, br.fidelity, success});
      }
    }
  }
  return out;
}
}  // namespace

Povm::Povm(double alpha) : Povm(alpha, 1.0 - alpha) {}

Povm::Povm(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw Error("Povm: alpha and beta must lie in (0, 1)");
  }
  if (std::abs(alpha + beta - 1.0) > kPovmSumTol) throw Error("Povm: alpha + beta must equal 1");
}

Mat2 Povm::sqrt_reflect() const { return Mat2::diagonal({std::sqrt(alpha_), std::sqrt(beta_)}); }
Mat2 Povm::sqrt_transmit() const { return Mat2::diagonal({std::sqrt(beta_), std::sqrt(alpha_)}); }

const char* to_string(SchemeKind kind) { return kind == SchemeKind::Full ? "full" : "partial"; }

SchemeKind scheme_from_string(const std::string& s) {
  if (s == "full") return SchemeKind::Full;
  if (s == "partial") return SchemeKind::Partial;
  throw Error("unknown filter scheme '" + s + "'");
}

Mat4 local_filter(const Mat4& m, const std::optional<Mat2>& ka, const std::optional<Mat2>& kb) {
  const Mat4 k = tensor(ka.value_or(Mat2::identity()), kb.value_or(Mat2::identity()));
  return k * m * k.adjoint();
}

Branch make_branch(const Mat4& numerator) {
  Branch b;
  b.probability = std::max(numerator.trace().real(), 0.0);
  if (b.probability < kNegligibleProbability) return b;
  const Mat4 normalized = numerator * cplx(1.0 / b.probability);
  b.state.emplace(DensityMatrix::Trusted{}, normalized, true);
  b.fidelity = bell_fidelity(normalized);
  return b;
}

DensityMatrix filter_numerator(const DensityMatrix& rho, const std::optional<Mat2>& op_a,
                               const std::optional<Mat2>& op_b) {
  return DensityMatrix(DensityMatrix::Trusted{}, local_filter(rho.matrix(), root_of(op_a), root_of(op_b)),
                       false);
}

Branch filter_branch(const DensityMatrix& rho, const std::optional<Mat2>& op_a,
                     const std::optional<Mat2>& op_b) {
  if (!rho.normalized()) throw Error("filter_branch: input state must be normalized");
  return make_branch(filter_numerator(rho, op_a, op_b).matrix());
}

std::vector<FirstTierBranch> first_tier_branches(const DensityMatrix& rho_prime, SchemeKind kind,
                                                 const Povm& tier1) {
  if (!rho_prime.normalized()) throw Error("first_tier_branches: input state must be normalized");
  const Mat4& m = rho_prime.matrix();
  const Mat2 t = tier1.sqrt_transmit();
  const Mat2 r = tier1.sqrt_reflect();
  if (kind == SchemeKind::Partial) {
    return {
        {"T", local_filter(m, t, std::nullopt), false, false},
        {"R", local_filter(m, r, std::nullopt), true, false},
    };
  }
  return {
      {"TT", local_filter(m, t, t), false, false},
      {"TR", local_filter(m, t, r), false, true},
      {"RT", local_filter(m, r, t), true, false},
      {"RR", local_filter(m, r, r), true, true},
  };
}

Mat4 second_tier_numerator(const FirstTierBranch& branch, const Povm& tier2, bool alice_transmits,
                           bool bob_transmits) {
  auto arm = [&](bool reflected, bool transmits) -> std::optional<Mat2> {
    if (!reflected) return std::nullopt;
    return transmits ? tier2.sqrt_transmit() : tier2.sqrt_reflect();
  };
  return local_filter(branch.numerator, arm(branch.alice_reflected, alice_transmits),
                      arm(branch.bob_reflected, bob_transmits));
}

std::vector<OutcomeRecord> enumerate_full_outcomes(const DensityMatrix& rho_prime, const Povm& tier1,
                                                   const Povm& tier2) {
  return enumerate_two_tier(rho_prime, SchemeKind::Full, tier1, tier2);
}

std::vector<OutcomeRecord> enumerate_partial_outcomes(const DensityMatrix& rho_prime, const Povm& tier1,
                                                      const Povm& tier2) {
  return enumerate_two_tier(rho_prime, SchemeKind::Partial, tier1, tier2);
}

std::vector<OutcomeRecord> enumerate_outcomes(const DensityMatrix& rho_prime, const FilterScheme& scheme) {
  return enumerate_two_tier(rho_prime, scheme.kind, scheme.tier1, scheme.tier2);
}

double survival_rate(const std::vector<OutcomeRecord>& records) {
  double total = 0.0;
  for (const auto& r : records)
    if (r.in_success_set) total += r.probability;
  return total;
}

}  // namespace qrecycle
