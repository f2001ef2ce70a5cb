#include "qrecycle/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

namespace qrecycle {

namespace {
constexpr double kTol = 1e-10;

void require_normalized(const DensityMatrix& rho, const char* where) {
  if (!rho.normalized()) throw Error(std::string(where) + ": state must be normalized");
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace

double bell_fidelity(const Mat4& s) {
  return clamp_unit(0.5 * (s(0, 0).real() + s(3, 3).real() + 2.0 * s(0, 3).real()));
}

double uhlmann_fidelity(const DensityMatrix& target, const DensityMatrix& sigma) {
  require_normalized(target, "fidelity");
  require_normalized(sigma, "fidelity");
  const Mat4 root = psd_sqrt(target.matrix());
  const auto inner = hermitian_eigenvalues(root * sigma.matrix() * root);
  double tr = 0.0;
  for (double l : inner) tr += std::sqrt(std::max(l, 0.0));
  return clamp_unit(tr * tr);
}

namespace {

// Unit vector spanning a rank-one state, if the state is pure within kTol.
std::optional<std::array<cplx, 4>> pure_vector(const DensityMatrix& rho) {
  const auto es = hermitian_eigensystem(rho.matrix());
  if (es.eigenvalues[2] > kTol || std::abs(es.eigenvalues[3] - 1.0) > kTol) return std::nullopt;
  std::array<cplx, 4> psi{};
  for (std::size_t r = 0; r < 4; ++r) psi[r] = es.eigenvectors(r, 3);
  return psi;
}

double overlap(const std::array<cplx, 4>& psi, const Mat4& sigma) {
  cplx acc = 0.0;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) acc += std::conj(psi[r]) * sigma(r, c) * psi[c];
  return clamp_unit(acc.real());
}

}  // namespace

double fidelity(const DensityMatrix& target, const DensityMatrix& sigma) {
  require_normalized(target, "fidelity");
  require_normalized(sigma, "fidelity");
  // F is symmetric, so either pure argument allows the overlap form.
  if (const auto psi = pure_vector(target)) return overlap(*psi, sigma.matrix());
  if (const auto psi = pure_vector(sigma)) return overlap(*psi, target.matrix());
  return uhlmann_fidelity(target, sigma);
}

PptReport ppt_report(const DensityMatrix& rho) {
  PptReport report;
  report.eigenvalues = hermitian_eigenvalues(partial_transpose_b(rho.matrix()));
  report.min_eigenvalue = report.eigenvalues.front();
  report.is_entangled = report.min_eigenvalue < -kTol * std::max(rho.trace(), 0.0);
  return report;
}

double concurrence(const DensityMatrix& rho) {
  require_normalized(rho, "concurrence");
  const Mat2 sy{0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0};
  const Mat4 yy = tensor(sy, sy);
  const Mat4 flipped = yy * rho.matrix().conjugate() * yy;
  // Eigenvalues of rho * flipped equal those of sqrt(rho) flipped sqrt(rho).
  const Mat4 root = psd_sqrt(rho.matrix());
  auto ev = hermitian_eigenvalues(root * flipped * root);
  std::array<double, 4> mu{};
  for (std::size_t i = 0; i < 4; ++i) mu[i] = std::sqrt(std::max(ev[i], 0.0));
  std::sort(mu.begin(), mu.end(), std::greater<>());
  return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

}  // namespace qrecycle
