#include "qrecycle/channel.hpp"

#include <cmath>
#include <string>

namespace qrecycle {

namespace {
constexpr double kTol = 1e-10;

DensityMatrix apply_two_arm(const DensityMatrix& rho, const DampingParams& pa, const DampingParams& pb) {
  if (!rho.normalized()) throw Error("apply_channel: input state must be normalized");
  const auto [a0, a1] = kraus_pair(pa);
  const auto [b0, b1] = kraus_pair(pb);
  Mat4 out;
  for (const Mat2* ka : {&a0, &a1}) {
    for (const Mat2* kb : {&b0, &b1}) {
      const Mat4 k = tensor(*ka, *kb);
      out += k * rho.matrix() * k.adjoint();
    }
  }
  return DensityMatrix(DensityMatrix::Trusted{}, out, true);
}
}  // namespace

DampingParams::DampingParams(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("DampingParams: gamma must lie in [0, 1]");
}

DampingParams DampingParams::from_time(double t, double t1) {
  if (!(t >= 0.0) || !(t1 > 0.0)) throw Error("DampingParams: need t >= 0 and T1 > 0");
  return DampingParams(1.0 - std::exp(-t / t1));
}

DensityMatrix DensityMatrix::from_matrix(const Mat4& m, Normalization n) {
  if (!is_hermitian(m, kTol)) throw Error("DensityMatrix: matrix is not Hermitian");
  const auto ev = hermitian_eigenvalues(m);
  if (ev.front() < -kTol) throw Error("DensityMatrix: matrix has a negative eigenvalue");
  const bool normalized = n == Normalization::Normalized;
  if (normalized && std::abs(m.trace().real() - 1.0) > kTol) {
    throw Error("DensityMatrix: trace is " + std::to_string(m.trace().real()) + ", expected 1");
  }
  return DensityMatrix(Trusted{}, m, normalized);
}

DensityMatrix DensityMatrix::normalize() const {
  const double t = trace();
  if (!(t > 0.0)) throw Error("DensityMatrix::normalize: trace is not positive");
  return DensityMatrix(Trusted{}, mat_ * cplx(1.0 / t), true);
}

DensityMatrix epr_state() {
  Mat4 m;
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return DensityMatrix(DensityMatrix::Trusted{}, m, true);
}

std::pair<Mat2, Mat2> kraus_pair(const DampingParams& p) {
  const double g = p.gamma();
  return {Mat2{1.0, 0.0, 0.0, std::sqrt(1.0 - g)}, Mat2{0.0, std::sqrt(g), 0.0, 0.0}};
}

DensityMatrix apply_channel(const DensityMatrix& rho, const DampingParams& p) {
  return apply_two_arm(rho, p, p);
}

DensityMatrix damped_epr_state(double gamma) {
  const double g = DampingParams(gamma).gamma();
  Mat4 m;
  m(0, 0) = (1.0 + g * g) / 2.0;
  m(1, 1) = m(2, 2) = g * (1.0 - g) / 2.0;
  m(3, 3) = (1.0 - g) * (1.0 - g) / 2.0;
  m(0, 3) = m(3, 0) = (1.0 - g) / 2.0;
  return DensityMatrix(DensityMatrix::Trusted{}, m, true);
}

namespace testing {
DensityMatrix apply_channel_asymmetric(const DensityMatrix& rho, const DampingParams& alice,
                                       const DampingParams& bob) {
  return apply_two_arm(rho, alice, bob);
}
}  // namespace testing

}  // namespace qrecycle
