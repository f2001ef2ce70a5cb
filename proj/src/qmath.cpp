#include "qrecycle/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qrecycle {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kNegativeClamp = 1e-10;
constexpr int kMaxSweeps = 64;

template <std::size_t N>
double off_diagonal_max(const SquareMatrix<N>& a) {
  double m = 0.0;
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = r + 1; c < N; ++c) m = std::max(m, std::abs(a(r, c)));
  return m;
}

template <std::size_t N>
double max_abs_entry(const SquareMatrix<N>& a) {
  double m = 0.0;
  for (const auto& e : a.entries()) m = std::max(m, std::abs(e));
  return m;
}

// Applies the unitary U = [[c, s], [-s*conj(e), c*conj(e)]] acting on the
// (p, q) plane: a <- U^dagger a U and v <- v U.
template <std::size_t N>
void rotate(SquareMatrix<N>& a, SquareMatrix<N>& v, std::size_t p, std::size_t q, double c,
            double s, cplx e) {
  const cplx upp = c, upq = s, uqp = -s * std::conj(e), uqq = c * std::conj(e);
  // columns: a <- a U
  for (std::size_t r = 0; r < N; ++r) {
    const cplx arp = a(r, p), arq = a(r, q);
    a(r, p) = arp * upp + arq * uqp;
    a(r, q) = arp * upq + arq * uqq;
    const cplx vrp = v(r, p), vrq = v(r, q);
    v(r, p) = vrp * upp + vrq * uqp;
    v(r, q) = vrp * upq + vrq * uqq;
  }
  // rows: a <- U^dagger a
  for (std::size_t c2 = 0; c2 < N; ++c2) {
    const cplx apc = a(p, c2), aqc = a(q, c2);
    a(p, c2) = std::conj(upp) * apc + std::conj(uqp) * aqc;
    a(q, c2) = std::conj(upq) * apc + std::conj(uqq) * aqc;
  }
}

}  // namespace

Mat4 tensor(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (std::size_t ia = 0; ia < 2; ++ia)
    for (std::size_t ja = 0; ja < 2; ++ja)
      for (std::size_t ib = 0; ib < 2; ++ib)
        for (std::size_t jb = 0; jb < 2; ++jb) out(ia * 2 + ib, ja * 2 + jb) = a(ia, ja) * b(ib, jb);
  return out;
}

Mat4 partial_transpose_b(const Mat4& rho) {
  Mat4 out;
  for (std::size_t ia = 0; ia < 2; ++ia)
    for (std::size_t ib = 0; ib < 2; ++ib)
      for (std::size_t ja = 0; ja < 2; ++ja)
        for (std::size_t jb = 0; jb < 2; ++jb) out(ia * 2 + jb, ja * 2 + ib) = rho(ia * 2 + ib, ja * 2 + jb);
  return out;
}

Mat4 partial_transpose_a(const Mat4& rho) {
  Mat4 out;
  for (std::size_t ia = 0; ia < 2; ++ia)
    for (std::size_t ib = 0; ib < 2; ++ib)
      for (std::size_t ja = 0; ja < 2; ++ja)
        for (std::size_t jb = 0; jb < 2; ++jb) out(ja * 2 + ib, ia * 2 + jb) = rho(ia * 2 + ib, ja * 2 + jb);
  return out;
}

template <std::size_t N>
HermitianEigenSystem<N> hermitian_eigensystem(const SquareMatrix<N>& input) {
  if (!is_hermitian(input, kHermitianTol)) throw Error("hermitian_eigensystem: matrix is not Hermitian");

  // Symmetrize so round-off in the input cannot leak into the rotations.
  SquareMatrix<N> a = input + input.adjoint();
  a *= 0.5;
  SquareMatrix<N> v = SquareMatrix<N>::identity();

  const double scale = std::max(max_abs_entry(a), 1e-300);
  const double stop = 1e-15 * scale;

  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_max(a) > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= stop * 1e-3) continue;
        const cplx e = a(p, q) / r;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        // Zero the (p, q) entry of the real symmetric block [[app, r], [r, aqq]].
        const double zeta = (aqq - app) / (2.0 * r);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        rotate(a, v, p, q, c, s, e);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigenSystem<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < N; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

template <std::size_t N>
SquareMatrix<N> psd_sqrt(const SquareMatrix<N>& a) {
  const auto es = hermitian_eigensystem(a);
  SquareMatrix<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    double lambda = es.eigenvalues[k];
    if (lambda < -kNegativeClamp) throw Error("psd_sqrt: matrix is not PSD");
    const double root = std::sqrt(std::max(lambda, 0.0));
    if (root == 0.0) continue;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c)
        out(r, c) += root * es.eigenvectors(r, k) * std::conj(es.eigenvectors(c, k));
  }
  return out;
}

template HermitianEigenSystem<2> hermitian_eigensystem<2>(const Mat2&);
template HermitianEigenSystem<4> hermitian_eigensystem<4>(const Mat4&);
template Mat2 psd_sqrt<2>(const Mat2&);
template Mat4 psd_sqrt<4>(const Mat4&);

}  // namespace qrecycle
