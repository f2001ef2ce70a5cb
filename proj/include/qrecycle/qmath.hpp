#pragma once

// Small dense complex matrices for one- and two-qubit operators.
//
// Basis ordering is |00>, |01>, |10>, |11> with Alice as the left
// (most significant) qubit. Every other module relies on this.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace qrecycle {

using cplx = std::complex<double>;

/// Raised for every contract violation in the library (bad dimensions,
/// non-Hermitian input, invalid probabilities, ...).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Fixed-size square complex matrix, row-major.
template <std::size_t N>
class SquareMatrix {
 public:
  static_assert(N == 2 || N == 4, "only one- and two-qubit operators are supported");
  static constexpr std::size_t dim = N;

  constexpr SquareMatrix() = default;

  /// Row-major entries; the list must hold exactly N*N values.
  SquareMatrix(std::initializer_list<cplx> entries) {
    if (entries.size() != N * N) {
      throw Error("SquareMatrix: expected " + std::to_string(N * N) + " entries, got " +
                  std::to_string(entries.size()));
    }
    std::size_t k = 0;
    for (const auto& e : entries) data_[k++] = e;
  }

  static SquareMatrix identity() {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static SquareMatrix diagonal(const std::array<double, N>& d) {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * N + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * N + c]; }

  const std::array<cplx, N * N>& entries() const { return data_; }

  SquareMatrix adjoint() const {
    SquareMatrix out;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  SquareMatrix conjugate() const {
    SquareMatrix out;
    for (std::size_t k = 0; k < N * N; ++k) out.data_[k] = std::conj(data_[k]);
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SquareMatrix& operator*=(cplx s) {
    for (auto& e : data_) e *= s;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, cplx s) { return a *= s; }
  friend SquareMatrix operator*(cplx s, SquareMatrix a) { return a *= s; }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix out;
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx ark = a(r, k);
        if (ark == cplx{}) continue;
        for (std::size_t c = 0; c < N; ++c) out(r, c) += ark * b(k, c);
      }
    return out;
  }

 private:
  std::array<cplx, N * N> data_{};
};

using Mat2 = SquareMatrix<2>;
using Mat4 = SquareMatrix<4>;

/// Largest entry-wise magnitude of a - b.
template <std::size_t N>
double max_abs_diff(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < N * N; ++k) m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

template <std::size_t N>
bool is_hermitian(const SquareMatrix<N>& a, double tol = 1e-10) {
  return max_abs_diff(a, a.adjoint()) <= tol;
}

/// Kronecker product; `a` acts on Alice (row index i_a*2 + i_b).
Mat4 tensor(const Mat2& a, const Mat2& b);

/// Transpose of Bob's (second) qubit index.
Mat4 partial_transpose_b(const Mat4& rho);

/// Transpose of Alice's (first) qubit index.
Mat4 partial_transpose_a(const Mat4& rho);

template <std::size_t N>
struct HermitianEigenSystem {
  std::array<double, N> eigenvalues{};  // ascending
  SquareMatrix<N> eigenvectors;         // column k belongs to eigenvalues[k]
};

/// Cyclic complex Jacobi. Throws if `a` is not Hermitian within 1e-10.
template <std::size_t N>
HermitianEigenSystem<N> hermitian_eigensystem(const SquareMatrix<N>& a);

template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const SquareMatrix<N>& a) {
  return hermitian_eigensystem(a).eigenvalues;
}

/// Unique PSD square root. Eigenvalues in [-1e-10, 0) are clamped to zero;
/// anything more negative is rejected as "not PSD".
template <std::size_t N>
SquareMatrix<N> psd_sqrt(const SquareMatrix<N>& a);

extern template HermitianEigenSystem<2> hermitian_eigensystem<2>(const Mat2&);
extern template HermitianEigenSystem<4> hermitian_eigensystem<4>(const Mat4&);
extern template Mat2 psd_sqrt<2>(const Mat2&);
extern template Mat4 psd_sqrt<4>(const Mat4&);

}  // namespace qrecycle
