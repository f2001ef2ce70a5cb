#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "qrecycle/channel.hpp"
#include "qrecycle/filtering.hpp"
#include "qrecycle/qmath.hpp"

using namespace qrecycle;

namespace {

Mat2 random_hermitian2(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  const double a = n(rng), d = n(rng);
  const cplx b(n(rng), n(rng));
  return Mat2{a, b, std::conj(b), d};
}

Mat4 random_hermitian4(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat4 m;
  for (std::size_t r = 0; r < 4; ++r) {
    m(r, r) = n(rng);
    for (std::size_t c = r + 1; c < 4; ++c) {
      m(r, c) = cplx(n(rng), n(rng));
      m(c, r) = std::conj(m(r, c));
    }
  }
  return m;
}

// The unnormalized both-reflected state after an ideal channel at alpha = beta = 0.5.
Mat4 both_reflected_half() {
  Mat4 m;
  m(0, 0) = m(3, 3) = 0.125;
  m(0, 3) = m(3, 0) = 0.125;
  return m;
}

}  // namespace

TEST_CASE("tensor follows the Alice-left Kronecker convention") {
  CHECK(max_abs_diff(tensor(Mat2::identity(), Mat2::identity()), Mat4::identity()) == 0.0);

  const Mat2 half = Mat2::diagonal({std::sqrt(0.5), std::sqrt(0.5)});
  CHECK(max_abs_diff(tensor(half, Mat2::identity()), Mat4::diagonal({std::sqrt(.5), std::sqrt(.5), std::sqrt(.5), std::sqrt(.5)})) <
        1e-15);

  const Mat2 e0 = Mat2::diagonal({1.0, 0.9});
  CHECK(max_abs_diff(tensor(e0, e0), Mat4::diagonal({1.0, 0.9, 0.9, 0.81})) < 1e-15);

  // Off-diagonal placement: |0><1| (x) I puts ones at (0,2) and (1,3).
  const Mat2 lower{0.0, 1.0, 0.0, 0.0};
  const Mat4 k = tensor(lower, Mat2::identity());
  CHECK(k(0, 2) == cplx(1.0));
  CHECK(k(1, 3) == cplx(1.0));
  CHECK(k(0, 1) == cplx(0.0));
}

TEST_CASE("SquareMatrix rejects a wrong entry count") {
  CHECK_THROWS_AS((Mat2{1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS((Mat4{1.0, 2.0, 3.0, 4.0}), Error);
}

TEST_CASE("tensor trace factorizes") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Mat2 a = random_hermitian2(rng), b = random_hermitian2(rng);
    CHECK(std::abs(tensor(a, b).trace() - a.trace() * b.trace()) < 1e-12);
  }
}

TEST_CASE("partial transpose on Bob's qubit") {
  CHECK(max_abs_diff(partial_transpose_b(Mat4::identity()), Mat4::identity()) == 0.0);

  // The |00><11| coherence moves to |01><10|.
  const Mat4 pt = partial_transpose_b(both_reflected_half());
  CHECK(pt(0, 3) == cplx(0.0));
  CHECK(pt(3, 0) == cplx(0.0));
  CHECK(pt(1, 2) == cplx(0.125));
  CHECK(pt(2, 1) == cplx(0.125));
  CHECK(pt(0, 0) == cplx(0.125));
  CHECK(pt(3, 3) == cplx(0.125));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Mat4 h = random_hermitian4(rng);
    CHECK(max_abs_diff(partial_transpose_b(partial_transpose_b(h)), h) == 0.0);
    const Mat4 pt_b = partial_transpose_b(h);
    CHECK(is_hermitian(pt_b, 1e-14));
    CHECK(std::abs(pt_b.trace() - h.trace()) < 1e-13);
    CHECK(max_abs_diff(pt_b, oracle::to_lib(oracle::pt_b(oracle::from_lib(h)))) == 0.0);
    // Spectra of the two partial transposes coincide.
    const auto ea = hermitian_eigenvalues(partial_transpose_a(h));
    const auto eb = hermitian_eigenvalues(pt_b);
    for (std::size_t k = 0; k < 4; ++k) CHECK(ea[k] == doctest::Approx(eb[k]).epsilon(1e-12));
  }
}

TEST_CASE("hermitian eigenvalues") {
  CHECK(hermitian_eigenvalues(Mat4::diagonal({4.0, 2.0, 3.0, 1.0})) == std::array<double, 4>{1.0, 2.0, 3.0, 4.0});

  const auto ev = hermitian_eigenvalues(partial_transpose_b(both_reflected_half()));
  const std::array<double, 4> expected{-0.125, 0.125, 0.125, 0.125};
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(ev[k] - expected[k]) < 1e-12);

  // Generic parameters against the closed-form spectrum.
  const double a = 0.3, b = 0.7, g = 0.2;
  const Mat4 rr = oracle::to_lib(oracle::filt(oracle::damp(g), oracle::sqrt_reflect(a), oracle::sqrt_reflect(a)));
  const auto numeric = hermitian_eigenvalues(partial_transpose_b(rr));
  const auto closed = oracle::both_reflected_pt_eigs(a, b, g);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(numeric[k] - closed[k]) < 1e-10);

  Mat4 skew = Mat4::identity();
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigenvalues(skew), Error);
}

TEST_CASE("Jacobi eigensystem reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Mat4 h = random_hermitian4(rng);
    const auto es = hermitian_eigensystem(h);
    Mat4 rebuilt;
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
          rebuilt(r, c) += es.eigenvalues[k] * es.eigenvectors(r, k) * std::conj(es.eigenvectors(c, k));
    CHECK(max_abs_diff(rebuilt, h) < 1e-10);
    CHECK(std::is_sorted(es.eigenvalues.begin(), es.eigenvalues.end()));
    const auto ref = oracle::eig(oracle::from_lib(h));
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(es.eigenvalues[k] - ref[k]) < 1e-10);
  }
}

TEST_CASE("eigenvalues of a density matrix sum to its trace") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Mat4 rho = oracle::to_lib(oracle::random_state(rng));
    const auto ev = hermitian_eigenvalues(rho);
    CHECK(std::abs(ev[0] + ev[1] + ev[2] + ev[3] - 1.0) < 1e-10);
  }
}

TEST_CASE("psd_sqrt") {
  CHECK(max_abs_diff(psd_sqrt(Mat2::diagonal({0.3, 0.7})), Mat2::diagonal({std::sqrt(0.3), std::sqrt(0.7)})) < 1e-15);
  CHECK(max_abs_diff(psd_sqrt(Mat4::identity()), Mat4::identity()) < 1e-15);

  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const Mat4 rho = oracle::to_lib(oracle::random_state(rng));
    const Mat4 root = psd_sqrt(rho);
    CHECK(max_abs_diff(root * root, rho) < 1e-10);
    CHECK(hermitian_eigenvalues(root)[0] >= -1e-12);
  }
  // Rank-deficient input (a pure state) still squares back.
  const Mat4 bell = epr_state().matrix();
  CHECK(max_abs_diff(psd_sqrt(bell) * psd_sqrt(bell), bell) < 1e-10);

  // Tiny negative round-off is clamped, a real negative eigenvalue is not.
  CHECK_NOTHROW(psd_sqrt(Mat2::diagonal({1.0, -5e-11})));
  CHECK_THROWS_AS(psd_sqrt(Mat2::diagonal({1.0, -1e-3})), Error);
}
