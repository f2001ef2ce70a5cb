#pragma once

#include <utility>

#include "qrecycle/qmath.hpp"

namespace qrecycle {

/// Damping probability gamma in [0, 1] of an amplitude-damping arm.
class DampingParams {
 public:
  explicit DampingParams(double gamma);

  /// gamma = 1 - exp(-t / T1).
  static DampingParams from_time(double t, double t1);

  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

/// Two-qubit density operator. Either trace-normalized or an explicitly
/// unnormalized (positive-scale) PSD operator.
class DensityMatrix {
 public:
  enum class Normalization { Normalized, Unnormalized };

  /// Validates Hermiticity, PSD-ness and (when normalized) unit trace.
  static DensityMatrix from_matrix(const Mat4& m, Normalization n = Normalization::Normalized);

  /// Skips validation. Only for results of maps that are closed over valid states.
  struct Trusted {};
  DensityMatrix(Trusted, const Mat4& m, bool normalized) : mat_(m), normalized_(normalized) {}

  const Mat4& matrix() const { return mat_; }
  bool normalized() const { return normalized_; }
  double trace() const { return mat_.trace().real(); }

  /// Rescales to unit trace. Throws if the trace is not positive.
  DensityMatrix normalize() const;

 private:
  Mat4 mat_;
  bool normalized_ = true;
};

/// |Phi+><Phi+| with |Phi+> = (|00> + |11>) / sqrt(2).
DensityMatrix epr_state();

/// E0 = diag(1, sqrt(1 - gamma)), E1 = sqrt(gamma) |0><1|.
std::pair<Mat2, Mat2> kraus_pair(const DampingParams& p);

/// Both arms through the same damping channel, summed over the four
/// Kraus products. Input must be normalized.
DensityMatrix apply_channel(const DensityMatrix& rho, const DampingParams& p);

/// Closed form of apply_channel(epr_state(), gamma).
DensityMatrix damped_epr_state(double gamma);

namespace testing {
/// Independent damping on each arm.
DensityMatrix apply_channel_asymmetric(const DensityMatrix& rho, const DampingParams& alice,
                                       const DampingParams& bob);
}  // namespace testing

}  // namespace qrecycle
