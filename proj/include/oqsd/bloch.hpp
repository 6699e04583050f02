#pragma once

#include <Eigen/Dense>

namespace oqsd {

// Qubit states as affine 4-vectors (1, x, y, z) and channels as real 4x4
// matrices with first row (1, 0, 0, 0).  The lower-right 3x3 block T and the
// lower-left translation s fully determine a trace-preserving qubit map.

inline constexpr double kPhysicalTol = 1e-12;
inline constexpr double kChoiTol = 1e-10;

class BlochState {
public:
  BlochState() : r_(1.0, 0.0, 0.0, 0.0) {}
  BlochState(double x, double y, double z) : r_(1.0, x, y, z) {}
  explicit BlochState(const Eigen::Vector4d& r);

  const Eigen::Vector4d& vec() const { return r_; }
  double x() const { return r_[1]; }
  double y() const { return r_[2]; }
  double z() const { return r_[3]; }
  Eigen::Vector3d bloch3() const { return r_.tail<3>(); }

  double radius() const { return r_.tail<3>().norm(); }
  bool physical(double tol = kPhysicalTol) const {
    return radius() * radius() <= 1.0 + tol;
  }

private:
  Eigen::Vector4d r_;
};

class AffineQubitMap {
public:
  AffineQubitMap() : m_(Eigen::Matrix4d::Identity()) {}
  explicit AffineQubitMap(const Eigen::Matrix4d& m);

  static AffineQubitMap identity() { return AffineQubitMap(); }
  /// Unital diagonal map diag(1, fx, fy, fz).
  static AffineQubitMap diagonal(double fx, double fy, double fz);

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d T() const { return m_.bottomRightCorner<3, 3>(); }
  Eigen::Vector3d s() const { return m_.bottomLeftCorner<3, 1>(); }
  bool unital(double tol = kPhysicalTol) const { return s().norm() <= tol; }

private:
  Eigen::Matrix4d m_;
};

/// r' = T r + s in the affine picture; the leading 1 is preserved.
BlochState apply_map(const AffineQubitMap& map, const BlochState& state);

/// Half the Euclidean norm of the Bloch-vector difference (the qubit
/// trace-distance identity).
double trace_distance(const BlochState& a, const BlochState& b);

/// Smallest eigenvalue of the Choi operator of the map, with the Choi
/// operator normalized to unit trace.  >= -1e-10 certifies complete
/// positivity at tolerance.
double choi_min_eigenvalue(const AffineQubitMap& map);

/// Unit-trace Choi operator reconstructed from the affine map.
Eigen::Matrix4cd choi_matrix(const AffineQubitMap& map);

/// von Neumann entropy in bits; eigenvalues are (1 +- |r|)/2.
double von_neumann_entropy(const BlochState& state);

// Conversions between the affine vector and the 2x2 density matrix.
Eigen::Matrix2cd density_from_bloch(const BlochState& state);
BlochState bloch_from_density(const Eigen::Matrix2cd& rho);

/// Action of the channel on an arbitrary 2x2 matrix (linear extension of the
/// affine action on states).
Eigen::Matrix2cd apply_map_matrix(const AffineQubitMap& map,
                                  const Eigen::Matrix2cd& in);

/// -sum p log2 p over a probability vector, with 0 log 0 = 0.
double shannon_entropy_bits(const Eigen::VectorXd& probs);

} // namespace oqsd
