#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "oqsd/bloch.hpp"
#include "oqsd/models.hpp"

namespace oqsd {

// Time-local generator reconstruction from trajectory data.  Four linearly
// independent initial states give 12 scalar derivative equations per time,
// enough to solve for the Kossakowski matrix and the Hamiltonian vector of
//   d rho/dt = -i[h.sigma, rho]
//            + sum_{ab} c_{ab} (sigma_a rho sigma_b - {sigma_b sigma_a, rho}/2)
// with Hermitian c = c_sym + i c_asym (6 + 3 real unknowns) and real h (3).

struct GeneratorEstimate {
  double t = 0.0;
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();      // real symmetric part
  Eigen::Matrix3d c_asym = Eigen::Matrix3d::Zero(); // imaginary antisym part
  Eigen::Vector3d h = Eigen::Vector3d::Zero();
  double residual = 0.0;
  double condition_number = 0.0;
};

struct CanonicalRate {
  double rate = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::Zero(); // Pauli-basis axis
};

enum class DiffMode { Central, Forward };

/// Time series of the four canonical initial states
/// (0,0,1), (0,0,-1), (1,0,0), (0,1,0) on a shared grid.
class TrajectoryBundle {
public:
  TrajectoryBundle(std::vector<double> grid,
                   std::array<std::vector<BlochState>, 4> series);

  static const std::array<BlochState, 4>& initial_states();

  /// Exact sampling of a catalog map over the given grid.
  static TrajectoryBundle sample(const ModelSpec& model,
                                 std::vector<double> grid);

  const std::vector<double>& grid() const { return grid_; }

  /// State of series i at time t: exact grid lookup, else linear
  /// interpolation between the bracketing grid points.
  BlochState state(int series, double t) const;

  /// Additive Gaussian noise of the given amplitude on every Bloch
  /// component (robustness experiments).
  void add_noise(double amplitude, std::uint64_t seed);

private:
  std::vector<double> grid_;
  std::array<std::vector<BlochState>, 4> series_;
};

/// Solves the 12x12 linear system at time t with derivatives from the
/// difference step h.  Throws IllConditionedError (carrying the condition
/// number) above 1e12.
GeneratorEstimate estimate_generator(const TrajectoryBundle& bundle, double t,
                                     double h,
                                     DiffMode mode = DiffMode::Central);

/// Convenience path that samples the model exactly at the stencil points
/// instead of interpolating a pre-built bundle.
GeneratorEstimate estimate_generator(const ModelSpec& model, double t,
                                     double h,
                                     DiffMode mode = DiffMode::Central);

/// Eigendecomposition of the symmetric Kossakowski part: canonical decay
/// rates (descending, possibly negative) and their Pauli-basis directions.
std::array<CanonicalRate, 3> canonical_rates(const GeneratorEstimate& est);

} // namespace oqsd
