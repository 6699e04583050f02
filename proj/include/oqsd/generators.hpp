#pragma once

#include <vector>

#include "oqsd/bloch.hpp"
#include "oqsd/ept.hpp"
#include "oqsd/models.hpp"

namespace oqsd {

// Higher-order generators L^(n) = E^(n) E^{-1}, location of the map's
// singular times, derivation of the higher-order master equation from the
// map's exponential-polynomial entries, and fixed-step integration of that
// equation straight through the singular points.

struct GeneratorSample {
  double t = 0.0;
  Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
  int order = 1;
  bool singular = false;
};

/// n-th order generator at time t; marked singular within 1e-9 of a map
/// determinant zero or when entries exceed 1e12.
GeneratorSample higher_generator(const ModelSpec& model, int n, double t);

/// Max deviation of L^(n+1) = d/dt L^(n) + L^(n) L^(1) over the sample times
/// (diagonal unital maps only; the derivative is taken exactly).
double verify_generator_recurrence(const ModelSpec& model, int n,
                                   const std::vector<double>& ts);

/// All zeros of the diagonal map entries (and hence of det T) in (0, t_max],
/// refined to 1e-10.  Handles both sign-change and grazing (even-order)
/// zeros.
std::vector<double> find_singularities(const ModelSpec& model, double t_max);

/// Per-component minimal annihilator of the map entries.
OdeSpec derive_ode(const ModelSpec& model);

/// rho^(k)(0) = E^(k)(0) rho0 for k = 0, ..., order-1.
std::vector<Eigen::Vector4d> initial_derivatives(const ModelSpec& model,
                                                 const BlochState& rho0,
                                                 int order);

struct OdeSolution {
  std::vector<double> grid;
  // Per component: (order x npoints) matrix, row k = k-th derivative.
  std::array<Eigen::MatrixXd, 4> states;

  double value(int comp, Eigen::Index idx) const {
    return states[comp](0, idx);
  }
};

/// Classical fixed-step RK4 on the per-component companion systems over the
/// given (uniform) time grid.  init[k] holds the k-th derivative 4-vector at
/// grid[0].
OdeSolution integrate_ode(const OdeSpec& ode,
                          const std::vector<Eigen::Vector4d>& init,
                          const std::vector<double>& grid);

/// Max residual of sum_n p_n L^(n)(t) over ts, applied row-wise with each
/// affine component's own coefficients.
double verify_generator_identity(const ModelSpec& model, const OdeSpec& ode,
                                 const std::vector<double>& ts);

} // namespace oqsd
