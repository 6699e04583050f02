#pragma once

#include <utility>
#include <vector>

#include "oqsd/bloch.hpp"
#include "oqsd/models.hpp"

namespace oqsd {

// Trace-distance information-flow machinery: sigma(t), the windowed BLP
// measure, cutoff time tau_epsilon, the average inflow rate M_tau = BLP/tau,
// period rules for (quasi-)periodic maps, and central-spin mutual
// information.

enum class TauRule { Tolerance, Periodic, QuasiPeriodic };

struct MeasureResult {
  double tau = 0.0;
  double blp = 0.0;
  double rate = 0.0; // blp / tau
  BlochState pair_a;
  BlochState pair_b;
  TauRule rule = TauRule::Tolerance;
  double epsilon = 0.0; // tolerance used, or the period for periodic rules
};

struct MutualInfoSample {
  double t = 0.0;
  double value = 0.0; // bits
};

/// Central finite difference [D(t+h) - D(t-h)] / 2h of the evolved-pair
/// trace distance.
double sigma(const ModelSpec& model, const BlochState& a, const BlochState& b,
             double t, double h = 1e-6);

/// Entrywise L1 distance of the map at t from the identity map.
double map_l1_distance(const ModelSpec& model, double t);

/// Earliest t > 0 (or the k-th such, via recurrence_index) where the L1
/// distance to the identity is <= epsilon while decreasing, refined to 1e-6.
/// Throws NotFoundError carrying the minimum norm achieved.
double find_tau(const ModelSpec& model, double epsilon, double t_max,
                int recurrence_index = 1);

/// L1 norm at the first local minimum of the distance-to-identity curve;
/// the auto-selected tolerance for non-returning processes.
double auto_epsilon(const ModelSpec& model, double t_max);

/// Total trace-distance rise over [0, tau] for the evolved pair (the BLP
/// integral restricted to sigma > 0 windows), with extrema refined beyond
/// the grid.
double blp_windowed(const ModelSpec& model, const BlochState& a,
                    const BlochState& b, double tau, double dt);

/// Maximizes blp_windowed over antipodal pure pairs on a Fibonacci-sphere
/// covering, followed by a local shrink refinement.
MeasureResult optimal_pair_search(const ModelSpec& model, double tau,
                                  int n_points = 2048, double dt = -1.0);

/// Measure over one exact period of a periodic map (central spin; two-spin
/// with commensurate frequencies).  Throws UnsupportedError otherwise.
MeasureResult measure_rate_periodic(const ModelSpec& model);

/// Least common period of the frequencies after continued-fraction
/// rationalization of each ratio to the given relative tolerance.
double rationalize_period(const std::vector<double>& frequencies, double tol);

/// Mutual information between the central spin and its bath at time t.
/// The fast path uses S_env = N bits and S_joint = S(rho0) + N bits; the
/// oracle path (N <= 10) computes all three entropies from the exact joint
/// state.
MutualInfoSample mutual_information(int spins, double coupling,
                                    const Eigen::Matrix2cd& rho0, double t,
                                    bool use_oracle = false);

} // namespace oqsd
