#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "oqsd/bloch.hpp"
#include "oqsd/ept.hpp"

namespace oqsd {

// Catalog of exactly solvable dynamical-map families.  Each model exposes the
// exact affine map at any time plus an exponential-polynomial description of
// every map entry, so derivatives of any order are exact.

struct Identity {};

struct CentralSpin {
  int spins = 1; // N bath spins
  double coupling = 0.5; // A, per-spin coupling A/sqrt(N)
  double omega() const;
};

struct TwoSpinUnequal {
  double omega1 = 1.0;
  double omega2 = 2.0;
};

struct DampedCosine {
  double gamma = 1.0;
  double omega = 1.0;
};

struct Transcendental {
  double gamma = 1.0;
  double omega = 1.0;
};

struct ThreeChannel {
  std::array<double, 3> a{1.0, 2.0, 3.0};
  std::array<double, 3> n{4.0, 4.0, 4.0};
};

struct JaynesCummings {
  double omega = 1.0;
};

// Frequencies 1 and pi fixed; couplings (1 + pi)/4 and (1 - pi)/4.
struct QuasiPeriodicThreeSpin {};

using ModelSpec =
    std::variant<Identity, CentralSpin, TwoSpinUnequal, DampedCosine,
                 Transcendental, ThreeChannel, JaynesCummings,
                 QuasiPeriodicThreeSpin>;

/// Validates parameter constraints; throws std::invalid_argument.
void validate(const ModelSpec& model);

std::string model_name(const ModelSpec& model);

/// Representative catalog instances used by property suites and `models`.
std::vector<ModelSpec> catalog_models();

/// Exact closed-form affine map at time t.
AffineQubitMap map_at(const ModelSpec& model, double t);

/// 4x4 grid of exponential-polynomial entries whose pointwise evaluation
/// matches map_at.
using EptMapMatrix = std::array<std::array<EptFunction, 4>, 4>;
EptMapMatrix map_ept(const ModelSpec& model);

/// Evaluate an EPT map matrix (or any of its derivatives) at time t.
Eigen::Matrix4d ept_matrix_eval(const EptMapMatrix& m, double t);
EptMapMatrix ept_matrix_derivative(const EptMapMatrix& m);

/// Shortest positive period among the oscillatory map entries, or the decay
/// timescale for aperiodic ones; used to scale scan grids.
double characteristic_time(const ModelSpec& model);

/// Closed-form first-order generator where the catalog has a printed one.
/// Returns singular = true when any rate magnitude exceeds 1e12.
struct ClosedFormGenerator {
  Eigen::Matrix4d L;
  bool singular = false;
};
ClosedFormGenerator generator_closed_form(const ModelSpec& model, double t);

// Joint state of the central spin plus N bath spins.  The sigma_z (x) sigma_z
// coupling keeps the state block-diagonal over bath configurations, so it is
// stored as 2^N two-by-two system blocks (bath index b fixed per block).
class JointState {
public:
  JointState(int spins, std::vector<Eigen::Matrix2cd> blocks);

  int spins() const { return spins_; }
  const std::vector<Eigen::Matrix2cd>& blocks() const { return blocks_; }

  /// Partial trace over the bath: the reduced system state.
  Eigen::Matrix2cd reduced_system() const;
  /// Partial trace over the system: diagonal bath populations.
  Eigen::VectorXd bath_populations() const;

  double system_entropy_bits() const;
  double bath_entropy_bits() const;
  double joint_entropy_bits() const;

  /// Dense 2^{N+1} x 2^{N+1} matrix, system index fastest. N <= 10 only.
  Eigen::MatrixXcd dense() const;

private:
  int spins_;
  std::vector<Eigen::Matrix2cd> blocks_;
};

/// Exact joint evolution exp(-iHt) (rho0 (x) I/2^N) exp(iHt) using the
/// diagonal structure of H.  N <= 12.
JointState central_spin_joint_evolution(int spins, double coupling,
                                        const Eigen::Matrix2cd& rho0,
                                        double t);

/// Independent cross-check: dense matrix exponential route, N <= 6.
Eigen::Matrix2cd central_spin_dense_reduced(int spins, double coupling,
                                            const Eigen::Matrix2cd& rho0,
                                            double t);

} // namespace oqsd
