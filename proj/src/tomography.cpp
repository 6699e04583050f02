#include "oqsd/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "oqsd/errors.hpp"

namespace oqsd {

namespace {

using Eigen::Matrix2cd;
using std::complex;

const Matrix2cd& pauli(int a) {
  static const std::array<Matrix2cd, 3> s = [] {
    std::array<Matrix2cd, 3> out;
    const complex<double> i(0.0, 1.0);
    out[0] << 0, 1, 1, 0;
    out[1] << 0, -i, i, 0;
    out[2] << 1, 0, 0, -1;
    return out;
  }();
  return s[size_t(a)];
}

Eigen::Vector3d bloch_rate(const Matrix2cd& drho) {
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) v[k] = (pauli(k) * drho).trace().real();
  return v;
}

// Generator action for one unit parameter.  Parameter layout:
//   0..5  symmetric c entries (11, 22, 33, 12, 13, 23)
//   6..8  antisymmetric imaginary c entries (12, 13, 23)
//   9..11 Hamiltonian components h_x, h_y, h_z
Matrix2cd unit_action(int param, const Matrix2cd& rho) {
  const complex<double> i(0.0, 1.0);
  auto dissip = [&rho](int a, int b, complex<double> c) {
    Matrix2cd anti = pauli(b) * pauli(a) * rho + rho * pauli(b) * pauli(a);
    return c * (pauli(a) * rho * pauli(b) - 0.5 * anti);
  };
  static const int off[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  if (param < 3) return dissip(param, param, 1.0);
  if (param < 6) {
    auto [a, b] = off[param - 3];
    return dissip(a, b, 1.0) + dissip(b, a, 1.0);
  }
  if (param < 9) {
    auto [a, b] = off[param - 6];
    return dissip(a, b, i) + dissip(b, a, -i);
  }
  Matrix2cd h = pauli(param - 9);
  return -i * (h * rho - rho * h);
}

} // namespace

TrajectoryBundle::TrajectoryBundle(std::vector<double> grid,
                                   std::array<std::vector<BlochState>, 4> series)
    : grid_(std::move(grid)), series_(std::move(series)) {
  if (grid_.size() < 2) {
    throw std::invalid_argument("TrajectoryBundle: need at least two times");
  }
  if (!std::is_sorted(grid_.begin(), grid_.end())) {
    throw std::invalid_argument("TrajectoryBundle: grid must be sorted");
  }
  for (const auto& s : series_) {
    if (s.size() != grid_.size()) {
      throw std::invalid_argument("TrajectoryBundle: series/grid mismatch");
    }
    for (const auto& st : s) {
      if (!st.physical(1e-6)) {
        throw std::invalid_argument("TrajectoryBundle: unphysical state");
      }
    }
  }
}

const std::array<BlochState, 4>& TrajectoryBundle::initial_states() {
  static const std::array<BlochState, 4> states{
      BlochState(0, 0, 1), BlochState(0, 0, -1), BlochState(1, 0, 0),
      BlochState(0, 1, 0)};
  return states;
}

TrajectoryBundle TrajectoryBundle::sample(const ModelSpec& model,
                                          std::vector<double> grid) {
  std::array<std::vector<BlochState>, 4> series;
  for (auto& s : series) s.reserve(grid.size());
  for (double t : grid) {
    AffineQubitMap e = map_at(model, t);
    for (int i = 0; i < 4; ++i) {
      series[size_t(i)].push_back(apply_map(e, initial_states()[size_t(i)]));
    }
  }
  return TrajectoryBundle(std::move(grid), std::move(series));
}

BlochState TrajectoryBundle::state(int series, double t) const {
  if (series < 0 || series > 3) {
    throw std::invalid_argument("TrajectoryBundle: series index in 0..3");
  }
  if (t < grid_.front() - 1e-12 || t > grid_.back() + 1e-12) {
    throw std::invalid_argument("TrajectoryBundle: time outside grid");
  }
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t - 1e-12);
  size_t hi = size_t(it - grid_.begin());
  const auto& s = series_[size_t(series)];
  if (hi < grid_.size() && std::abs(grid_[hi] - t) <= 1e-12) return s[hi];
  if (hi == 0 || hi >= grid_.size()) {
    throw std::invalid_argument("TrajectoryBundle: time outside grid");
  }
  double w = (t - grid_[hi - 1]) / (grid_[hi] - grid_[hi - 1]);
  Eigen::Vector3d r =
      (1.0 - w) * s[hi - 1].bloch3() + w * s[hi].bloch3();
  return BlochState(r[0], r[1], r[2]);
}

void TrajectoryBundle::add_noise(double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, amplitude);
  for (auto& s : series_) {
    for (auto& st : s) {
      Eigen::Vector3d r = st.bloch3();
      for (int k = 0; k < 3; ++k) r[k] += gauss(rng);
      double n = r.norm();
      if (n > 1.0) r /= n; // keep the noisy state physical
      st = BlochState(r[0], r[1], r[2]);
    }
  }
}

namespace {

GeneratorEstimate solve_system(
    double t, const std::array<BlochState, 4>& at_t,
    const std::array<Eigen::Vector3d, 4>& derivs) {
  Eigen::MatrixXd A(12, 12);
  Eigen::VectorXd b(12);
  for (int i = 0; i < 4; ++i) {
    Matrix2cd rho = density_from_bloch(at_t[size_t(i)]);
    for (int j = 0; j < 12; ++j) {
      A.block<3, 1>(3 * i, j) = bloch_rate(unit_action(j, rho));
    }
    b.segment<3>(3 * i) = derivs[size_t(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  double cond = svd.singularValues()(0) / svd.singularValues()(11);
  if (!std::isfinite(cond) || cond > 1e12) {
    throw IllConditionedError("estimate_generator: singular system", cond);
  }
  Eigen::VectorXd theta = svd.solve(b);

  GeneratorEstimate est;
  est.t = t;
  est.condition_number = cond;
  est.residual = (A * theta - b).norm();
  est.c.diagonal() << theta[0], theta[1], theta[2];
  static const int off[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    auto [a, bb] = off[k];
    est.c(a, bb) = est.c(bb, a) = theta[3 + k];
    est.c_asym(a, bb) = theta[6 + k];
    est.c_asym(bb, a) = -theta[6 + k];
  }
  est.h = theta.segment<3>(9);
  return est;
}

} // namespace

GeneratorEstimate estimate_generator(const TrajectoryBundle& bundle, double t,
                                     double h, DiffMode mode) {
  if (h <= 0.0) throw std::invalid_argument("estimate_generator: h > 0");
  std::array<BlochState, 4> at_t;
  std::array<Eigen::Vector3d, 4> derivs;
  for (int i = 0; i < 4; ++i) {
    at_t[size_t(i)] = bundle.state(i, t);
    Eigen::Vector3d hi = bundle.state(i, t + h).bloch3();
    Eigen::Vector3d lo = mode == DiffMode::Central
                             ? bundle.state(i, t - h).bloch3()
                             : at_t[size_t(i)].bloch3();
    derivs[size_t(i)] = (hi - lo) / (mode == DiffMode::Central ? 2.0 * h : h);
  }
  return solve_system(t, at_t, derivs);
}

GeneratorEstimate estimate_generator(const ModelSpec& model, double t,
                                     double h, DiffMode mode) {
  std::vector<double> grid =
      mode == DiffMode::Central
          ? std::vector<double>{t - h, t, t + h}
          : std::vector<double>{t, t + h};
  return estimate_generator(TrajectoryBundle::sample(model, std::move(grid)),
                            t, h, mode);
}

std::array<CanonicalRate, 3> canonical_rates(const GeneratorEstimate& est) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(est.c);
  std::array<CanonicalRate, 3> out;
  for (int k = 0; k < 3; ++k) {
    out[size_t(k)].rate = eig.eigenvalues()(k);
    out[size_t(k)].direction = eig.eigenvectors().col(k);
  }
  // Descending rates; stable so degenerate blocks keep the solver's
  // axis order (x, y, z for a diagonal c).
  std::stable_sort(out.begin(), out.end(),
                   [](const CanonicalRate& a, const CanonicalRate& b) {
                     return a.rate > b.rate + 1e-12;
                   });
  for (int k = 0; k < 3; ++k) {
    // Fix the overall sign for reproducibility.
    int lead = 0;
    for (int m = 1; m < 3; ++m) {
      if (std::abs(out[size_t(k)].direction[m]) >
          std::abs(out[size_t(k)].direction[lead]) + 1e-12) {
        lead = m;
      }
    }
    if (out[size_t(k)].direction[lead] < 0.0) {
      out[size_t(k)].direction = -out[size_t(k)].direction;
    }
  }
  return out;
}

} // namespace oqsd
