#include "oqsd/bloch.hpp"

#include <cmath>
#include <stdexcept>

namespace oqsd {

namespace {

const std::complex<double> kI(0.0, 1.0);

Eigen::Matrix2cd pauli(int k) {
  Eigen::Matrix2cd m;
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

} // namespace

BlochState::BlochState(const Eigen::Vector4d& r) : r_(r) {
  if (r_[0] != 1.0) {
    throw std::invalid_argument("BlochState: first entry must equal 1");
  }
}

AffineQubitMap::AffineQubitMap(const Eigen::Matrix4d& m) : m_(m) {
  if (m_(0, 0) != 1.0 || m_(0, 1) != 0.0 || m_(0, 2) != 0.0 ||
      m_(0, 3) != 0.0) {
    throw std::invalid_argument("AffineQubitMap: first row must be (1,0,0,0)");
  }
}

AffineQubitMap AffineQubitMap::diagonal(double fx, double fy, double fz) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = fx;
  m(2, 2) = fy;
  m(3, 3) = fz;
  return AffineQubitMap(m);
}

BlochState apply_map(const AffineQubitMap& map, const BlochState& state) {
  Eigen::Vector4d out = map.matrix() * state.vec();
  out[0] = 1.0;
  return BlochState(out);
}

double trace_distance(const BlochState& a, const BlochState& b) {
  return 0.5 * (a.bloch3() - b.bloch3()).norm();
}

Eigen::Matrix2cd density_from_bloch(const BlochState& state) {
  Eigen::Matrix2cd rho = 0.5 * pauli(0);
  for (int k = 1; k < 4; ++k) {
    rho += 0.5 * state.vec()[k] * pauli(k);
  }
  return rho;
}

BlochState bloch_from_density(const Eigen::Matrix2cd& rho) {
  Eigen::Vector4d r;
  r[0] = 1.0;
  for (int k = 1; k < 4; ++k) {
    r[k] = (pauli(k) * rho).trace().real();
  }
  return BlochState(r);
}

Eigen::Matrix2cd apply_map_matrix(const AffineQubitMap& map,
                                  const Eigen::Matrix2cd& in) {
  // Split the input into trace part and Pauli components; the channel acts
  // as m -> T m + (tr) s on the Pauli vector.
  std::complex<double> tr = in.trace();
  Eigen::Vector3cd m;
  for (int k = 0; k < 3; ++k) {
    m[k] = (pauli(k + 1) * in).trace();
  }
  Eigen::Vector3cd mp = map.T().cast<std::complex<double>>() * m +
                        tr * map.s().cast<std::complex<double>>();
  Eigen::Matrix2cd out = 0.5 * tr * pauli(0);
  for (int k = 0; k < 3; ++k) {
    out += 0.5 * mp[k] * pauli(k + 1);
  }
  return out;
}

Eigen::Matrix4cd choi_matrix(const AffineQubitMap& map) {
  // C = (1/2) sum_{ij} E(|i><j|) (x) |i><j|, which has unit trace for a
  // trace-preserving map.
  Eigen::Matrix4cd choi = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd eij = Eigen::Matrix2cd::Zero();
      eij(i, j) = 1.0;
      Eigen::Matrix2cd img = apply_map_matrix(map, eij);
      choi.block<2, 2>(2 * i, 2 * j) += 0.5 * img;
    }
  }
  return choi;
}

double choi_min_eigenvalue(const AffineQubitMap& map) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(choi_matrix(map));
  return es.eigenvalues().minCoeff();
}

double shannon_entropy_bits(const Eigen::VectorXd& probs) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    double p = probs[i];
    if (p > 0.0) {
      s -= p * std::log2(p);
    }
  }
  return s;
}

double von_neumann_entropy(const BlochState& state) {
  double r = std::min(state.radius(), 1.0);
  Eigen::Vector2d lam((1.0 + r) / 2.0, (1.0 - r) / 2.0);
  return shannon_entropy_bits(lam);
}

} // namespace oqsd
