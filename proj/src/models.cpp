#include "oqsd/models.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oqsd/errors.hpp"

namespace oqsd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularRate = 1e12;
const std::complex<double> kI(0.0, 1.0);

AffineQubitMap diagonal_with_drift(double fx, double fy, double fz,
                                   const Eigen::Vector3d& s) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = fx;
  m(2, 2) = fy;
  m(3, 3) = fz;
  m.bottomLeftCorner<3, 1>() = s;
  return AffineQubitMap(m);
}

/// Affine generator of three Pauli channels with rates g = (gx, gy, gz),
/// rho' += g_i (sigma_i rho sigma_i - rho).
Eigen::Matrix4d pauli_rate_generator(double gx, double gy, double gz) {
  Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
  l(1, 1) = -2.0 * (gy + gz);
  l(2, 2) = -2.0 * (gx + gz);
  l(3, 3) = -2.0 * (gx + gy);
  return l;
}

bool rate_blowup(const Eigen::Matrix4d& l) {
  return !l.allFinite() || l.cwiseAbs().maxCoeff() > kSingularRate;
}

} // namespace

double CentralSpin::omega() const {
  return 2.0 * coupling / std::sqrt(double(spins));
}

void validate(const ModelSpec& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CentralSpin>) {
          if (m.spins < 1) throw std::invalid_argument("CentralSpin: N >= 1");
          if (m.coupling < 0.0) {
            throw std::invalid_argument("CentralSpin: A >= 0");
          }
        } else if constexpr (std::is_same_v<T, TwoSpinUnequal>) {
          if (m.omega1 < 0.0 || m.omega2 < 0.0) {
            throw std::invalid_argument("TwoSpinUnequal: frequencies >= 0");
          }
        } else if constexpr (std::is_same_v<T, DampedCosine>) {
          if (m.gamma < 0.0 || m.omega < 0.0) {
            throw std::invalid_argument("DampedCosine: gamma, omega >= 0");
          }
        } else if constexpr (std::is_same_v<T, Transcendental>) {
          if (m.gamma < 0.0 || m.omega < 0.0) {
            throw std::invalid_argument("Transcendental: gamma, omega >= 0");
          }
        } else if constexpr (std::is_same_v<T, ThreeChannel>) {
          for (double a : m.a) {
            if (a < 0.0) throw std::invalid_argument("ThreeChannel: a >= 0");
          }
          double sum = 0.0;
          for (double n : m.n) {
            if (n <= 0.0) throw std::invalid_argument("ThreeChannel: n > 0");
            sum += 1.0 / n;
          }
          if (sum > 1.0 + 1e-12) {
            throw std::invalid_argument(
                "ThreeChannel: 1/n1 + 1/n2 + 1/n3 <= 1 required");
          }
        } else if constexpr (std::is_same_v<T, JaynesCummings>) {
          if (m.omega < 0.0) {
            throw std::invalid_argument("JaynesCummings: omega >= 0");
          }
        }
      },
      model);
}

std::string model_name(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) return "identity";
        else if constexpr (std::is_same_v<T, CentralSpin>) return "central-spin";
        else if constexpr (std::is_same_v<T, TwoSpinUnequal>) return "two-spin";
        else if constexpr (std::is_same_v<T, DampedCosine>) {
          return "damped-cosine";
        } else if constexpr (std::is_same_v<T, Transcendental>) {
          return "transcendental";
        } else if constexpr (std::is_same_v<T, ThreeChannel>) {
          return "three-channel";
        } else if constexpr (std::is_same_v<T, JaynesCummings>) {
          return "jaynes-cummings";
        } else {
          return "quasi-periodic";
        }
      },
      model);
}

std::vector<ModelSpec> catalog_models() {
  return {
      Identity{},
      CentralSpin{1, 0.5},
      CentralSpin{2, std::sqrt(2.0) / 2.0}, // omega = 1
      CentralSpin{3, 0.5},
      TwoSpinUnequal{1.0, 2.0},
      DampedCosine{1.0, 1.0},
      Transcendental{1.0, 1.0},
      ThreeChannel{{1.0, 2.0, 3.0}, {3.0, 3.0, 3.0}},
      JaynesCummings{1.0},
      QuasiPeriodicThreeSpin{},
  };
}

AffineQubitMap map_at(const ModelSpec& model, double t) {
  return std::visit(
      [t](const auto& m) -> AffineQubitMap {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return AffineQubitMap::identity();
        } else if constexpr (std::is_same_v<T, CentralSpin>) {
          double c = std::pow(std::cos(m.omega() * t), m.spins);
          return AffineQubitMap::diagonal(c, c, 1.0);
        } else if constexpr (std::is_same_v<T, TwoSpinUnequal>) {
          double c = std::cos(m.omega1 * t) * std::cos(m.omega2 * t);
          return AffineQubitMap::diagonal(c, c, 1.0);
        } else if constexpr (std::is_same_v<T, DampedCosine>) {
          double e = std::exp(-m.gamma * t);
          double c = e * std::cos(m.omega * t);
          return AffineQubitMap::diagonal(c, c, e);
        } else if constexpr (std::is_same_v<T, Transcendental>) {
          double e = std::exp(-m.gamma * t);
          double s = std::sin(m.omega * t);
          double fx = (2.0 + 4.0 * e - 3.0 * s * s) / 6.0;
          double fz = (4.0 * e - 1.0) / 3.0;
          return AffineQubitMap::diagonal(fx, fx, fz);
        } else if constexpr (std::is_same_v<T, ThreeChannel>) {
          auto decay = [t](double a) { return 1.0 - std::exp(-a * t); };
          double fx = 1.0 - 2.0 * (decay(m.a[0]) / m.n[0] +
                                   decay(m.a[1]) / m.n[1]);
          double fy = 1.0 - 2.0 * (decay(m.a[0]) / m.n[1] +
                                   decay(m.a[2]) / m.n[2]);
          double fz = 1.0 - 2.0 * (decay(m.a[1]) / m.n[1] +
                                   decay(m.a[2]) / m.n[2]);
          return AffineQubitMap::diagonal(fx, fy, fz);
        } else if constexpr (std::is_same_v<T, JaynesCummings>) {
          double f = std::cos(m.omega * t);
          return diagonal_with_drift(f, f, f * f,
                                     {0.0, 0.0, f * f - 1.0});
        } else {
          double c = 0.5 * (std::cos(t) + std::cos(kPi * t));
          return AffineQubitMap::diagonal(c, c, 1.0);
        }
      },
      model);
}

EptMapMatrix map_ept(const ModelSpec& model) {
  EptMapMatrix out;
  for (auto& row : out) {
    for (auto& e : row) e = EptFunction::zero();
  }
  out[0][0] = EptFunction::constant(1.0);
  auto diag = [&out](const EptFunction& fx, const EptFunction& fy,
                     const EptFunction& fz) {
    out[1][1] = fx;
    out[2][2] = fy;
    out[3][3] = fz;
  };
  const EptFunction one = EptFunction::constant(1.0);

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          diag(one, one, one);
        } else if constexpr (std::is_same_v<T, CentralSpin>) {
          EptFunction c = expand_cos_power(m.spins, m.omega());
          diag(c, c, one);
        } else if constexpr (std::is_same_v<T, TwoSpinUnequal>) {
          EptFunction c =
              EptFunction::cosine(m.omega1) * EptFunction::cosine(m.omega2);
          diag(c, c, one);
        } else if constexpr (std::is_same_v<T, DampedCosine>) {
          EptFunction e = EptFunction::exponential(1.0, -m.gamma);
          EptFunction c = e * EptFunction::cosine(m.omega);
          diag(c, c, e);
        } else if constexpr (std::is_same_v<T, Transcendental>) {
          // (2 + 4 e^{-gt} - 3 sin^2(wt))/6 with sin^2 = (1 - cos 2wt)/2.
          EptFunction fx = EptFunction::constant(1.0 / 12.0) +
                           EptFunction::exponential(2.0 / 3.0, -m.gamma) +
                           EptFunction::cosine(2.0 * m.omega, 0.25);
          EptFunction fz = EptFunction::constant(-1.0 / 3.0) +
                           EptFunction::exponential(4.0 / 3.0, -m.gamma);
          diag(fx, fx, fz);
        } else if constexpr (std::is_same_v<T, ThreeChannel>) {
          auto channel = [](double w1, double a1, double w2, double a2) {
            return EptFunction::constant(1.0 - 2.0 / w1 - 2.0 / w2) +
                   EptFunction::exponential(2.0 / w1, -a1) +
                   EptFunction::exponential(2.0 / w2, -a2);
          };
          diag(channel(m.n[0], m.a[0], m.n[1], m.a[1]),
               channel(m.n[1], m.a[0], m.n[2], m.a[2]),
               channel(m.n[1], m.a[1], m.n[2], m.a[2]));
        } else if constexpr (std::is_same_v<T, JaynesCummings>) {
          EptFunction f = EptFunction::cosine(m.omega);
          EptFunction f2 = f * f;
          diag(f, f, f2);
          out[3][0] = f2 - one;
        } else {
          EptFunction c =
              (EptFunction::cosine(1.0) + EptFunction::cosine(kPi)) * 0.5;
          diag(c, c, one);
        }
      },
      model);
  return out;
}

Eigen::Matrix4d ept_matrix_eval(const EptMapMatrix& m, double t) {
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out(i, j) = m[i][j].is_zero() ? 0.0 : m[i][j].eval(t);
    }
  }
  return out;
}

EptMapMatrix ept_matrix_derivative(const EptMapMatrix& m) {
  EptMapMatrix out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i][j] = m[i][j].derivative();
  }
  return out;
}

double characteristic_time(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, CentralSpin>) {
          return m.omega() > 0.0 ? 2.0 * kPi / m.omega() : 1.0;
        } else if constexpr (std::is_same_v<T, TwoSpinUnequal>) {
          double w = m.omega1 + m.omega2;
          return w > 0.0 ? 2.0 * kPi / w : 1.0;
        } else if constexpr (std::is_same_v<T, DampedCosine>) {
          double scale = std::max(m.omega / (2.0 * kPi), m.gamma);
          return scale > 0.0 ? 1.0 / scale : 1.0;
        } else if constexpr (std::is_same_v<T, Transcendental>) {
          double scale = std::max(m.omega / kPi, m.gamma);
          return scale > 0.0 ? 1.0 / scale : 1.0;
        } else if constexpr (std::is_same_v<T, ThreeChannel>) {
          double amax = std::max({m.a[0], m.a[1], m.a[2]});
          return amax > 0.0 ? 1.0 / amax : 1.0;
        } else if constexpr (std::is_same_v<T, JaynesCummings>) {
          return m.omega > 0.0 ? 2.0 * kPi / m.omega : 1.0;
        } else {
          return 2.0;
        }
      },
      model);
}

ClosedFormGenerator generator_closed_form(const ModelSpec& model, double t) {
  Eigen::Matrix4d l = std::visit(
      [t](const auto& m) -> Eigen::Matrix4d {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return Eigen::Matrix4d::Zero();
        } else if constexpr (std::is_same_v<T, CentralSpin>) {
          double a = m.coupling;
          double n = double(m.spins);
          double g = a * std::sqrt(n) * std::tan(m.omega() * t);
          return pauli_rate_generator(0.0, 0.0, g);
        } else if constexpr (std::is_same_v<T, DampedCosine>) {
          double gx = m.gamma / 4.0;
          double gz =
              (m.gamma + 2.0 * m.omega * std::tan(m.omega * t)) / 4.0;
          return pauli_rate_generator(gx, gx, gz);
        } else if constexpr (std::is_same_v<T, Transcendental>) {
          double eg = std::exp(m.gamma * t);
          double gxy = m.gamma / (4.0 - eg);
          double gz = m.gamma / (eg - 4.0) +
                      (4.0 * m.gamma +
                       3.0 * m.omega * eg * std::sin(2.0 * m.omega * t)) /
                          (8.0 + eg * (1.0 + 3.0 * std::cos(2.0 * m.omega * t)));
          return pauli_rate_generator(gxy, gxy, gz);
        } else if constexpr (std::is_same_v<T, ThreeChannel>) {
          auto logderiv = [&m, t](double w1, double a1, double w2, double a2) {
            double f = 1.0 - 2.0 * ((1.0 - std::exp(-a1 * t)) / w1 +
                                    (1.0 - std::exp(-a2 * t)) / w2);
            double fd = -2.0 * (a1 * std::exp(-a1 * t) / w1 +
                                a2 * std::exp(-a2 * t) / w2);
            return fd / f;
          };
          double lx = logderiv(m.n[0], m.a[0], m.n[1], m.a[1]);
          double ly = logderiv(m.n[1], m.a[0], m.n[2], m.a[2]);
          double lz = logderiv(m.n[1], m.a[1], m.n[2], m.a[2]);
          double gx = 0.25 * (lx - ly - lz);
          double gy = 0.25 * (ly - lz - lx);
          double gz = 0.25 * (lz - lx - ly);
          return pauli_rate_generator(gx, gy, gz);
        } else if constexpr (std::is_same_v<T, JaynesCummings>) {
          double ld = -m.omega * std::tan(m.omega * t);
          Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
          l(1, 1) = ld;
          l(2, 2) = ld;
          l(3, 0) = 2.0 * ld;
          l(3, 3) = 2.0 * ld;
          return l;
        } else {
          throw UnsupportedError("no printed closed-form generator for " +
                                 model_name(ModelSpec(m)));
        }
      },
      model);
  return {l, rate_blowup(l)};
}

JointState::JointState(int spins, std::vector<Eigen::Matrix2cd> blocks)
    : spins_(spins), blocks_(std::move(blocks)) {
  if (blocks_.size() != (size_t(1) << spins_)) {
    throw std::invalid_argument("JointState: expected 2^N blocks");
  }
}

Eigen::Matrix2cd JointState::reduced_system() const {
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  for (const auto& b : blocks_) sum += b;
  return sum;
}

Eigen::VectorXd JointState::bath_populations() const {
  Eigen::VectorXd p(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    p[Eigen::Index(b)] = blocks_[b].trace().real();
  }
  return p;
}

double JointState::system_entropy_bits() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(reduced_system());
  return shannon_entropy_bits(es.eigenvalues().cwiseMax(0.0));
}

double JointState::bath_entropy_bits() const {
  return shannon_entropy_bits(bath_populations().cwiseMax(0.0));
}

double JointState::joint_entropy_bits() const {
  Eigen::VectorXd lam(2 * blocks_.size());
  Eigen::Index k = 0;
  for (const auto& b : blocks_) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(b);
    lam[k++] = std::max(es.eigenvalues()[0], 0.0);
    lam[k++] = std::max(es.eigenvalues()[1], 0.0);
  }
  return shannon_entropy_bits(lam);
}

Eigen::MatrixXcd JointState::dense() const {
  if (spins_ > 10) throw ResourceError("JointState::dense: N <= 10");
  Eigen::Index dim = Eigen::Index(2) << spins_;
  Eigen::Index nb = Eigen::Index(1) << spins_;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < nb; ++b) {
    for (int s = 0; s < 2; ++s) {
      for (int sp = 0; sp < 2; ++sp) {
        out(s * nb + b, sp * nb + b) = blocks_[size_t(b)](s, sp);
      }
    }
  }
  return out;
}

JointState central_spin_joint_evolution(int spins, double coupling,
                                        const Eigen::Matrix2cd& rho0,
                                        double t) {
  if (spins > 12) {
    throw ResourceError("central_spin_joint_evolution: N <= 12");
  }
  if (spins < 1) throw std::invalid_argument("N >= 1 required");
  size_t nb = size_t(1) << spins;
  double ak = coupling / std::sqrt(double(spins));
  std::vector<Eigen::Matrix2cd> blocks(nb);
  double norm = 1.0 / double(nb);
  for (size_t b = 0; b < nb; ++b) {
    // Energy of |0, b>: sum_k A_k (-1)^{b_k}; |1, b> has the opposite sign.
    double e0 = ak * double(spins - 2 * std::popcount(b));
    std::complex<double> phase = std::exp(-2.0 * kI * e0 * t);
    Eigen::Matrix2cd blk;
    blk(0, 0) = rho0(0, 0);
    blk(1, 1) = rho0(1, 1);
    blk(0, 1) = rho0(0, 1) * phase;
    blk(1, 0) = rho0(1, 0) * std::conj(phase);
    blocks[b] = norm * blk;
  }
  return JointState(spins, std::move(blocks));
}

Eigen::Matrix2cd central_spin_dense_reduced(int spins, double coupling,
                                            const Eigen::Matrix2cd& rho0,
                                            double t) {
  if (spins > 6) throw ResourceError("central_spin_dense_reduced: N <= 6");
  Eigen::Index nb = Eigen::Index(1) << spins;
  Eigen::Index dim = 2 * nb;
  double ak = coupling / std::sqrt(double(spins));

  Eigen::Matrix2cd sz;
  sz << 1, 0, 0, -1;
  auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            a(i, j) * b;
      }
    }
    return out;
  };

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < spins; ++k) {
    Eigen::MatrixXcd term = sz;
    for (int q = 0; q < spins; ++q) {
      term = kron(term, q == k ? Eigen::MatrixXcd(sz)
                               : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
    }
    h += ak * term;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases =
      (-kI * t * es.eigenvalues().cast<std::complex<double>>().array())
          .exp();
  Eigen::MatrixXcd u =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  Eigen::MatrixXcd eta0 =
      kron(rho0, Eigen::MatrixXcd::Identity(nb, nb) / double(nb));
  Eigen::MatrixXcd eta = u * eta0 * u.adjoint();

  Eigen::Matrix2cd red = Eigen::Matrix2cd::Zero();
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      for (Eigen::Index b = 0; b < nb; ++b) {
        red(s, sp) += eta(s * nb + b, sp * nb + b);
      }
    }
  }
  return red;
}

} // namespace oqsd
