#include "oqsd/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "oqsd/errors.hpp"

namespace oqsd {

namespace {

constexpr double kSingularRate = 1e12;
constexpr double kSingularRadius = 1e-9;

bool map_invertible_at(const EptMapMatrix& m, double t) {
  Eigen::Matrix4d e = ept_matrix_eval(m, t);
  return std::abs(e.bottomRightCorner<3, 3>().determinant()) > 1e-27;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Zeros of one scalar EPT entry in (0, t_max]: sign changes plus grazing
// zeros where the function touches zero at an extremum.
void append_zeros(const EptFunction& f, double t_max, double step,
                  std::vector<double>& out) {
  EptFunction fd = f.derivative();
  double prev_f = f.eval(0.0);
  double prev_fd = fd.eval(0.0);
  for (double t = step; t <= t_max + 0.5 * step; t += step) {
    double tc = std::min(t, t_max);
    double cur_f = f.eval(tc);
    double cur_fd = fd.eval(tc);
    if ((prev_f < 0.0) != (cur_f < 0.0)) {
      out.push_back(
          bisect([&f](double x) { return f.eval(x); }, tc - step, tc, 1e-10));
    } else if ((prev_fd < 0.0) != (cur_fd < 0.0)) {
      double ext = bisect([&fd](double x) { return fd.eval(x); }, tc - step,
                          tc, 1e-10);
      if (std::abs(f.eval(ext)) < 1e-8) out.push_back(ext);
    }
    prev_f = cur_f;
    prev_fd = cur_fd;
  }
}

} // namespace

GeneratorSample higher_generator(const ModelSpec& model, int n, double t) {
  if (n < 1) throw std::invalid_argument("higher_generator: n >= 1");
  EptMapMatrix m = map_ept(model);
  EptMapMatrix dn = m;
  for (int k = 0; k < n; ++k) dn = ept_matrix_derivative(dn);

  GeneratorSample sample;
  sample.t = t;
  sample.order = n;
  if (!map_invertible_at(m, t)) {
    sample.singular = true;
    return sample;
  }
  Eigen::Matrix4d e = ept_matrix_eval(m, t);
  sample.L = ept_matrix_eval(dn, t) * e.inverse();
  if (!sample.L.allFinite() ||
      sample.L.cwiseAbs().maxCoeff() > kSingularRate) {
    sample.singular = true;
  }
  return sample;
}

double verify_generator_recurrence(const ModelSpec& model, int n,
                                   const std::vector<double>& ts) {
  EptMapMatrix m = map_ept(model);
  for (int i = 1; i < 4; ++i) {
    if (!m[i][0].is_zero()) {
      throw UnsupportedError(
          "verify_generator_recurrence: unital diagonal maps only");
    }
    for (int j = 1; j < 4; ++j) {
      if (i != j && !m[i][j].is_zero()) {
        throw UnsupportedError(
            "verify_generator_recurrence: diagonal maps only");
      }
    }
  }
  double dev = 0.0;
  for (int i = 1; i < 4; ++i) {
    const EptFunction& f = m[i][i];
    EptFunction f1 = f.derivative();
    EptFunction fn = f.derivative(n);
    EptFunction fn1 = fn.derivative();
    auto ln_at = [&](double t) { return fn.eval(t) / f.eval(t); };
    for (double t : ts) {
      double v = f.eval(t);
      double ln1 = fn1.eval(t) / v;
      double l1 = f1.eval(t) / v;
      // Independent numerical derivative of L^(n) (5-point stencil).
      double h = 1e-4 * std::max(1.0, std::abs(t));
      double dlnd = (-ln_at(t + 2 * h) + 8.0 * ln_at(t + h) -
                     8.0 * ln_at(t - h) + ln_at(t - 2 * h)) /
                    (12.0 * h);
      dev = std::max(dev, std::abs(ln1 - (dlnd + ln_at(t) * l1)));
    }
  }
  return dev;
}

std::vector<double> find_singularities(const ModelSpec& model, double t_max) {
  if (t_max <= 0.0) throw std::invalid_argument("t_max > 0 required");
  EptMapMatrix m = map_ept(model);
  double step = 1e-3 * characteristic_time(model);
  std::vector<double> zeros;
  for (int i = 1; i < 4; ++i) {
    if (m[i][i].is_zero()) continue;
    append_zeros(m[i][i], t_max, step, zeros);
  }
  std::sort(zeros.begin(), zeros.end());
  std::vector<double> out;
  for (double z : zeros) {
    if (out.empty() || z - out.back() > 1e-9) out.push_back(z);
  }
  return out;
}

OdeSpec derive_ode(const ModelSpec& model) {
  EptMapMatrix m = map_ept(model);
  OdeSpec ode;
  for (int i = 0; i < 4; ++i) {
    std::vector<EptFunction> row;
    for (int j = 0; j < 4; ++j) {
      if (!m[i][j].is_zero()) row.push_back(m[i][j]);
    }
    ode.comps[i] = annihilator(row);
  }
  return ode;
}

std::vector<Eigen::Vector4d> initial_derivatives(const ModelSpec& model,
                                                 const BlochState& rho0,
                                                 int order) {
  if (order < 1) throw std::invalid_argument("order >= 1 required");
  std::vector<Eigen::Vector4d> out;
  out.reserve(order);
  EptMapMatrix d = map_ept(model);
  for (int k = 0; k < order; ++k) {
    out.push_back(ept_matrix_eval(d, 0.0) * rho0.vec());
    d = ept_matrix_derivative(d);
  }
  return out;
}

OdeSolution integrate_ode(const OdeSpec& ode,
                          const std::vector<Eigen::Vector4d>& init,
                          const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("grid too short");
  if (int(init.size()) < ode.max_order()) {
    throw std::invalid_argument("init length must equal the ODE order");
  }
  OdeSolution sol;
  sol.grid = grid;
  Eigen::Index npts = Eigen::Index(grid.size());

  for (int comp = 0; comp < 4; ++comp) {
    const std::vector<double>& p = ode.comps[comp];
    int order = int(p.size()) - 1;
    Eigen::MatrixXd& st = sol.states[comp];
    st.resize(order, npts);

    Eigen::VectorXd u(order);
    for (int k = 0; k < order; ++k) u[k] = init[size_t(k)][comp];
    st.col(0) = u;

    // Companion-system right-hand side; constant coefficients, no explicit
    // time dependence.
    auto rhs = [&p, order](const Eigen::VectorXd& v) {
      Eigen::VectorXd dv(order);
      for (int k = 0; k + 1 < order; ++k) dv[k] = v[k + 1];
      double top = 0.0;
      for (int n = 0; n < order; ++n) top -= p[size_t(n)] * v[n];
      dv[order - 1] = top; // p_M = 1 after normalization
      return dv;
    };

    for (Eigen::Index i = 0; i + 1 < npts; ++i) {
      double h = grid[size_t(i) + 1] - grid[size_t(i)];
      Eigen::VectorXd k1 = rhs(u);
      Eigen::VectorXd k2 = rhs(u + 0.5 * h * k1);
      Eigen::VectorXd k3 = rhs(u + 0.5 * h * k2);
      Eigen::VectorXd k4 = rhs(u + h * k3);
      u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!u.allFinite()) {
        throw NumericalError("integrate_ode: non-finite state");
      }
      st.col(i + 1) = u;
    }
  }
  return sol;
}

double verify_generator_identity(const ModelSpec& model, const OdeSpec& ode,
                                 const std::vector<double>& ts) {
  EptMapMatrix m = map_ept(model);
  int max_order = ode.max_order();
  std::vector<EptMapMatrix> derivs(size_t(max_order) + 1);
  derivs[0] = m;
  for (int n = 1; n <= max_order; ++n) {
    derivs[size_t(n)] = ept_matrix_derivative(derivs[size_t(n) - 1]);
  }

  double max_res = 0.0;
  for (double t : ts) {
    Eigen::Matrix4d einv = ept_matrix_eval(m, t).inverse();
    for (int comp = 0; comp < 4; ++comp) {
      const std::vector<double>& p = ode.comps[comp];
      Eigen::RowVector4d acc = Eigen::RowVector4d::Zero();
      for (size_t n = 0; n < p.size(); ++n) {
        if (p[n] == 0.0) continue;
        Eigen::Matrix4d ln =
            ept_matrix_eval(derivs[n], t) * einv; // L^(0) = identity
        acc += p[n] * ln.row(comp);
      }
      max_res = std::max(max_res, acc.cwiseAbs().maxCoeff());
    }
  }
  return max_res;
}

} // namespace oqsd
