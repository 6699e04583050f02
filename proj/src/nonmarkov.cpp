#include "oqsd/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "oqsd/errors.hpp"

namespace oqsd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;

double pair_distance(const ModelSpec& model, const BlochState& a,
                     const BlochState& b, double t) {
  AffineQubitMap e = map_at(model, t);
  return trace_distance(apply_map(e, a), apply_map(e, b));
}

// Golden-section extremum refinement on [lo, hi]; maximize when sign = -1.
double golden_extremum(const std::function<double(double)>& f, double lo,
                       double hi, double sign, double tol) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = sign * f(x1), f2 = sign * f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = sign * f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = sign * f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Total positive variation of f over [0, tau]: the telescoping grid sum is
// exact on monotone runs, plus corrections from refining each interior
// extremum beyond the grid.  Plateaus (runs of equal values, e.g. a distance
// pinned at a small floor) are skipped when tracking the slope direction.
double total_rise(const std::function<double(double)>& f, double tau,
                  double dt) {
  int n = std::max(2, int(std::ceil(tau / dt)));
  std::vector<double> ts(size_t(n) + 1), vs(size_t(n) + 1);
  for (int i = 0; i <= n; ++i) {
    ts[size_t(i)] = tau * double(i) / double(n);
    vs[size_t(i)] = f(ts[size_t(i)]);
  }
  double rise = 0.0;
  for (int i = 1; i <= n; ++i) {
    rise += std::max(0.0, vs[size_t(i)] - vs[size_t(i) - 1]);
  }
  int last_dir = 0;
  int last_end = 0; // index where the previous nonzero-slope run ended
  double tol = 1e-12 * std::max(1.0, tau);
  for (int i = 1; i <= n; ++i) {
    double d = vs[size_t(i)] - vs[size_t(i) - 1];
    int dir = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (dir == 0) continue;
    if (last_dir != 0 && dir != last_dir) {
      // Extremum between the end of the previous run and ts[i]; the grid
      // value there is vs[last_end] (constant across any plateau).
      double sign = dir > 0 ? 1.0 : -1.0; // down->up = local minimum
      double tx = golden_extremum(f, ts[size_t(last_end) - 1], ts[size_t(i)],
                                  sign, tol);
      double fx = f(tx);
      if (dir > 0) {
        rise += std::max(0.0, vs[size_t(last_end)] - fx);
      } else {
        rise += std::max(0.0, fx - vs[size_t(last_end)]);
      }
    }
    last_dir = dir;
    last_end = i;
  }
  return rise;
}

BlochState sphere_point(double theta, double phi) {
  return BlochState(std::sin(theta) * std::cos(phi),
                    std::sin(theta) * std::sin(phi), std::cos(theta));
}

long long lcm_ll(long long a, long long b) {
  return a / std::gcd(a, b) * b;
}

// Best rational approximation p/q of x with |p/q - x| <= tol * x, by
// continued-fraction convergents.
std::pair<long long, long long> rational_approx(double x, double tol) {
  long long p0 = 1, q0 = 0, p1 = (long long)std::floor(x), q1 = 1;
  double frac = x - std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(double(p1) / double(q1) - x) <= tol * std::abs(x)) break;
    if (frac < 1e-15) break;
    double inv = 1.0 / frac;
    long long a = (long long)std::floor(inv);
    frac = inv - std::floor(inv);
    long long p2 = a * p1 + p0;
    long long q2 = a * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  long long g = std::gcd(std::abs(p1), q1);
  if (g > 1) {
    p1 /= g;
    q1 /= g;
  }
  return {p1, q1};
}

} // namespace

double sigma(const ModelSpec& model, const BlochState& a, const BlochState& b,
             double t, double h) {
  if (h < 1e-8 || h > 1e-3) {
    throw std::invalid_argument("sigma: h must lie in [1e-8, 1e-3]");
  }
  if (t < h) throw std::invalid_argument("sigma: t >= h required");
  return (pair_distance(model, a, b, t + h) -
          pair_distance(model, a, b, t - h)) /
         (2.0 * h);
}

double map_l1_distance(const ModelSpec& model, double t) {
  return (map_at(model, t).matrix() - Eigen::Matrix4d::Identity())
      .cwiseAbs()
      .sum();
}

double find_tau(const ModelSpec& model, double epsilon, double t_max,
                int recurrence_index) {
  if (epsilon <= 0.0) throw std::invalid_argument("find_tau: epsilon > 0");
  if (t_max <= 0.0) throw std::invalid_argument("find_tau: t_max > 0");
  if (recurrence_index < 1) {
    throw std::invalid_argument("find_tau: recurrence index >= 1");
  }
  auto g = [&model](double t) { return map_l1_distance(model, t); };
  double step = 1e-3 * characteristic_time(model);
  int hits = 0;
  double min_norm = std::numeric_limits<double>::infinity();
  double prev_t = step;
  double prev_g = g(prev_t);
  bool inside = false; // currently within a qualifying (<= eps, decreasing) dip
  for (double t = 2.0 * step; t <= t_max; t += step) {
    double cur = g(t);
    min_norm = std::min(min_norm, cur);
    bool qualifies = cur <= epsilon && cur < prev_g;
    if (qualifies && !inside) {
      ++hits;
      if (hits == recurrence_index) {
        if (prev_g > epsilon) {
          // Refine the downward crossing of the epsilon level.
          double lo = prev_t, hi = t;
          while (hi - lo > 1e-6) {
            double mid = 0.5 * (lo + hi);
            (g(mid) > epsilon ? lo : hi) = mid;
          }
          return 0.5 * (lo + hi);
        }
        return t;
      }
    }
    inside = qualifies;
    prev_t = t;
    prev_g = cur;
  }
  throw NotFoundError("find_tau: map never returns within tolerance",
                      min_norm);
}

double auto_epsilon(const ModelSpec& model, double t_max) {
  auto g = [&model](double t) { return map_l1_distance(model, t); };
  double step = 1e-3 * characteristic_time(model);
  double tm2 = g(step), tm1 = g(2.0 * step);
  for (double t = 3.0 * step; t <= t_max; t += step) {
    double cur = g(t);
    if (tm1 < tm2 && tm1 < cur) {
      double tx = golden_extremum(g, t - 3.0 * step, t, 1.0, 1e-10);
      return g(tx);
    }
    tm2 = tm1;
    tm1 = cur;
  }
  throw NotFoundError("auto_epsilon: no local minimum found", tm1);
}

double blp_windowed(const ModelSpec& model, const BlochState& a,
                    const BlochState& b, double tau, double dt) {
  if (tau <= 0.0) throw std::invalid_argument("blp_windowed: tau > 0");
  if (dt > tau / 500.0) {
    throw std::invalid_argument("blp_windowed: dt <= tau/500 required");
  }
  auto d = [&](double t) { return pair_distance(model, a, b, t); };
  return total_rise(d, tau, dt);
}

MeasureResult optimal_pair_search(const ModelSpec& model, double tau,
                                  int n_points, double dt) {
  if (n_points < 64) {
    throw std::invalid_argument("optimal_pair_search: n_points >= 64");
  }
  if (dt <= 0.0) dt = tau / 4000.0;
  int ngrid = std::max(500, int(std::ceil(tau / dt)));

  // Precompute the T blocks once; for an antipodal pure pair (r, -r) the
  // evolved trace distance is |T r| and the translation cancels.
  std::vector<Eigen::Matrix3d> ts(size_t(ngrid) + 1);
  for (int i = 0; i <= ngrid; ++i) {
    ts[size_t(i)] = map_at(model, tau * double(i) / double(ngrid)).T();
  }
  auto grid_rise = [&ts](const Eigen::Vector3d& r) {
    double rise = 0.0;
    double prev = (ts.front() * r).norm();
    for (size_t i = 1; i < ts.size(); ++i) {
      double cur = (ts[i] * r).norm();
      rise += std::max(0.0, cur - prev);
      prev = cur;
    }
    return rise;
  };
  auto angles_to_r = [](double theta, double phi) {
    return Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                           std::sin(theta) * std::sin(phi), std::cos(theta));
  };

  // Fibonacci spiral over the upper hemisphere: n_points antipodal pairs.
  double best = -1.0, best_theta = 0.0, best_phi = 0.0;
  for (int k = 0; k < n_points; ++k) {
    double z = (double(k) + 0.5) / double(n_points); // (0, 1]
    double theta = std::acos(z);
    double phi = std::fmod(double(k) * 2.0 * kPi * kGolden, 2.0 * kPi);
    double v = grid_rise(angles_to_r(theta, phi));
    if (v > best) {
      best = v;
      best_theta = theta;
      best_phi = phi;
    }
  }

  // Local shrink refinement around the best spiral point.
  double span = 2.0 / std::sqrt(double(n_points));
  for (int it = 0; it < 48; ++it) {
    bool improved = false;
    for (auto [dth, dph] : {std::pair{span, 0.0}, {-span, 0.0}, {0.0, span},
                            {0.0, -span}}) {
      double th = std::clamp(best_theta + dth, 0.0, kPi);
      double ph = best_phi + dph;
      double v = grid_rise(angles_to_r(th, ph));
      if (v > best) {
        best = v;
        best_theta = th;
        best_phi = ph;
        improved = true;
      }
    }
    if (!improved) span *= 0.6;
    if (span < 1e-8) break;
  }

  MeasureResult res;
  res.pair_a = sphere_point(best_theta, best_phi);
  res.pair_b = sphere_point(kPi - best_theta, best_phi + kPi);
  res.tau = tau;
  res.blp = blp_windowed(model, res.pair_a, res.pair_b, tau,
                         std::min(dt, tau / 500.0));
  res.rate = res.blp / tau;
  return res;
}

MeasureResult measure_rate_periodic(const ModelSpec& model) {
  double period = 0.0;
  if (const auto* cs = std::get_if<CentralSpin>(&model)) {
    if (cs->omega() <= 0.0) {
      throw UnsupportedError("measure_rate_periodic: zero coupling");
    }
    period = (cs->spins % 2 == 0 ? kPi : 2.0 * kPi) / cs->omega();
  } else if (const auto* two = std::get_if<TwoSpinUnequal>(&model)) {
    period = rationalize_period({two->omega1, two->omega2}, 1e-9);
  } else {
    throw UnsupportedError("measure_rate_periodic: model is not periodic");
  }
  MeasureResult res = optimal_pair_search(model, period);
  res.rule = TauRule::Periodic;
  res.epsilon = period;
  return res;
}

double rationalize_period(const std::vector<double>& frequencies, double tol) {
  if (frequencies.size() < 2) {
    throw std::invalid_argument("rationalize_period: >= 2 frequencies");
  }
  if (tol <= 0.0) throw std::invalid_argument("rationalize_period: tol > 0");
  for (double w : frequencies) {
    if (w <= 0.0) {
      throw std::invalid_argument("rationalize_period: frequencies > 0");
    }
  }
  long long denom_lcm = 1;
  for (size_t i = 1; i < frequencies.size(); ++i) {
    auto [p, q] = rational_approx(frequencies[i] / frequencies[0], tol);
    (void)p;
    denom_lcm = lcm_ll(denom_lcm, q);
  }
  return 2.0 * kPi * double(denom_lcm) / frequencies[0];
}

MutualInfoSample mutual_information(int spins, double coupling,
                                    const Eigen::Matrix2cd& rho0, double t,
                                    bool use_oracle) {
  MutualInfoSample out;
  out.t = t;
  if (use_oracle) {
    if (spins > 10) {
      throw ResourceError("mutual_information: oracle path needs N <= 10");
    }
    JointState joint = central_spin_joint_evolution(spins, coupling, rho0, t);
    out.value = joint.system_entropy_bits() + joint.bath_entropy_bits() -
                joint.joint_entropy_bits();
    if (std::abs(out.value) < 1e-12) out.value = 0.0; // entropy roundoff
    return out;
  }
  // Diagonal coupling with a maximally mixed bath: S_env = N bits and
  // S_joint = S(rho0) + N bits, so I(t) = S(rho_sys(t)) - S(rho0).
  BlochState r0 = bloch_from_density(rho0);
  BlochState rt = apply_map(map_at(CentralSpin{spins, coupling}, t), r0);
  out.value = von_neumann_entropy(rt) - von_neumann_entropy(r0);
  if (std::abs(out.value) < 1e-12) out.value = 0.0;
  return out;
}

} // namespace oqsd
