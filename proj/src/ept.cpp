#include "oqsd/ept.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oqsd {

namespace {

const std::complex<double> kI(0.0, 1.0);

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * double(n - k + i) / double(i);
  }
  return r;
}

bool rate_close(std::complex<double> a, std::complex<double> b, double reltol) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= reltol * scale;
}

// Multiply an ascending-coefficient real polynomial by another in place.
std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

} // namespace

EptFunction::EptFunction(std::vector<EptTerm> terms) : terms_(std::move(terms)) {
  canonicalize();
}

void EptFunction::canonicalize() {
  auto key_less = [](const EptTerm& a, const EptTerm& b) {
    if (a.rate.real() != b.rate.real()) return a.rate.real() < b.rate.real();
    if (a.rate.imag() != b.rate.imag()) return a.rate.imag() < b.rate.imag();
    return a.power < b.power;
  };
  std::sort(terms_.begin(), terms_.end(), key_less);

  std::vector<EptTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().power == t.power &&
        rate_close(merged.back().rate, t.rate, 1e-12)) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  double scale = 0.0;
  for (const auto& t : merged) scale = std::max(scale, std::abs(t.coeff));
  terms_.clear();
  for (const auto& t : merged) {
    if (std::abs(t.coeff) > 1e-14 * std::max(1.0, scale)) {
      terms_.push_back(t);
    }
  }
}

EptFunction EptFunction::constant(double c) {
  if (c == 0.0) return zero();
  return EptFunction({{std::complex<double>(c, 0.0), 0, {0.0, 0.0}}});
}

EptFunction EptFunction::term(std::complex<double> c, int power,
                              std::complex<double> rate) {
  if (power < 0) throw std::invalid_argument("EptFunction: negative power");
  return EptFunction({{c, power, rate}});
}

EptFunction EptFunction::exponential(double c, double rate) {
  return term({c, 0.0}, 0, {rate, 0.0});
}

EptFunction EptFunction::cosine(double omega, double amplitude) {
  return EptFunction({{{amplitude / 2.0, 0.0}, 0, kI * omega},
                      {{amplitude / 2.0, 0.0}, 0, -kI * omega}});
}

EptFunction EptFunction::sine(double omega, double amplitude) {
  // sin = (e^{iwt} - e^{-iwt}) / (2i)
  return EptFunction({{{0.0, -amplitude / 2.0}, 0, kI * omega},
                      {{0.0, amplitude / 2.0}, 0, -kI * omega}});
}

bool EptFunction::is_zero(double tol) const {
  for (const auto& t : terms_) {
    if (std::abs(t.coeff) > tol) return false;
  }
  return true;
}

bool EptFunction::is_real(double tol) const {
  for (const auto& t : terms_) {
    if (std::abs(t.rate.imag()) <= tol && std::abs(t.coeff.imag()) <= tol) {
      continue;
    }
    // Look for the conjugate partner.
    bool found = false;
    for (const auto& u : terms_) {
      if (u.power == t.power && rate_close(u.rate, std::conj(t.rate), tol) &&
          std::abs(u.coeff - std::conj(t.coeff)) <=
              tol * std::max(1.0, std::abs(t.coeff))) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::complex<double> EptFunction::eval_complex(double t) const {
  std::complex<double> s = 0.0;
  for (const auto& term : terms_) {
    s += term.coeff * std::pow(t, term.power) * std::exp(term.rate * t);
  }
  return s;
}

double EptFunction::eval(double t) const {
  std::complex<double> v = eval_complex(t);
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real()))) {
    throw std::domain_error("EptFunction::eval on a non-real function");
  }
  return v.real();
}

EptFunction EptFunction::derivative() const {
  std::vector<EptTerm> out;
  out.reserve(2 * terms_.size());
  for (const auto& t : terms_) {
    if (t.power > 0) {
      out.push_back({t.coeff * double(t.power), t.power - 1, t.rate});
    }
    if (t.rate != std::complex<double>(0.0, 0.0)) {
      out.push_back({t.coeff * t.rate, t.power, t.rate});
    }
  }
  return EptFunction(std::move(out));
}

EptFunction EptFunction::derivative(int n) const {
  EptFunction f = *this;
  for (int i = 0; i < n; ++i) f = f.derivative();
  return f;
}

EptFunction EptFunction::operator+(const EptFunction& o) const {
  std::vector<EptTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return EptFunction(std::move(out));
}

EptFunction EptFunction::operator-(const EptFunction& o) const {
  return *this + o * -1.0;
}

EptFunction EptFunction::operator*(const EptFunction& o) const {
  std::vector<EptTerm> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      out.push_back({a.coeff * b.coeff, a.power + b.power, a.rate + b.rate});
    }
  }
  return EptFunction(std::move(out));
}

EptFunction EptFunction::operator*(double s) const {
  std::vector<EptTerm> out = terms_;
  for (auto& t : out) t.coeff *= s;
  return EptFunction(std::move(out));
}

std::vector<std::pair<std::complex<double>, int>> EptFunction::spectrum(
    double reltol) const {
  std::vector<std::pair<std::complex<double>, int>> spec;
  for (const auto& t : terms_) {
    bool merged = false;
    for (auto& [rate, mult] : spec) {
      if (rate_close(rate, t.rate, reltol)) {
        mult = std::max(mult, t.power + 1);
        merged = true;
        break;
      }
    }
    if (!merged) spec.emplace_back(t.rate, t.power + 1);
  }
  return spec;
}

EptFunction expand_cos_power(int n, double omega) {
  if (n < 1) throw std::invalid_argument("expand_cos_power: N >= 1 required");
  std::vector<EptTerm> terms;
  double norm = std::pow(2.0, -n);
  for (int j = 0; j <= n; ++j) {
    terms.push_back({{norm * binomial(n, j), 0.0}, 0,
                     kI * (double(n - 2 * j) * omega)});
  }
  return EptFunction(std::move(terms));
}

std::vector<double> annihilator(std::span<const EptFunction> fs) {
  if (fs.empty()) throw std::invalid_argument("nothing to annihilate");

  // Least common multiple of the spectra: union with max multiplicity.
  std::vector<std::pair<std::complex<double>, int>> spec;
  for (const auto& f : fs) {
    if (f.is_zero()) continue;
    for (const auto& [rate, mult] : f.spectrum()) {
      bool merged = false;
      for (auto& [r, m] : spec) {
        if (rate_close(r, rate, 1e-10)) {
          m = std::max(m, mult);
          merged = true;
          break;
        }
      }
      if (!merged) spec.emplace_back(rate, mult);
    }
  }
  if (spec.empty()) throw std::invalid_argument("nothing to annihilate");

  std::vector<double> poly{1.0};
  double imag_tol = 0.0;
  for (const auto& [rate, mult] : spec) {
    imag_tol = std::max(imag_tol, 1e-10 * std::max(1.0, std::abs(rate)));
  }
  for (const auto& [rate, mult] : spec) {
    if (std::abs(rate.imag()) <= imag_tol) {
      // (D - Re lambda)^mult
      std::vector<double> lin{-rate.real(), 1.0};
      for (int k = 0; k < mult; ++k) poly = poly_mul(poly, lin);
    } else if (rate.imag() > 0.0) {
      // Pair with the conjugate: (D^2 - 2 Re(l) D + |l|^2)^mult.
      int pair_mult = mult;
      for (const auto& [r2, m2] : spec) {
        if (rate_close(r2, std::conj(rate), 1e-10)) {
          pair_mult = std::max(pair_mult, m2);
        }
      }
      std::vector<double> quad{std::norm(rate), -2.0 * rate.real(), 1.0};
      for (int k = 0; k < pair_mult; ++k) poly = poly_mul(poly, quad);
    }
  }
  return poly;
}

EptFunction apply_ode_operator(std::span<const double> p,
                               const EptFunction& f) {
  EptFunction out = EptFunction::zero();
  EptFunction d = f;
  for (size_t n = 0; n < p.size(); ++n) {
    if (p[n] != 0.0) out = out + d * p[n];
    d = d.derivative();
  }
  return out;
}

std::vector<std::vector<double>> spin_coefficient_matrix(int m, double omega,
                                                         CosParity parity) {
  if (m < 1) throw std::invalid_argument("spin_coefficient_matrix: m >= 1");
  if (omega <= 0.0) {
    throw std::invalid_argument("spin_coefficient_matrix: omega > 0");
  }
  int dim = (parity == CosParity::Even) ? m : m + 1;
  std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
  for (int i = 1; i <= dim; ++i) {
    for (int j = 1; j <= dim; ++j) {
      double sign = (i % 2 == 0) ? 1.0 : -1.0;
      if (parity == CosParity::Even) {
        a[i - 1][j - 1] = sign * std::pow(2.0, -(2 * m - 1)) *
                          binomial(2 * m, m + j) *
                          std::pow(2.0 * j * omega, 2 * i - 1);
      } else {
        a[i - 1][j - 1] = sign * std::pow(2.0, -2 * m) *
                          binomial(2 * m + 1, m + j) *
                          std::pow((2.0 * j - 1.0) * omega, 2 * i - 1);
      }
    }
  }
  return a;
}

} // namespace oqsd
