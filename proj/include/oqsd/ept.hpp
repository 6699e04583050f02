#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace oqsd {

// Exact algebra for exponential-polynomial-trigonometric functions,
//   f(t) = sum_k c_k t^{p_k} e^{lambda_k t},   c_k, lambda_k complex,
// which is closed under differentiation, addition and multiplication.  Every
// closed-form map entry in the model catalog lives in this class, so map
// derivatives of any order and the annihilating differential operators can be
// computed without numerical differentiation.

struct EptTerm {
  std::complex<double> coeff;
  int power = 0; // exponent of t, >= 0
  std::complex<double> rate; // lambda in e^{lambda t}
};

class EptFunction {
public:
  EptFunction() = default;
  explicit EptFunction(std::vector<EptTerm> terms);

  static EptFunction zero() { return EptFunction(); }
  static EptFunction constant(double c);
  /// c * t^power * e^{rate t}
  static EptFunction term(std::complex<double> c, int power,
                          std::complex<double> rate);
  /// c * e^{rate t} with real rate.
  static EptFunction exponential(double c, double rate);
  static EptFunction cosine(double omega, double amplitude = 1.0);
  static EptFunction sine(double omega, double amplitude = 1.0);

  const std::vector<EptTerm>& terms() const { return terms_; }
  bool is_zero(double tol = 0.0) const;
  /// True when terms pair up into complex conjugates (real on the real line).
  bool is_real(double tol = 1e-12) const;

  std::complex<double> eval_complex(double t) const;
  /// Real evaluation; throws if the imaginary part exceeds 1e-9 relative.
  double eval(double t) const;

  EptFunction derivative() const;
  EptFunction derivative(int n) const;

  EptFunction operator+(const EptFunction& o) const;
  EptFunction operator-(const EptFunction& o) const;
  EptFunction operator*(const EptFunction& o) const;
  EptFunction operator*(double s) const;

  /// Distinct rates with multiplicity (max power + 1), the spectral points of
  /// the minimal annihilator.  Rates closer than reltol are merged.
  std::vector<std::pair<std::complex<double>, int>> spectrum(
      double reltol = 1e-10) const;

private:
  void canonicalize();
  std::vector<EptTerm> terms_;
};

/// cos^N(omega t) expanded into complex exponentials via the binomial sum.
EptFunction expand_cos_power(int n, double omega);

/// Real coefficients (p_0, ..., p_M), p_M = 1, of the minimal-degree monic
/// polynomial in D = d/dt annihilating every input function.  Conjugate rate
/// pairs are merged into real quadratic factors.  Throws on an empty list.
std::vector<double> annihilator(std::span<const EptFunction> fs);

/// sum_n p_n f^(n), evaluated exactly in the EPT algebra.
EptFunction apply_ode_operator(std::span<const double> p, const EptFunction& f);

/// Coefficient matrix of the odd-derivative linear system for cos^N with
/// N = 2m (parity even, m x m) or N = 2m+1 (parity odd, (m+1) x (m+1)).
enum class CosParity { Even, Odd };
std::vector<std::vector<double>> spin_coefficient_matrix(int m, double omega,
                                                         CosParity parity);

// Per-component coefficient vectors p = (p_0, ..., p_M) of the higher-order
// master equation sum_n p_n rho^(n) = 0, one vector per affine component.
struct OdeSpec {
  std::array<std::vector<double>, 4> comps;

  int order(int comp) const {
    return static_cast<int>(comps[comp].size()) - 1;
  }
  int max_order() const {
    int m = 0;
    for (const auto& p : comps) m = std::max<int>(m, (int)p.size() - 1);
    return m;
  }
};

} // namespace oqsd
