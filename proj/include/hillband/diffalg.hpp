#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hillband/potential.hpp"

namespace hillband {

using Rational = boost::multiprecision::cpp_rational;
using cplx = std::complex<double>;

/// Exponent vector over the jet variables u_0 = p, u_1 = p', ..., trailing zeros trimmed.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);
  static Monomial variable(int jet, int power = 1);

  int degree() const;
  int highest_jet() const { return static_cast<int>(exp_.size()) - 1; }  // -1 for the constant monomial
  int exponent(int jet) const { return jet < static_cast<int>(exp_.size()) ? exp_[jet] : 0; }
  const std::vector<int>& exponents() const { return exp_; }

  Monomial operator*(const Monomial& other) const;
  bool operator==(const Monomial& other) const = default;

  /// "u0^2*u1"; "1" for the constant monomial.
  std::string to_string() const;

 private:
  std::vector<int> exp_;
};

/// Graded lexicographic order: lower total degree first, then larger exponent of u_0, u_1, ... first.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Polynomial in the jet variables with exact rational coefficients. Zero terms are never stored.
class DiffPolynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GradedLex>;

  DiffPolynomial() = default;
  static DiffPolynomial constant(const Rational& c);
  static DiffPolynomial variable(int jet);

  DiffPolynomial operator+(const DiffPolynomial& o) const;
  DiffPolynomial operator-(const DiffPolynomial& o) const;
  DiffPolynomial operator-() const;
  DiffPolynomial operator*(const DiffPolynomial& o) const;
  DiffPolynomial operator*(const Rational& c) const;
  bool operator==(const DiffPolynomial& o) const { return terms_ == o.terms_; }

  /// Total x-derivative: u_j -> u_{j+1} with the product rule.
  DiffPolynomial derivative() const;

  bool is_zero() const { return terms_.empty(); }
  int highest_jet() const;
  int degree() const;
  Rational coefficient(const Monomial& m) const;
  const TermMap& terms() const { return terms_; }

  /// Canonical text form: "+1*u2 -1*u0^2" (terms in graded-lex order).
  std::string to_string() const;

  /// Evaluates at one point given jet values u_0..u_J.
  double eval(const std::vector<double>& jet) const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  TermMap terms_;
};

/// kappa_1 = p, kappa_{j+1} = -kappa_j' - sum_{s=1}^{j-1} kappa_{j-s} kappa_s.
/// Throws CapabilityError when kappa_m would need a jet variable above jet_budget.
std::vector<DiffPolynomial> kappa_sequence(int m, int jet_budget = kDefaultMaxJet);

/// "k1 = +1*u0\nk2 = -1*u1\n..." for the dump-kappa subcommand.
std::string dump_kappa(int m, int jet_budget = kDefaultMaxJet);

/// Samples q on the uniform grid of n points (n = 0 picks an alias-free grid for q and p).
std::vector<double> eval_diffpoly(const DiffPolynomial& q, const PeriodicPotential& p, int n = 0);

/// The diff-polynomial as an exact trigonometric series in p's harmonics.
PeriodicPotential diffpoly_series(const DiffPolynomial& q, const PeriodicPotential& p);

/// Grid size on which eval_diffpoly followed by period_integral is exact for q(p).
int alias_free_grid(const DiffPolynomial& q, const PeriodicPotential& p);

/// P_{-1}, P_0, ..., P_{m-1} through P_{j-1} = (-1)^j 2^{-(2j+1)} int_0^1 kappa_{2j+1}.
std::vector<double> coefficients_P(const PeriodicPotential& p, int m);

struct FormulaCheck {
  int j;
  double via_F;       // (||p^(j)||^2 + int F_j) / 2^{3+2j}
  double via_kappa;   // coefficients_P route
  double rel_discrepancy;
};

struct FormulaReport {
  std::vector<FormulaCheck> checks;  // j = 1, 2, 3
  double F3_variant_112;          // P_3 with 112 p^5 in place of 14 p^5, for comparison
  double max_rel_discrepancy() const;
};

/// Cross-validates P_1..P_3 computed from the closed-form F_j densities against the kappa route.
/// F_1 = 2p^3, F_2 = 10pp'^2 + 5p^4, F_3 = 14pp''^2 + 70p^2p'^2 + 14p^5.
FormulaReport check_F_formulas(const PeriodicPotential& p);

/// High-energy model built from the kappa_j of one potential.
class AsymptoticModel {
 public:
  /// Builds kappa_1..kappa_max(m, 2m+1) and the trace coefficients P_{-1}..P_m.
  AsymptoticModel(const PeriodicPotential& p, int m);

  int m() const { return m_; }
  /// P_{j-1} for j = 0..m+1, i.e. P_{-1}..P_m.
  const std::vector<double>& P() const { return P_; }
  double P_at(int index) const { return P_.at(index + 1); }  // P_at(-1) == P_{-1}
  const std::vector<double>& kappa_int() const { return kappa_int_; }    // int_0^1 kappa_j, j = 1..
  const std::vector<double>& kappa_at_zero() const { return kappa0_; }  // kappa_j(0), j = 1..

  /// K_m(z) = P_{-1}/z + P_0/z^3 + ... + P_{m-1}/z^{2m+1}; order defaults to m.
  cplx K(cplx z) const { return K(z, m_); }
  cplx K(cplx z, int order) const;

  /// xi_m(x, z) = z x - i int_0^x sum_{j<=m} kappa_j(t) / (2iz)^j dt.
  cplx xi(double x, cplx z) const;
  /// d/dx xi_m at x = 0.
  cplx xi_prime_zero(cplx z) const;

  /// rho = iz + sum_{j<=m} kappa_j(0) / (2iz)^j, omega = (rho(z) - rho(-z))/2i, tau = (rho(z) + rho(-z))/2.
  cplx rho(cplx z) const;
  cplx omega(cplx z) const;
  cplx tau(cplx z) const;

 private:
  int m_;
  std::vector<double> P_;
  std::vector<double> kappa_int_;
  std::vector<double> kappa0_;
  std::vector<PeriodicPotential> kappa_primitive_;  // mean-zero primitive of kappa_j - mean
};

struct RhoOmegaTau {
  cplx rho, omega, tau;
};

/// Throws DomainError for z = 0.
cplx xi_model(const PeriodicPotential& p, int m, double x, cplx z);
RhoOmegaTau rho_omega_tau(const PeriodicPotential& p, int m, cplx z);

}  // namespace hillband
