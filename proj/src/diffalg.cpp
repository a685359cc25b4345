#include "hillband/diffalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hillband/errors.hpp"

namespace hillband {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<int> exponents) : exp_(std::move(exponents)) {
  while (!exp_.empty() && exp_.back() == 0) exp_.pop_back();
}

Monomial Monomial::variable(int jet, int power) {
  std::vector<int> e(jet + 1, 0);
  e[jet] = power;
  return Monomial(std::move(e));
}

int Monomial::degree() const {
  int d = 0;
  for (int e : exp_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  std::vector<int> e(std::max(exp_.size(), o.exp_.size()), 0);
  for (std::size_t i = 0; i < exp_.size(); ++i) e[i] += exp_[i];
  for (std::size_t i = 0; i < o.exp_.size(); ++i) e[i] += o.exp_[i];
  return Monomial(std::move(e));
}

std::string Monomial::to_string() const {
  if (exp_.empty()) return "1";
  std::string out;
  for (std::size_t j = 0; j < exp_.size(); ++j) {
    if (exp_[j] == 0) continue;
    if (!out.empty()) out += '*';
    out += 'u' + std::to_string(j);
    if (exp_[j] > 1) out += '^' + std::to_string(exp_[j]);
  }
  return out;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  const int n = std::max(a.highest_jet(), b.highest_jet()) + 1;
  for (int j = 0; j < n; ++j) {
    const int ea = a.exponent(j), eb = b.exponent(j);
    if (ea != eb) return ea > eb;
  }
  return false;
}

// ---------------------------------------------------------- DiffPolynomial

DiffPolynomial DiffPolynomial::constant(const Rational& c) {
  DiffPolynomial out;
  out.add_term(Monomial(), c);
  return out;
}

DiffPolynomial DiffPolynomial::variable(int jet) {
  DiffPolynomial out;
  out.add_term(Monomial::variable(jet), Rational(1));
  return out;
}

void DiffPolynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

DiffPolynomial DiffPolynomial::operator+(const DiffPolynomial& o) const {
  DiffPolynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

DiffPolynomial DiffPolynomial::operator-() const {
  DiffPolynomial out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

DiffPolynomial DiffPolynomial::operator-(const DiffPolynomial& o) const { return *this + (-o); }

DiffPolynomial DiffPolynomial::operator*(const DiffPolynomial& o) const {
  DiffPolynomial out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

DiffPolynomial DiffPolynomial::operator*(const Rational& c) const {
  DiffPolynomial out;
  if (c == 0) return out;
  for (const auto& [m, v] : terms_) out.terms_.emplace(m, v * c);
  return out;
}

DiffPolynomial DiffPolynomial::derivative() const {
  DiffPolynomial out;
  for (const auto& [m, c] : terms_) {
    const auto& e = m.exponents();
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      // d/dx u_j^e = e u_j^{e-1} u_{j+1}
      std::vector<int> ne(e.size() + 1, 0);
      std::copy(e.begin(), e.end(), ne.begin());
      ne[j] -= 1;
      ne[j + 1] += 1;
      out.add_term(Monomial(std::move(ne)), c * e[j]);
    }
  }
  return out;
}

int DiffPolynomial::highest_jet() const {
  int h = -1;
  for (const auto& [m, c] : terms_) h = std::max(h, m.highest_jet());
  return h;
}

int DiffPolynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

Rational DiffPolynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::string DiffPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << ' ';
    first = false;
    os << (c < 0 ? '-' : '+') << boost::multiprecision::abs(c);
    if (m.degree() > 0) os << '*' << m.to_string();
  }
  return os.str();
}

double DiffPolynomial::eval(const std::vector<double>& jet) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = static_cast<double>(c);
    const auto& e = m.exponents();
    for (std::size_t j = 0; j < e.size(); ++j)
      if (e[j] != 0) term *= std::pow(jet.at(j), e[j]);
    acc += term;
  }
  return acc;
}

// ------------------------------------------------------------------- kappa

std::vector<DiffPolynomial> kappa_sequence(int m, int jet_budget) {
  if (m < 1) throw DomainError("kappa_sequence needs m >= 1");
  // kappa_j carries u_{j-1} in its leading term
  if (m - 1 > jet_budget)
    throw CapabilityError("kappa_" + std::to_string(m) + " needs jet order " + std::to_string(m - 1) +
                          " beyond budget " + std::to_string(jet_budget));
  std::vector<DiffPolynomial> k;
  k.reserve(m);
  k.push_back(DiffPolynomial::variable(0));
  for (int j = 1; j < m; ++j) {
    // k[j] holds kappa_{j+1}; kappa_i lives at index i-1
    DiffPolynomial next = -k[j - 1].derivative();
    for (int s = 1; s <= j - 1; ++s) next = next - k[j - s - 1] * k[s - 1];
    k.push_back(std::move(next));
  }
  return k;
}

std::string dump_kappa(int m, int jet_budget) {
  const auto k = kappa_sequence(m, jet_budget);
  std::string out;
  for (int j = 0; j < m; ++j) out += "k" + std::to_string(j + 1) + " = " + k[j].to_string() + "\n";
  return out;
}

int alias_free_grid(const DiffPolynomial& q, const PeriodicPotential& p) {
  const int need = 2 * std::max(q.degree(), 1) * p.harmonics() + 2;
  int g = p.grid_size();
  while (g <= need) g <<= 1;
  return g;
}

std::vector<double> eval_diffpoly(const DiffPolynomial& q, const PeriodicPotential& p, int n) {
  if (n <= 0) n = alias_free_grid(q, p);
  const int jets = std::max(q.highest_jet(), 0);
  if (jets > p.max_jet())
    throw CapabilityError("differential polynomial needs jet order " + std::to_string(jets) +
                          " beyond the potential's budget " + std::to_string(p.max_jet()));
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = q.eval(p.jet(static_cast<double>(i) / n, jets));
  return out;
}

PeriodicPotential diffpoly_series(const DiffPolynomial& q, const PeriodicPotential& p) {
  const int jets = std::max(q.highest_jet(), 0);
  std::vector<PeriodicPotential> d;
  d.reserve(jets + 1);
  for (int j = 0; j <= jets; ++j) d.push_back(p.derivative(j));
  PeriodicPotential acc = PeriodicPotential::constant(0.0);
  for (const auto& [m, c] : q.terms()) {
    PeriodicPotential term = PeriodicPotential::constant(static_cast<double>(c));
    const auto& e = m.exponents();
    for (std::size_t j = 0; j < e.size(); ++j)
      for (int r = 0; r < e[j]; ++r) term = term * d[j];
    acc = acc + term;
  }
  return acc;
}

std::vector<double> coefficients_P(const PeriodicPotential& p, int m) {
  if (m < 0) throw DomainError("coefficients_P needs m >= 0");
  const auto k = kappa_sequence(2 * m + 1, p.max_jet());
  std::vector<double> P(m + 1);
  for (int j = 0; j <= m; ++j) {
    const auto& kj = k[2 * j];  // kappa_{2j+1}
    const double integral = period_integral(eval_diffpoly(kj, p));
    P[j] = ((j % 2 == 0) ? 1.0 : -1.0) * std::ldexp(integral, -(2 * j + 1));
  }
  return P;
}

// --------------------------------------------------------- F-formula check

double FormulaReport::max_rel_discrepancy() const {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.rel_discrepancy);
  return worst;
}

FormulaReport check_F_formulas(const PeriodicPotential& p) {
  if (p.max_jet() < 8) throw CapabilityError("check_F_formulas needs a jet budget of 8 (kappa_9)");
  const int n = std::max(p.grid_size(), 1 << 4);
  int g = n;
  while (g <= 10 * p.harmonics() + 2) g <<= 1;

  std::vector<double> f1(g), f2(g), f3(g), f3_variant(g), d1(g), d2(g), d3(g);
  for (int i = 0; i < g; ++i) {
    const auto u = p.jet(static_cast<double>(i) / g, 3);
    const double u0 = u[0], u1 = u[1], u2 = u[2], u3 = u[3];
    f1[i] = 2.0 * u0 * u0 * u0;
    f2[i] = 10.0 * u0 * u1 * u1 + 5.0 * std::pow(u0, 4);
    f3[i] = 14.0 * u0 * u2 * u2 + 70.0 * u0 * u0 * u1 * u1 + 14.0 * std::pow(u0, 5);
    f3_variant[i] = 14.0 * u0 * u2 * u2 + 70.0 * u0 * u0 * u1 * u1 + 112.0 * std::pow(u0, 5);
    d1[i] = u1 * u1;
    d2[i] = u2 * u2;
    d3[i] = u3 * u3;
  }
  const std::vector<double> norms = {period_integral(d1), period_integral(d2), period_integral(d3)};
  const std::vector<double> Fint = {period_integral(f1), period_integral(f2), period_integral(f3)};
  const auto P = coefficients_P(p, 4);  // P_{-1}..P_3

  FormulaReport report;
  for (int j = 1; j <= 3; ++j) {
    FormulaCheck c;
    c.j = j;
    c.via_F = std::ldexp(norms[j - 1] + Fint[j - 1], -(3 + 2 * j));
    c.via_kappa = P[j + 1];
    const double scale = std::max({std::abs(c.via_F), std::abs(c.via_kappa), 1e-300});
    c.rel_discrepancy = (c.via_F == c.via_kappa) ? 0.0 : std::abs(c.via_F - c.via_kappa) / scale;
    report.checks.push_back(c);
  }
  report.F3_variant_112 = std::ldexp(norms[2] + period_integral(f3_variant), -9);
  return report;
}

// -------------------------------------------------------- AsymptoticModel

AsymptoticModel::AsymptoticModel(const PeriodicPotential& p, int m) : m_(m) {
  if (m < 0) throw DomainError("expansion order m must be non-negative");
  const int order = std::max(m, 2 * m + 1);
  const auto k = kappa_sequence(order, p.max_jet());
  P_ = coefficients_P(p, m + 1);
  kappa_int_.resize(order);
  kappa0_.resize(order);
  kappa_primitive_.reserve(order);
  for (int j = 0; j < order; ++j) {
    const PeriodicPotential series = diffpoly_series(k[j], p);
    kappa_int_[j] = series.mean();
    kappa0_[j] = series.eval(0.0);
    kappa_primitive_.push_back(series.antiderivative());
  }
}

cplx AsymptoticModel::K(cplx z, int order) const {
  if (z == cplx(0.0)) throw DomainError("K_m is singular at z = 0");
  if (order < 0) return 0.0;
  if (order + 1 > static_cast<int>(P_.size())) throw CapabilityError("K order exceeds the model's P table");
  const cplx inv = 1.0 / z, inv2 = inv * inv;
  cplx acc = 0.0, pw = inv;
  for (int j = 0; j <= order; ++j) {
    acc += P_[j] * pw;  // P_{j-1} / z^{2j+1}
    pw *= inv2;
  }
  return acc;
}

cplx AsymptoticModel::xi(double x, cplx z) const {
  if (z == cplx(0.0)) throw DomainError("xi_m is singular at z = 0");
  const cplx two_iz = 2.0 * cplx(0.0, 1.0) * z;
  cplx acc = 0.0, pw = 1.0;
  for (int j = 0; j < m_; ++j) {
    pw /= two_iz;
    const double cumulative =
        kappa_int_[j] * x + kappa_primitive_[j].eval(x) - kappa_primitive_[j].eval(0.0);
    acc += cumulative * pw;
  }
  return z * x - cplx(0.0, 1.0) * acc;
}

cplx AsymptoticModel::xi_prime_zero(cplx z) const {
  if (z == cplx(0.0)) throw DomainError("xi_m is singular at z = 0");
  const cplx two_iz = 2.0 * cplx(0.0, 1.0) * z;
  cplx acc = 0.0, pw = 1.0;
  for (int j = 0; j < m_; ++j) {
    pw /= two_iz;
    acc += kappa0_[j] * pw;
  }
  return z - cplx(0.0, 1.0) * acc;
}

cplx AsymptoticModel::rho(cplx z) const {
  if (z == cplx(0.0)) throw DomainError("rho is singular at z = 0");
  const cplx two_iz = 2.0 * cplx(0.0, 1.0) * z;
  cplx acc = cplx(0.0, 1.0) * z, pw = 1.0;
  for (int j = 0; j < m_; ++j) {
    pw /= two_iz;
    acc += kappa0_[j] * pw;
  }
  return acc;
}

cplx AsymptoticModel::omega(cplx z) const { return (rho(z) - rho(-z)) / cplx(0.0, 2.0); }
cplx AsymptoticModel::tau(cplx z) const { return 0.5 * (rho(z) + rho(-z)); }

cplx xi_model(const PeriodicPotential& p, int m, double x, cplx z) {
  if (z == cplx(0.0)) throw DomainError("xi_m is singular at z = 0");
  return AsymptoticModel(p, m).xi(x, z);
}

RhoOmegaTau rho_omega_tau(const PeriodicPotential& p, int m, cplx z) {
  if (z == cplx(0.0)) throw DomainError("rho is singular at z = 0");
  const AsymptoticModel model(p, m);
  return {model.rho(z), model.omega(z), model.tau(z)};
}

}  // namespace hillband
