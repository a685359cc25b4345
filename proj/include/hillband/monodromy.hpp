#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hillband/ode.hpp"
#include "hillband/potential.hpp"

namespace hillband {

using cplx = std::complex<double>;

/// The operator y'' = -2 q(x) y' + (b(x) - E) y on one period. The Hill operator -y'' + p y = E y
/// is q = 0, b = p; the drift form arises from the Riccati transform of a distributional potential.
class PeriodOperator {
 public:
  static PeriodOperator hill(const PeriodicPotential& p);
  static PeriodOperator with_drift(const PeriodicPotential& q, const PeriodicPotential& b);

  const PeriodicPotential& b() const { return b_; }
  const std::optional<PeriodicPotential>& drift() const { return q_; }
  double b_bound() const { return b_.max_abs_bound(); }

 private:
  PeriodOperator(PeriodicPotential b, std::optional<PeriodicPotential> q) : b_(std::move(b)), q_(std::move(q)) {}
  PeriodicPotential b_;
  std::optional<PeriodicPotential> q_;
};

struct MonodromySolution {
  cplx z;
  std::vector<double> x_grid;
  std::vector<cplx> theta, theta_prime, phi, phi_prime;
  cplx delta;    // (phi'(1) + theta(1)) / 2
  cplx beta;     // (phi'(1) - theta(1)) / 2
  cplx delta_z;  // d delta / dz

  cplx theta1() const { return theta.back(); }
  cplx theta1_prime() const { return theta_prime.back(); }
  cplx phi1() const { return phi.back(); }
  cplx phi1_prime() const { return phi_prime.back(); }
};

/// Integration tolerances; the step is additionally capped by 0.5 / |z|.
ode::Options default_ode_options();

/// Fundamental system at momentum z on n_store uniform points of [0, 1], with the variational
/// system for d/dz carried alongside.
MonodromySolution integrate(const PeriodicPotential& p, cplx z, int n_store = 2,
                            const ode::Options& opt = default_ode_options());
MonodromySolution integrate(const PeriodOperator& op, cplx z, int n_store = 2,
                            const ode::Options& opt = default_ode_options());

struct EnergyDiscriminant {
  double delta;
  double delta_lambda;  // d delta / d lambda
};

/// Delta as a function of the real energy lambda (negative values allowed), real arithmetic.
EnergyDiscriminant discriminant_on_energy(const PeriodOperator& op, double lam,
                                          const ode::Options& opt = default_ode_options());
double lyapunov_on_energy(const PeriodicPotential& p, double lam);

/// Delta at a real momentum together with its z-derivative, real arithmetic.
struct MomentumDiscriminant {
  double delta;
  double delta_z;
};
MomentumDiscriminant discriminant_on_momentum(const PeriodOperator& op, double z,
                                              const ode::Options& opt = default_ode_options());

}  // namespace hillband
