#include "hillband/monodromy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hillband/errors.hpp"

namespace hillband {

namespace {

// State layout: theta, theta', phi, phi', then the same four differentiated in the parameter.
template <class T>
using State = std::array<T, 8>;

template <class T>
struct Kernel {
  const PeriodOperator& op;
  T energy;     // z^2 or lambda
  T d_energy;   // d energy / d parameter

  void operator()(double x, const State<T>& y, State<T>& dy) const {
    const double b = op.b().eval(x);
    const double q2 = op.drift() ? 2.0 * op.drift()->eval(x) : 0.0;
    const T c = b - energy;
    for (int s = 0; s < 2; ++s) {
      const int i = 2 * s;
      dy[i] = y[i + 1];
      dy[i + 1] = -q2 * y[i + 1] + c * y[i];
      dy[i + 4] = y[i + 5];
      dy[i + 5] = -q2 * y[i + 5] + c * y[i + 4] - d_energy * y[i];
    }
  }
};

double step_cap(double scale, const ode::Options& opt) {
  return std::min(opt.h_max, 0.5 / std::max(scale, 1.0));
}

template <class T, class Observer>
State<T> run(const PeriodOperator& op, T energy, T d_energy, double scale, std::span<const double> stops,
             const ode::Options& opt, Observer&& observe) {
  State<T> y{};
  y[0] = T(1.0);
  y[3] = T(1.0);
  ode::Options o = opt;
  o.h_max = step_cap(scale, opt);
  ode::integrate(Kernel<T>{op, energy, d_energy}, y, stops, o, std::forward<Observer>(observe));
  return y;
}

}  // namespace

PeriodOperator PeriodOperator::hill(const PeriodicPotential& p) { return PeriodOperator(p, std::nullopt); }

PeriodOperator PeriodOperator::with_drift(const PeriodicPotential& q, const PeriodicPotential& b) {
  if (q.is_zero()) return PeriodOperator(b, std::nullopt);
  return PeriodOperator(b, q);
}

ode::Options default_ode_options() {
  ode::Options o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  o.h_max = 0.1;
  return o;
}

MonodromySolution integrate(const PeriodicPotential& p, cplx z, int n_store, const ode::Options& opt) {
  return integrate(PeriodOperator::hill(p), z, n_store, opt);
}

MonodromySolution integrate(const PeriodOperator& op, cplx z, int n_store, const ode::Options& opt) {
  if (n_store < 2) throw DomainError("n_store must be at least 2");
  MonodromySolution sol;
  sol.z = z;
  sol.x_grid.resize(n_store);
  for (int i = 0; i < n_store; ++i) sol.x_grid[i] = static_cast<double>(i) / (n_store - 1);
  sol.x_grid.back() = 1.0;
  for (auto* v : {&sol.theta, &sol.theta_prime, &sol.phi, &sol.phi_prime}) v->reserve(n_store);

  // the scale for the step cap must see the local wavenumber sqrt|z^2 - b|
  const double scale = std::sqrt(std::abs(z * z) + op.b_bound());
  const State<cplx> y = run<cplx>(op, z * z, 2.0 * z, scale, sol.x_grid, opt,
                                  [&](double, const State<cplx>& s) {
                                    sol.theta.push_back(s[0]);
                                    sol.theta_prime.push_back(s[1]);
                                    sol.phi.push_back(s[2]);
                                    sol.phi_prime.push_back(s[3]);
                                  });
  sol.delta = 0.5 * (y[3] + y[0]);
  sol.beta = 0.5 * (y[3] - y[0]);
  sol.delta_z = 0.5 * (y[7] + y[4]);
  return sol;
}

EnergyDiscriminant discriminant_on_energy(const PeriodOperator& op, double lam, const ode::Options& opt) {
  const std::array<double, 2> stops{0.0, 1.0};
  const double scale = std::sqrt(std::abs(lam) + op.b_bound());
  const State<double> y = run<double>(op, lam, 1.0, scale, stops, opt, [](double, const State<double>&) {});
  return {0.5 * (y[3] + y[0]), 0.5 * (y[7] + y[4])};
}

double lyapunov_on_energy(const PeriodicPotential& p, double lam) {
  if (lam >= 0.0) return integrate(p, cplx(std::sqrt(lam), 0.0)).delta.real();
  return discriminant_on_energy(PeriodOperator::hill(p), lam).delta;
}

MomentumDiscriminant discriminant_on_momentum(const PeriodOperator& op, double z, const ode::Options& opt) {
  const std::array<double, 2> stops{0.0, 1.0};
  const double scale = std::sqrt(z * z + op.b_bound());
  const State<double> y = run<double>(op, z * z, 2.0 * z, scale, stops, opt, [](double, const State<double>&) {});
  return {0.5 * (y[3] + y[0]), 0.5 * (y[7] + y[4])};
}

}  // namespace hillband
