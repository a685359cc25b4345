#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hillband/monodromy.hpp"

using namespace hillband;
using std::numbers::pi;

TEST_CASE("free equation") {
  const auto s = integrate(PeriodicPotential(), cplx(pi), 5);
  CHECK(std::abs(s.delta + 1.0) < 1e-11);
  CHECK(std::abs(s.phi1()) < 1e-11);
  CHECK(s.theta.front() == cplx(1.0));
  CHECK(s.phi_prime.front() == cplx(1.0));
  for (double zr : {0.5, 7.0, 31.0, 49.5}) {
    const cplx z(zr, 0.3);
    CHECK(std::abs(integrate(PeriodicPotential(), z).delta - std::cos(z)) < 1e-10 * std::max(1.0, std::abs(std::cos(z))));
  }
}

TEST_CASE("constant potential closed form") {
  const auto s = integrate(PeriodicPotential::constant(4.0), cplx(std::sqrt(4.0 + pi * pi)));
  CHECK(std::abs(s.delta + 1.0) < 1e-10);
  CHECK(lyapunov_on_energy(PeriodicPotential::constant(4.0), 4.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lyapunov_on_energy(PeriodicPotential(), -1.0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
}

TEST_CASE("Mathieu discriminant against a tighter self-reference") {
  PeriodicPotential p({0.0, 2.0}, {});
  auto tight = default_ode_options();
  tight.rtol = 1e-14;
  tight.atol = 1e-16;
  const auto a = integrate(p, cplx(0.0)), b = integrate(p, cplx(0.0), 2, tight);
  CHECK(std::abs(a.delta - b.delta) < 1e-10);
  CHECK(lyapunov_on_energy(p, -10.0) > 1.0);
}

TEST_CASE("Wronskian, evenness and z-derivative") {
  PeriodicPotential p({0.3, 2.0, -0.5}, {0.0, 0.7});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 100; ++i) {
    cplx z(u(rng), u(rng));
    if (std::abs(z) > 30.0) z *= 30.0 / std::abs(z);
    const auto s = integrate(p, z, i % 10 == 0 ? 9 : 2);
    for (std::size_t k = 0; k < s.x_grid.size(); ++k) {
      const cplx w = s.theta[k] * s.phi_prime[k] - s.theta_prime[k] * s.phi[k];
      // exponential growth in Im z makes the determinant a cancellation of large products
      const double scale = std::abs(s.theta[k] * s.phi_prime[k]) + std::abs(s.theta_prime[k] * s.phi[k]);
      CHECK(std::abs(w - 1.0) < 1e-10 * std::max(1.0, scale));
    }
    const auto m = integrate(p, -z);
    CHECK(std::abs(s.delta - m.delta) < 1e-10 * std::max(1.0, std::abs(s.delta)));
  }
  std::uniform_real_distribution<double> ur(0.5, 20.0);
  for (int i = 0; i < 10; ++i) {
    const double z = ur(rng), h = 1e-4;
    const auto s = integrate(p, cplx(z));
    const cplx fd = (integrate(p, cplx(z + h)).delta - integrate(p, cplx(z - h)).delta) / (2 * h);
    CHECK(std::abs(s.delta_z - fd) < 1e-6 * std::max(1.0, std::abs(s.delta_z)));
    const auto r = discriminant_on_momentum(PeriodOperator::hill(p), z);
    CHECK(r.delta_z == doctest::Approx(s.delta_z.real()).epsilon(1e-9));
  }
}
