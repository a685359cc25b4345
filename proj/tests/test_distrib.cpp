#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hillband/distrib.hpp"
#include "hillband/errors.hpp"

using namespace hillband;
using std::numbers::pi;

namespace {

double sup_diff(const PeriodicPotential& a, const PeriodicPotential& b) {
  double e = 0.0;
  for (int i = 0; i < 400; ++i) e = std::max(e, std::abs(a(i / 400.0) - b(i / 400.0)));
  return e;
}

}  // namespace

TEST_CASE("zero primitive gives the free equation") {
  auto sol = riccati_solve(PeriodicPotential());
  CHECK(sol.q.is_zero());
  CHECK(sol.norm_q_sq == 0.0);
  calibrate_c(sol);
  CHECK(std::abs(sol.c) < 1e-10);
  for (double z : {0.7, 2.0, 5.5}) {
    const auto m = monodromy_transformed(sol, cplx(z));
    CHECK(std::abs(m.delta - std::cos(z)) < 1e-10);
  }
}

TEST_CASE("Riccati round trip for a single cosine") {
  const PeriodicPotential qt({0.0, 0.5}, {});
  const auto p = riccati_forward(qt);
  const auto sol = riccati_solve(p);
  CHECK(sup_diff(sol.q, qt) < 1e-8);
  CHECK(sol.residual < 1e-9);
  CHECK(std::abs(sol.norm_q_sq - 0.125) < 1e-12);
  CHECK(std::abs(sol.q.mean()) < 1e-15);
}

TEST_CASE("Riccati round trip for random trigonometric q") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> c(5, 0.0), s(4);
    for (int k = 1; k <= 4; ++k) c[k] = u(rng);
    for (auto& v : s) v = u(rng);
    PeriodicPotential q(c, s);
    double sup = 0.0;
    for (int i = 0; i < 400; ++i) sup = std::max(sup, std::abs(q(i / 400.0)));
    q = q.scaled(1.0 / sup);
    const auto sol = riccati_solve(riccati_forward(q));
    CHECK(sup_diff(sol.q, q) < 1e-8);
    CHECK(sol.residual < 1e-9);
  }
}

TEST_CASE("Newton gives up with the last residual") {
  RiccatiOptions opt;
  opt.max_iter = 0;
  try {
    riccati_solve(PeriodicPotential({0.0, 3.0}, {1.0}), opt);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("calibrated transform: bottom of the spectrum, evenness, smooth consistency") {
  auto sol = riccati_solve(riccati_forward(PeriodicPotential({0.0, 0.5}, {0.2})));
  calibrate_c(sol);
  CHECK(std::abs(sol.c - sol.norm_q_sq) < 1e-9);
  const auto op = sol.transformed_operator();
  CHECK(std::abs(discriminant_on_energy(op, 0.0).delta - 1.0) < 1e-10);
  for (cplx z : {cplx(1.3, 0.2), cplx(6.1, -0.7), cplx(11.0, 1.5)}) {
    const auto a = monodromy_transformed(sol, z);
    const auto b = monodromy_transformed(sol, -z);
    CHECK(std::abs(a.delta - b.delta) < 1e-10 * std::max(1.0, std::abs(a.delta)));
  }
  const auto bt = find_band_edges(op, 10);
  const auto bh = find_band_edges(sol.p.derivative(1).shifted(sol.c), 10);
  for (int n = 0; n < 10; ++n) {
    CHECK(std::abs(bt.E_minus[n] - bh.E_minus[n]) < 1e-7);
    CHECK(std::abs(bt.E_plus[n] - bh.E_plus[n]) < 1e-7);
  }
}

TEST_CASE("quasimomentum of the transformed operator: comb facts and 1/z coefficient") {
  auto sol = riccati_solve(riccati_forward(PeriodicPotential({0.0, 0.5}, {})));
  calibrate_c(sol);
  const auto b = find_band_edges(sol.transformed_operator(), 8);
  DirectK k(b);
  QuasimomentumMap qm(b);
  // both routes agree off the real line
  for (cplx z : {cplx(2.0, 1.0), cplx(9.5, 0.3), cplx(0.5, 4.0)}) {
    const auto ki = qm.k_integral(z);
    CHECK(std::abs(ki.k - k(z)) < 1e-8);
  }
  // Im k >= Im z in the upper half-plane and k(-conj z) = -conj k(z)
  for (cplx z : {cplx(3.0, 0.5), cplx(12.0, 2.0)}) {
    CHECK(k(z).imag() >= z.imag() - 1e-12);
    CHECK(std::abs(k(-std::conj(z)) + std::conj(k(z))) < 1e-9);
  }
  // k(iy) - iy = -P_{-1} / (iy) + o(1/y)
  const double y = 200.0;
  const double P = (-k.shift(cplx(0.0, y)) * cplx(0.0, y)).real();
  CHECK(std::abs(P / (0.5 * sol.norm_q_sq) - 1.0) < 0.05);
  CHECK(std::abs(qm.moments().Q[0] - 0.5 * sol.norm_q_sq) < 1e-8);
}

TEST_CASE("k_0 estimates near the first gaps") {
  auto sol = riccati_solve(riccati_forward(PeriodicPotential({0.0, 0.5}, {})));
  calibrate_c(sol);
  const auto b = find_band_edges(sol.transformed_operator(), 6);
  DirectK k(b);
  QuasimomentumMap qm(b);
  K0BoundsOptions opt;
  opt.n_max = 3;
  opt.boundary_points = 16;
  opt.interior_points = 24;
  const auto rep = verify_k0_bounds(k, qm, opt);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) {
    CHECK(r.ok_eps_boundary);
    CHECK(r.ok_max_principle);
    CHECK(r.ok_V_interior);
  }
  CHECK(rep.ok_summability);
  // the first gap's rim maximum sits near half the gap length
  CHECK(std::abs(rep.rows[0].rim_max / rep.rows[0].gap - 0.5) < 0.05);
}

TEST_CASE("k_0 vanishes for the free comb") {
  const auto b = find_band_edges(PeriodicPotential(), 4);
  DirectK k(b);
  QuasimomentumMap qm(b);
  K0BoundsOptions opt;
  opt.n_max = 2;
  opt.boundary_points = 8;
  opt.interior_points = 12;
  const auto rep = verify_k0_bounds(k, qm, opt);
  CHECK(rep.trivial);
  CHECK(rep.all_ok());
  for (const auto& r : rep.rows) CHECK(r.V_interior_max < 1e-10);
}

TEST_CASE("distribution descriptor") {
  const auto j = nlohmann::json::parse(R"({"type":"distribution","p_cos":[3.0,0.5],"p_sin":[0.25]})");
  const auto p = distribution_primitive_from_json(j);
  CHECK(p.mean() == 0.0);
  CHECK(p.cos_coeffs()[1] == 0.5);
  CHECK(p.sin_coeffs()[1] == 0.25);
  CHECK_THROWS_AS(distribution_primitive_from_json(nlohmann::json::parse(R"({"type":"fourier"})")), DomainError);
}
