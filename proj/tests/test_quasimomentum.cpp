#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hillband/errors.hpp"
#include "hillband/quasimomentum.hpp"

using namespace hillband;
using std::numbers::pi;

TEST_CASE("free operator: k(z) = z") {
  const auto b = find_band_edges(PeriodicPotential(), 8);
  DirectK k(b);
  for (cplx z : {cplx(3.0, 0.7), cplx(0.2, 5.0), cplx(-7.0, -2.0), cplx(2.0, 0.0), cplx(0.0, 40.0)})
    CHECK(std::abs(k(z) - z) < 1e-10);
  QuasimomentumMap q(b);
  CHECK(std::abs(q.k_integral(cplx(5, 5)).k - cplx(5, 5)) < 1e-14);
}

TEST_CASE("normalized constant potential: k(z) = z") {
  const auto b = find_band_edges(PeriodicPotential::constant(2.5), 5);
  DirectK k(b);
  for (cplx z : {cplx(3.0, 0.7), cplx(1.0, 0.0), cplx(10.0, -1.0)}) CHECK(std::abs(k(z) - z) < 1e-9);
}

TEST_CASE("Mathieu quasimomentum") {
  PeriodicPotential p({0.0, 2.0}, {});
  const auto b = find_band_edges(p, 30);
  DirectK k(b);
  QuasimomentumMap qm(b);

  const cplx edge = k(cplx(b.e_minus[0]));
  CHECK(edge.real() == doctest::Approx(pi).epsilon(1e-7));
  CHECK(std::abs(edge.imag()) < 1e-12);
  CHECK_THROWS_AS(k(cplx(0.5 * (b.e_minus[0] + b.e_plus[0]))), DomainError);

  const auto rim = k.on_gap_rim(1, b.e_max[0], +1);
  CHECK(rim.real() == doctest::Approx(pi));
  CHECK(rim.imag() == doctest::Approx(b.h[0]).epsilon(1e-10));
  CHECK(k.on_gap_rim(1, b.e_max[0], -1) == std::conj(rim));

  const cplx z(5.0, 5.0);
  const auto ki = qm.k_integral(z);
  CHECK(std::abs(ki.k - k(z)) <= ki.tail_bound + 1e-6);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(-40.0, 40.0), uy(-3.0, 3.0);
  for (int i = 0; i < 30; ++i) {
    cplx w(ux(rng), uy(rng));
    if (std::abs(w.imag()) < 0.1) w.imag(0.1);
    const cplx kw = k(w);
    CHECK(std::abs(k(-w) + kw) < 1e-9);
    CHECK(std::abs(k(std::conj(w)) - std::conj(kw)) < 1e-9);
    if (w.imag() > 0) CHECK(kw.imag() > 0.0);
    const auto kiw = qm.k_integral(w);
    CHECK(std::abs(kiw.k - kw) <= kiw.tail_bound + 1e-6);
  }

  // k(iy) - iy ~ -Q_0 / (iy)
  const cplx zy(0.0, 50.0);
  const cplx lead = -qm.moments().Q[0] / zy;
  CHECK(std::abs(k.shift(zy) - lead) < 0.01 * std::abs(lead));
}

TEST_CASE("remainders by both routes") {
  PeriodicPotential p({0.0, 2.0}, {});
  const auto b = find_band_edges(p, 30);
  DirectK k(b);
  QuasimomentumMap qm(b);
  AsymptoticModel model(b.op.b(), 2);
  for (int m = 0; m <= 2; ++m) {
    for (cplx z : {cplx(6.0, 1.0), cplx(0.0, 30.0), cplx(20.0, 0.5)}) {
      const auto r = remainder_f(k, qm, model, m, z);
      CHECK(std::abs(r.f_def - r.f_int) <= r.tail + 1e-9 * std::max(1.0, std::abs(r.f_def)) + 1e-12);
    }
  }
  const auto rz = remainder_f(k, qm, model, 0, cplx(b.e_plus[1]));
  CHECK(std::abs(rz.f_def.imag()) < 1e-12);
  CHECK_THROWS_AS(remainder_f(k, qm, model, 0, cplx(0.0)), DomainError);

  const auto free_b = find_band_edges(PeriodicPotential(), 4);
  DirectK k0(free_b);
  QuasimomentumMap q0(free_b);
  AsymptoticModel m0(PeriodicPotential(), 1);
  const auto r0 = remainder_f(k0, q0, m0, 1, cplx(3.0, 2.0));
  CHECK(std::abs(r0.f_def) < 1e-12);
  CHECK(std::abs(r0.f_int) == 0.0);
}

TEST_CASE("comb symmetries, rim values and Cauchy bounds") {
  const auto b = find_band_edges(PeriodicPotential({0.4, 1.5, -0.3}, {0.8, 0.2}), 12);
  DirectK k(b);
  QuasimomentumMap qm(b);
  const auto& mo = qm.moments();
  for (cplx z : {cplx(2.3, 0.4), cplx(17.1, -1.2), cplx(-8.8, 2.5), cplx(0.4, 3.0)}) {
    CHECK(std::abs(k(-z) + k(z)) < 1e-9);
    CHECK(std::abs(k(std::conj(z)) - std::conj(k(z))) < 1e-9);
    const double d = qm.dist_to_gaps(z);
    CHECK(std::abs(k.shift(z)) <= (mo.Q[0] + mo.Q_tail[0]) / d);
    const cplx k1 = z * z * qm.f_integral(0, z).k;
    CHECK(std::abs(k1) <= (mo.Q[2] + mo.Q_tail[2]) / d);
  }
  AsymptoticModel model(b.op.b(), 1);
  for (int n = 1; n <= 4; ++n) {
    if (b.is_degenerate(n)) continue;
    double prev = 1e300;
    for (int i = 1; i < 16; ++i) {
      const double t = b.e_minus[n - 1] + b.gap_length(n) * i / 16.0;
      const cplx up = k.on_gap_rim(n, t, 1), down = k.on_gap_rim(n, t, -1);
      CHECK(std::abs(up.real() - pi * n) < 1e-9);
      CHECK(up.imag() > 0.0);
      CHECK(up.imag() <= b.h[n - 1] + 1e-9);
      CHECK(std::abs(down.imag() + up.imag()) < 1e-9);
      // Re f_1(t + i0) = pi n - t + P_{-1}/t decreases across the gap
      const double f = up.real() - t + model.K(cplx(t), 0).real();
      CHECK(f < prev);
      prev = f;
    }
  }
}

TEST_CASE("band edges approach pi n") {
  const auto b = find_band_edges(PeriodicPotential({0.0, 1.0, 0.5}, {0.3}), 20);
  const auto off = [&](int n) {
    return std::max(std::abs(b.e_minus[n - 1] - pi * n), std::abs(b.e_plus[n - 1] - pi * n));
  };
  for (int n = 5; n <= 20; ++n) CHECK(off(n) < off(n - 4));
  CHECK(off(20) < 0.01);
}
