#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hillband/diffalg.hpp"
#include "hillband/errors.hpp"
#include "hillband/spectrum.hpp"

using namespace hillband;
using std::numbers::pi;

TEST_CASE("free operator has closed gaps at pi n") {
  const auto b = find_band_edges(PeriodicPotential(), 6);
  CHECK(b.E0 == doctest::Approx(0.0).epsilon(1e-12));
  for (int n = 1; n <= 6; ++n) {
    CHECK(b.is_degenerate(n));
    CHECK(b.e_minus[n - 1] == doctest::Approx(pi * n).epsilon(1e-9));
    CHECK(gap_height(b, n).second == 0.0);
  }
  const auto m = gap_mass_and_moments(b, 4);
  for (double q : m.Q) CHECK(q == 0.0);
}

TEST_CASE("constant potential normalizes to the free operator") {
  const auto b = find_band_edges(PeriodicPotential::constant(3.5), 4);
  CHECK(b.E0 == doctest::Approx(3.5).epsilon(1e-10));
  for (int n = 1; n <= 4; ++n) CHECK(b.e_plus[n - 1] == doctest::Approx(pi * n).epsilon(1e-9));
}

TEST_CASE("small cosine opens gaps of twice the coefficient") {
  const auto b = find_band_edges(PeriodicPotential({0.0, 0.1}, {}), 2);
  CHECK(b.energy_gap_length(1) == doctest::Approx(0.2).epsilon(0.15));
}

TEST_CASE("Mathieu comb data") {
  PeriodicPotential p({0.0, 2.0}, {});
  const auto b = find_band_edges(p, 12);
  CHECK(b.E0 < 0.0);
  for (int n = 1; n <= 12; ++n) {
    const double sn = (n % 2 == 0) ? 1.0 : -1.0;
    if (b.is_degenerate(n)) continue;
    CHECK(std::abs(discriminant_on_momentum(b.op, b.e_minus[n - 1]).delta - sn) < 1e-8);
    CHECK(std::abs(discriminant_on_momentum(b.op, b.e_plus[n - 1]).delta - sn) < 1e-8);
    CHECK(b.gap_length(n) <= 2 * b.h[n - 1]);
    CHECK(v_on_gap(b, n, b.e_max[n - 1]) == doctest::Approx(b.h[n - 1]).epsilon(1e-10));
    CHECK(v_on_gap(b, n, b.e_minus[n - 1]) < 1e-6);
  }
  CHECK_THROWS_AS(v_on_gap(b, 1, b.e_plus[0] + 0.1), DomainError);
  CHECK(b.h[0] > 0.0);

  const auto mom = gap_mass_and_moments(b, 4);
  const auto P = coefficients_P(p.shifted(-b.E0), 2);
  MESSAGE("Q0 " << mom.Q[0] << " P-1 " << P[0] << " Q2 " << mom.Q[2] << " P0 " << P[1] << " Q4 " << mom.Q[4]
                << " P1 " << P[2] << " tails " << mom.Q_tail[0] << " " << mom.Q_tail[2] << " " << mom.Q_tail[4]);
  CHECK(std::abs(mom.Q[0] - P[0]) <= mom.Q_tail[0] + 0.01 * std::abs(P[0]));
  CHECK(std::abs(mom.Q[2] - P[1]) <= mom.Q_tail[2] + 0.01 * std::abs(P[1]));
  double hmax = 0.0;
  for (double h : b.h) hmax = std::max(hmax, h);
  CHECK(hmax * hmax <= 2 * mom.Q[0]);

  const auto y = Y_n_function(b, 1, b.e_max[0]);
  MESSAGE("Y direct " << y.direct << " integral " << y.integral);
  CHECK(std::abs(y.direct - y.integral) <= 1e-4);
  const double t = 0.5 * (b.e_minus[0] + b.e_plus[0]);
  const double vn = std::sqrt((t - b.e_minus[0]) * (b.e_plus[0] - t));
  CHECK(v_on_gap(b, 1, t) == doctest::Approx(vn * (1 + Y_n_integral(b, 1, t))).epsilon(1e-6));
}

TEST_CASE("S_n on synthetic combs") {
  std::vector<double> zero(5, 0.0), one{1.0, 0.0, 0.0};
  CHECK(S_n_sum(zero, 1.0, 2, 1.0) == 0.0);
  CHECK(S_n_sum(one, 1.0, 2, 1.0) == doctest::Approx(4.0 / 3.0));
  CHECK(S_n_sum(one, 1.0, 1, 1.0) == doctest::Approx(2.0 + 0.5));
  CHECK_THROWS_AS(S_n_sum(one, 1.0, 1, 0.0), DomainError);
}
