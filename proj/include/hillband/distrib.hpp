#pragma once

#include <string>
#include <vector>

#include "hillband/quasimomentum.hpp"

namespace hillband {

/// Potential c + p' with p in H_1, reduced via q in H_* solving p' = q' + q^2 - ||q||^2.
struct RiccatiSolution {
  PeriodicPotential p;  // mean-zero primitive of the singular part
  PeriodicPotential q;  // mean-zero
  double norm_q_sq = 0.0;
  double c = 0.0;       // constant with E_0^+ = 0
  double residual = 0.0;  // max |p' - q' - q^2 + ||q||^2| on a fine grid
  int iterations = 0;

  /// -y'' - 2q y' + (c - ||q||^2) y = z^2 y.
  PeriodOperator transformed_operator() const;
};

struct RiccatiOptions {
  int harmonics = 0;  // 0 picks max(64, 8 * harmonics(p))
  double tol = 1e-10;
  int max_iter = 50;
};

/// Newton iteration in Fourier space on (q_0, a_k, b_k, ||q||^2) with the mean-zero row closing
/// the system. Throws ConvergenceError after max_iter iterations.
RiccatiSolution riccati_solve(const PeriodicPotential& p, const RiccatiOptions& opt = {});

/// p = q + primitive(q^2 - ||q||^2), the exact inverse of the Riccati map for trigonometric q.
PeriodicPotential riccati_forward(const PeriodicPotential& q);

/// Fixes c so that the bottom of the spectrum of the transformed operator sits at 0.
void calibrate_c(RiccatiSolution& sol, const ode::Options& opt = default_ode_options());

MonodromySolution monodromy_transformed(const RiccatiSolution& sol, cplx z, int n_store = 2);

/// {"type":"distribution","p_cos":[...],"p_sin":[...]}: p_cos[0] is ignored (p is taken mean-zero).
PeriodicPotential distribution_primitive_from_json(const nlohmann::json& j);

struct K0BoundsOptions {
  double eps = 0.1;
  double r = std::numbers::pi;  // half-height of V_n, r >= pi
  int n_max = 20;
  int boundary_points = 48;
  int interior_points = 48;
};

struct K0BoundsRow {
  int n;
  double gap;
  double Y0;
  double rim_max;             // max_{g_n} |k_0(t + i0)|
  double rim_constant;        // (rim_max / |g_n| - 1) / Y0, reported only
  double eps_boundary_max;    // max_{dist = eps} |k_0|
  double S_eps;               // S_n(eps)
  double V_boundary_max;      // max over dV_n minus dU_n
  double S_one;               // S_n(1)
  double V_interior_max;      // max over V_n
  double S_eps_plus_S_s;      // S_n(eps) + S_n(s)
  double U_interior_max;      // max over U_n off the cut, checked against the boundary maximum
  double U_boundary_max;      // max over dU_n including both rims
  bool ok_rim_window;  // |g_n|(1 - Y0) <= rim_max <= |g_n|(1 + Y0) on open gaps
  bool ok_eps_boundary, ok_V_boundary, ok_max_principle, ok_V_interior;
};

struct K0BoundsReport {
  bool trivial = false;
  std::vector<K0BoundsRow> rows;
  double sum_S_sq_eps = 0.0, bound_sum_eps = 0.0;
  double sum_S_sq_one = 0.0, bound_sum_one = 0.0;
  bool ok_summability = true;
  double Q0 = 0.0, s = 0.0;
  bool all_ok() const;
};

/// Bounds on k_0 = z - k near each gap of the transformed operator's comb.
K0BoundsReport verify_k0_bounds(const DirectK& k, const QuasimomentumMap& qmap, const K0BoundsOptions& opt = {});

}  // namespace hillband
