#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "hillband/monodromy.hpp"

namespace hillband {

struct SpectrumOptions {
  bool normalize = true;          // shift the operator so that E_0^+ = 0
  int quad_nodes = 64;            // per-gap quadrature nodes
  double scan_step = 0.1;         // momentum step of the extremum scan
  double degenerate_excess = 1e-11;  // (-1)^n Delta(e_n) - 1 at or below this counts as a closed gap
  double degenerate_width = 1e-9;
  ode::Options ode = default_ode_options();
};

/// Samples of v(t + i0) on one gap at the Chebyshev points t_i = c + r cos(theta_i),
/// theta_i = (i - 1/2) pi / n. g_i = v_i / (r sin theta_i) is the smooth factor left after
/// removing the square-root edge behaviour, so that
///   int_gap F(t) v(t) dt = r^2 (pi / n) sum_i F(t_i) g_i sin^2(theta_i)
/// converges spectrally even for F with a simple pole at an edge.
struct GapQuadrature {
  double center = 0.0;
  double half_width = 0.0;
  std::vector<double> theta, t, v, g;

  bool empty() const { return half_width <= 0.0 || t.empty(); }

  template <class F>
  double integrate(F&& f) const {
    if (empty()) return 0.0;
    const double w = half_width * half_width * std::numbers::pi / static_cast<double>(t.size());
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double sn = std::sin(theta[i]);
      s += f(t[i]) * g[i] * sn * sn;
    }
    return w * s;
  }
};

struct BandStructure {
  PeriodOperator op = PeriodOperator::hill(PeriodicPotential());  // the (possibly shifted) operator
  bool normalized = true;
  double E0 = 0.0;     // ground edge E_0^+ of the operator before normalization
  double z0 = 0.0;     // momentum where band 1 starts
  int n_gaps = 0;
  std::vector<double> E_minus, E_plus, e_minus, e_plus, e_max, h, M;
  std::vector<bool> degenerate;
  std::vector<GapQuadrature> quad;
  double s_min = 0.0;

  // 1-based gap index accessors
  double gap_length(int n) const { return e_plus.at(n - 1) - e_minus.at(n - 1); }
  double energy_gap_length(int n) const { return E_plus.at(n - 1) - E_minus.at(n - 1); }
  bool is_degenerate(int n) const { return degenerate.at(n - 1); }
  /// Momentum band sigma_n = [e_{n-1}^+, e_n^-] with e_0^+ = z0.
  double band_length(int n) const;
};

/// Lowest energy with Delta = 1 (the bottom of the spectrum).
double find_ground_energy(const PeriodOperator& op, const ode::Options& opt = default_ode_options());

BandStructure find_band_edges(const PeriodicPotential& p, int N, const SpectrumOptions& opt = {});
BandStructure find_band_edges(const PeriodOperator& op, int N, const SpectrumOptions& opt = {});

/// (e_n, h_n); a closed gap gives (midpoint, 0).
std::pair<double, double> gap_height(const BandStructure& bands, int n);

/// v(t + i0) = arccosh |Delta(t)| for t in the closed gap n, computed from a fresh integration.
double v_on_gap(const BandStructure& bands, int n, double t);

struct GapMoments {
  std::vector<double> M;       // M_n = (1/pi) int_{g_n} v, n = 1..N
  std::vector<double> Q;       // Q_m, m = 0..m_max (odd entries are 0)
  std::vector<double> Q_tail;  // estimate of the contribution of gaps n > N
  double M_tail = 0.0;
};

GapMoments gap_mass_and_moments(const BandStructure& bands, int m_max);

/// (1/pi) int_{g_n} t^m v(t) dt for one gap.
double gap_moment(const BandStructure& bands, int n, int m);

struct YValue {
  double direct;    // v / v_n - 1 (NaN at the edges)
  double integral;  // sum over the other gaps, both signs
};

YValue Y_n_function(const BandStructure& bands, int n, double t);
/// Integral form only; needs no integration.
double Y_n_integral(const BandStructure& bands, int n, double t);
/// max of Y_n over `points` interior points of g_n.
double Y_n_max(const BandStructure& bands, int n, int points = 33);

/// S_n(r) = sum_{j in Z} M_j / |n - j|_1 with |j|_1 = s|j| (j != 0), |0|_1 = r/2, M_{-j} = M_j, M_0 = 0.
double S_n_sum(std::span<const double> M, double s, int n, double r);
double S_n_sum(const BandStructure& bands, int n, double r);

}  // namespace hillband
