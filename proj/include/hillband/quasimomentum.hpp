#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hillband/diffalg.hpp"
#include "hillband/spectrum.hpp"

namespace hillband {

/// Quasimomentum from the operator itself: arccos of Delta on the branch normalised by k(z) - z -> 0.
///
/// Off the real axis the branch is fixed without path tracking. For Im z > 0 the Floquet multiplier
/// mu = e^{-ik} with |mu| >= 1 belongs to a Bloch solution psi whose log-derivative s = psi'/psi is
/// smooth on the real line; u = s + iz solves u' = b + 2izu - u^2 (plus drift terms) and
///   k(z) = z + i int_1^2 u(x) dx,
/// which is the continuous branch. The result is snapped to the nearest arccos Delta candidate.
/// Im z < 0 follows from k(conj z) = conj k(z); real z uses the band index.
class DirectK {
 public:
  explicit DirectK(const BandStructure& bands, ode::Options opt = default_ode_options());

  cplx operator()(cplx z) const { return z + shift(z); }
  /// k(z) - z, computed without cancellation.
  cplx shift(cplx z) const;
  /// k(t +- i0) on the closed gap n.
  cplx on_gap_rim(int n, double t, int side) const;

  const BandStructure& bands() const { return bands_; }

 private:
  cplx shift_upper(cplx z) const;
  cplx shift_real(double z) const;
  const BandStructure& bands_;
  ode::Options opt_;
};

cplx k_direct(const BandStructure& bands, cplx z);
cplx k_on_gap_rim(const BandStructure& bands, int n, double t, int side);

struct KIntegral {
  cplx k;
  double tail_bound = 0.0;
  bool accuracy_warning = false;  // z within 1e-6 of a gap
};

/// Quasimomentum from the gap data alone: k(z) = z + (1/pi) int_g v(t) / (t - z) dt.
class QuasimomentumMap {
 public:
  QuasimomentumMap(const BandStructure& bands, int m_max = 6);

  const BandStructure& bands() const { return bands_; }
  const GapMoments& moments() const { return moments_; }
  int N() const { return bands_.n_gaps; }
  double tail_bound() const { return moments_.M_tail; }

  KIntegral k_integral(cplx z) const;
  /// z^{-2m-2} (1/pi) int_g t^{2m+2} v / (t - z) dt and its tail bound.
  KIntegral f_integral(int m, cplx z) const;
  double dist_to_gaps(cplx z) const;

 private:
  // sum over both signs of (1/pi) int t^L v(t)/(t - z) dt for even L, and the tail of that sum
  std::pair<cplx, double> cauchy(int L, cplx z) const;
  const BandStructure& bands_;
  GapMoments moments_;
};

struct Remainder {
  cplx f_def;  // k - z + K_m from the direct route
  cplx f_int;  // gap-integral route
  double tail = 0.0;
};

Remainder remainder_f(const DirectK& k, const QuasimomentumMap& qmap, const AsymptoticModel& model, int m, cplx z);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SectorOptions {
  double y_min = 20.0, y_max = 200.0;
  int y_points = 16;
  double eps = 0.1;
  double strip_r = 1.0;
  int strip_points = 60;
  int sharp_gaps = 5;
};

struct SharpnessRow {
  int n;
  double gap, energy_gap;
  double f_minus, f_plus;          // f_{m+1}(e_n^-), f_{m+1}(e_n^+)
  double ratio_minus, ratio_plus;  // f(e^+-) * (-+ 2 pi n / |gamma_n|)
  double half_ratio_minus, half_ratio_plus;  // f(e^+-) * (-+ 2 / |g_n|)
  double max_abs_f_near;          // max |f| with dist(z, g_n) <= eps
  double b_n;                     // max_abs_f_near - |gamma_n| / (2 pi n)
};

struct SectorReport {
  int m = 0;
  bool trivial = false;
  std::vector<double> y, abs_f, prefactor;
  SlopeFit sector;
  double expected_slope = 0.0;
  double prefactor_estimate = 0.0, P_m = 0.0;
  double strip_max_scaled = 0.0;  // max |z^{2m+2} f_{m+1}(z)| over the strip sample
  std::vector<SharpnessRow> sharpness;
  std::string sharpness_notice;
};

SectorReport verify_sector(const DirectK& k, const AsymptoticModel& model, int m, const SectorOptions& opt = {});

}  // namespace hillband
