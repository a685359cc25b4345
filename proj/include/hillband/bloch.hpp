#pragma once

#include <string>
#include <vector>

#include "hillband/quasimomentum.hpp"

namespace hillband {

struct WeylM {
  cplx plus, minus;
};

/// M_+-(z) = (beta(z) +- i sin k(z)) / phi(1, z). Throws PoleError when |phi(1, z)| < 1e-12.
WeylM weyl_m(const DirectK& k, cplx z);
WeylM weyl_m(const MonodromySolution& sol, cplx kz);

struct BlochEval {
  cplx z, k;
  cplx M_plus, M_minus;
  std::vector<double> x;
  std::vector<cplx> psi_plus, psi_minus, dpsi_plus, dpsi_minus;
};

/// Psi_+-(x, z) = theta(x, z) + M_+-(z) phi(x, z) on n_store points of [0, 1].
BlochEval bloch_psi(const DirectK& k, cplx z, int n_store = 33);

struct BlochIdentities {
  double psi0 = 0, dpsi0 = 0, psi1 = 0, dpsi1 = 0;  // |Psi(0)-1|, |Psi'(0)-M|, |Psi(1)-e^{+-ik}|, |Psi'(1)-e^{+-ik}M|
  double sum = 0, diff = 0;  // |M_+ + M_- - 2 beta/phi(1)|, |M_+ - M_- - 2i sin k/phi(1)| (relative)
  double max() const;
};
BlochIdentities check_bloch_identities(const BlochEval& e, const MonodromySolution& sol);

struct BlochAsymOptions {
  double r_min = 10.0, r_max = 200.0;
  int r_points = 10;
  double strip_r = 1.0;
  double eps = 0.1;
  int window = 4;  // Re z offsets per |z| centre; the error is the supremum over the window
  int x_points = 33;
};

struct BlochAsymReport {
  int m = 0;
  std::vector<double> radius;
  std::vector<double> err_M, err_psi, err_k;  // windowed suprema
  SlopeFit fit_M, fit_psi, fit_k;
  double bound_M = 0.0, bound_psi = 0.0, bound_k = 0.0;  // expected exponents 1-m, -m, -m
  bool k_checked = false;  // needs the normalised operator
  // fundamental-solution asymptotics spot check at |z| = 50, 100, 200
  std::vector<double> fund_z, fund_phi_err, fund_phi_abs, fund_theta_err, fund_beta_err;
  // moment identities: |(-1)^j 2^{-2j-1} int kappa_{2j+1} - Q_{2j}| and |int kappa_{2j}|
  std::vector<double> moment_odd_err, moment_even_abs;
  std::string notice;
};

/// Bloch and Weyl function asymptotics. `k` may be built on a non-normalised band structure; the k - xi check is then
/// skipped. `qmap` (optional) supplies Q_{2j} for the moment identities.
BlochAsymReport verify_bloch_asymptotics(const DirectK& k, const AsymptoticModel& model, const BlochAsymOptions& opt = {},
                           const QuasimomentumMap* qmap = nullptr);

}  // namespace hillband
