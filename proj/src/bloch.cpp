#include "hillband/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hillband/errors.hpp"

namespace hillband {

namespace {

using std::numbers::pi;
constexpr cplx I(0.0, 1.0);

}  // namespace

WeylM weyl_m(const MonodromySolution& sol, cplx kz) {
  const cplx ph = sol.phi1();
  if (std::abs(ph) < 1e-12) throw PoleError("phi(1, z) vanishes: z is a Dirichlet eigenvalue momentum");
  const cplx s = I * std::sin(kz);
  return {(sol.beta + s) / ph, (sol.beta - s) / ph};
}

WeylM weyl_m(const DirectK& k, cplx z) { return weyl_m(integrate(k.bands().op, z), k(z)); }

BlochEval bloch_psi(const DirectK& k, cplx z, int n_store) {
  const auto sol = integrate(k.bands().op, z, n_store);
  BlochEval e;
  e.z = z;
  e.k = k(z);
  const auto m = weyl_m(sol, e.k);
  e.M_plus = m.plus;
  e.M_minus = m.minus;
  e.x = sol.x_grid;
  for (std::size_t i = 0; i < e.x.size(); ++i) {
    e.psi_plus.push_back(sol.theta[i] + e.M_plus * sol.phi[i]);
    e.psi_minus.push_back(sol.theta[i] + e.M_minus * sol.phi[i]);
    e.dpsi_plus.push_back(sol.theta_prime[i] + e.M_plus * sol.phi_prime[i]);
    e.dpsi_minus.push_back(sol.theta_prime[i] + e.M_minus * sol.phi_prime[i]);
  }
  return e;
}

double BlochIdentities::max() const { return std::max({psi0, dpsi0, psi1, dpsi1, sum, diff}); }

BlochIdentities check_bloch_identities(const BlochEval& e, const MonodromySolution& sol) {
  BlochIdentities r;
  const cplx ep = std::exp(I * e.k), em = std::exp(-I * e.k);
  const auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  r.psi0 = std::max(rel(e.psi_plus.front(), 1.0), rel(e.psi_minus.front(), 1.0));
  r.dpsi0 = std::max(rel(e.dpsi_plus.front(), e.M_plus), rel(e.dpsi_minus.front(), e.M_minus));
  r.psi1 = std::max(rel(e.psi_plus.back(), ep), rel(e.psi_minus.back(), em));
  r.dpsi1 = std::max(rel(e.dpsi_plus.back(), ep * e.M_plus), rel(e.dpsi_minus.back(), em * e.M_minus));
  const cplx ph = sol.phi1();
  r.sum = rel(e.M_plus + e.M_minus, 2.0 * sol.beta / ph);
  r.diff = rel(e.M_plus - e.M_minus, 2.0 * I * std::sin(e.k) / ph);
  return r;
}

BlochAsymReport verify_bloch_asymptotics(const DirectK& k, const AsymptoticModel& model, const BlochAsymOptions& opt,
                           const QuasimomentumMap* qmap) {
  const BandStructure& bands = k.bands();
  const PeriodOperator& op = bands.op;
  BlochAsymReport rep;
  const int m = model.m();
  rep.m = m;
  rep.bound_M = 1.0 - m;
  rep.bound_psi = -m;
  rep.bound_k = -m;
  rep.k_checked = bands.normalized;

  for (int i = 0; i < opt.r_points; ++i) {
    const double R = opt.r_min * std::pow(opt.r_max / opt.r_min, static_cast<double>(i) / (opt.r_points - 1));
    double eM = 0.0, ePsi = 0.0, eK = 0.0;
    for (int w = 0; w < opt.window; ++w) {
      const double x = R + pi * w / opt.window;
      for (double ys : {0.5, -0.5}) {
        const cplx z(x, ys * opt.strip_r);
        const auto sol = integrate(op, z, opt.x_points);
        const cplx kz = k(z);
        const auto M = weyl_m(sol, kz);
        eM = std::max({eM, std::abs(M.plus - model.rho(z)), std::abs(M.minus - model.rho(-z))});
        for (std::size_t j = 0; j < sol.x_grid.size(); ++j) {
          const double xx = sol.x_grid[j];
          const cplx pp = sol.theta[j] + M.plus * sol.phi[j];
          const cplx pm = sol.theta[j] + M.minus * sol.phi[j];
          ePsi = std::max({ePsi, std::abs(pp - std::exp(I * model.xi(xx, z))),
                           std::abs(pm - std::exp(I * model.xi(xx, -z)))});
        }
        if (rep.k_checked) eK = std::max(eK, std::abs(kz - model.xi(1.0, z)));
      }
    }
    rep.radius.push_back(R);
    rep.err_M.push_back(eM);
    rep.err_psi.push_back(ePsi);
    rep.err_k.push_back(eK);
  }
  const bool free_op = op.b().is_zero() && !op.drift();
  const auto positive = [&](const std::vector<double>& v) {
    return !free_op && std::all_of(v.begin(), v.end(), [](double a) { return a > 0.0; });
  };
  if (positive(rep.err_M)) rep.fit_M = fit_loglog(rep.radius, rep.err_M);
  if (positive(rep.err_psi)) rep.fit_psi = fit_loglog(rep.radius, rep.err_psi);
  if (rep.k_checked && positive(rep.err_k)) rep.fit_k = fit_loglog(rep.radius, rep.err_k);
  if (!positive(rep.err_M) || !positive(rep.err_psi)) rep.notice = free_op ? "free operator: the model is exact, errors are integration noise" : "errors vanish identically; slope fits skipped";

  for (double R : {50.0, 100.0, 200.0}) {
    const cplx z(R, 0.5 * opt.strip_r);
    const auto sol = integrate(op, z);
    const cplx xi = model.xi(1.0, z);
    const cplx om = model.omega(z), ta = model.tau(z);
    rep.fund_z.push_back(R);
    rep.fund_phi_abs.push_back(std::abs(sol.phi1()));
    rep.fund_phi_err.push_back(std::abs(sol.phi1() - std::sin(xi) / om));
    rep.fund_theta_err.push_back(std::abs(sol.theta1() - (std::cos(xi) - ta / om * std::sin(xi))));
    rep.fund_beta_err.push_back(std::abs(sol.beta - ta / om * std::sin(xi)));
  }

  const auto& ki = model.kappa_int();
  for (std::size_t j = 0; 2 * j + 1 <= ki.size(); ++j) {
    if (qmap && 2 * j < qmap->moments().Q.size()) {
      const double lhs = ((j % 2 == 0) ? 1.0 : -1.0) * std::ldexp(ki[2 * j], -static_cast<int>(2 * j + 1));
      rep.moment_odd_err.push_back(std::abs(lhs - qmap->moments().Q[2 * j]));
    }
    if (2 * j + 2 <= ki.size()) rep.moment_even_abs.push_back(std::abs(ki[2 * j + 1]));
  }
  return rep;
}

}  // namespace hillband
