#include "hillband/distrib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hillband/errors.hpp"

namespace hillband {

namespace {

using std::numbers::pi;

PeriodicPotential from_vec(const Eigen::VectorXd& x, int K) {
  std::vector<double> c(K + 1, 0.0), s(K, 0.0);
  for (int k = 1; k <= K; ++k) {
    c[k] = x[k - 1];
    s[k - 1] = x[K + k - 1];
  }
  return PeriodicPotential(std::move(c), std::move(s));
}

// coefficients 1..K of a mean-zero function, cos block then sin block
Eigen::VectorXd to_vec(const PeriodicPotential& f, int K) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * K);
  const auto& c = f.cos_coeffs();
  const auto& s = f.sin_coeffs();
  for (int k = 1; k <= std::min(K, f.harmonics()); ++k) {
    x[k - 1] = c[k];
    x[K + k - 1] = s[k];
  }
  return x;
}

double grid_residual(const PeriodicPotential& p, const PeriodicPotential& q, double lam) {
  const int n = std::max(1024, 16 * std::max(p.harmonics(), 2 * q.harmonics()));
  const auto dp = p.derivative(1).samples(n);
  const auto dq = q.derivative(1).samples(n);
  const auto qv = q.samples(n);
  double r = 0.0;
  for (int i = 0; i < n; ++i) r = std::max(r, std::abs(dp[i] - dq[i] - qv[i] * qv[i] + lam));
  return r;
}

}  // namespace

PeriodOperator RiccatiSolution::transformed_operator() const {
  return PeriodOperator::with_drift(q, PeriodicPotential::constant(c - norm_q_sq));
}

PeriodicPotential riccati_forward(const PeriodicPotential& q) {
  const PeriodicPotential q0 = q.shifted(-q.mean());
  return q0 + (q0 * q0).antiderivative();
}

RiccatiSolution riccati_solve(const PeriodicPotential& p_in, const RiccatiOptions& opt) {
  const PeriodicPotential p = p_in.shifted(-p_in.mean());
  RiccatiSolution sol;
  sol.p = p;
  if (p.is_zero()) {
    sol.q = PeriodicPotential();
    return sol;
  }
  const int K = opt.harmonics > 0 ? opt.harmonics : std::max(64, 8 * p.harmonics());
  const Eigen::VectorXd target = to_vec(p, K);

  // G(q) = q + primitive(q^2) - p on the first K harmonics; the mean of q^2 is ||q||^2 and drops out
  const auto G = [&](const Eigen::VectorXd& x) {
    const PeriodicPotential q = from_vec(x, K);
    return Eigen::VectorXd(x + to_vec((q * q).antiderivative(), K) - target);
  };

  Eigen::VectorXd x = target;  // q_0 = p
  Eigen::VectorXd g = G(x);
  double res = g.lpNorm<Eigen::Infinity>();
  const auto pointwise = [&] {
    const PeriodicPotential q = from_vec(x, K);
    return grid_residual(p, q, q.norm_sq());
  };
  int it = 0;
  Eigen::MatrixXd J(2 * K, 2 * K);
  // converged on the pointwise residual of p' = q' + q^2 - ||q||^2
  for (double pr = pointwise(); pr > opt.tol; pr = pointwise()) {
    if (it >= opt.max_iter) throw ConvergenceError("Riccati Newton iteration did not converge", pr);
    ++it;
    const PeriodicPotential q = from_vec(x, K);
    for (int j = 0; j < 2 * K; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * K);
      e[j] = 1.0;
      const PeriodicPotential phi = from_vec(e, K);
      J.col(j) = e + to_vec((q * phi).scaled(2.0).antiderivative(), K);
    }
    const Eigen::VectorXd dx = J.partialPivLu().solve(-g);
    // damped step: halve until the residual decreases
    double t = 1.0;
    for (;;) {
      const Eigen::VectorXd xn = x + t * dx;
      const Eigen::VectorXd gn = G(xn);
      const double rn = gn.lpNorm<Eigen::Infinity>();
      if (rn < res || t < 1e-4) {
        x = xn;
        g = gn;
        res = rn;
        break;
      }
      t *= 0.5;
    }
  }
  sol.q = from_vec(x, K);
  sol.norm_q_sq = sol.q.norm_sq();
  sol.iterations = it;
  sol.residual = grid_residual(p, sol.q, sol.norm_q_sq);
  sol.c = sol.norm_q_sq;
  return sol;
}

void calibrate_c(RiccatiSolution& sol, const ode::Options& opt) {
  const auto op0 = PeriodOperator::with_drift(sol.q, PeriodicPotential::constant(-sol.norm_q_sq));
  // E_0 moves rigidly with c
  sol.c = -find_ground_energy(op0, opt);
}

MonodromySolution monodromy_transformed(const RiccatiSolution& sol, cplx z, int n_store) {
  return integrate(sol.transformed_operator(), z, n_store);
}

PeriodicPotential distribution_primitive_from_json(const nlohmann::json& j) {
  if (j.value("type", std::string()) != "distribution")
    throw DomainError("expected a potential of type \"distribution\"");
  auto c = j.value("p_cos", std::vector<double>{});
  auto s = j.value("p_sin", std::vector<double>{});
  if (!c.empty()) c[0] = 0.0;
  return PeriodicPotential(std::move(c), std::move(s), j.value("grid_size", kDefaultGridSize),
                           j.value("max_jet", kDefaultMaxJet));
}

bool K0BoundsReport::all_ok() const {
  if (!ok_summability) return false;
  return std::all_of(rows.begin(), rows.end(),
                     [](const K0BoundsRow& r) { return r.ok_rim_window && r.ok_eps_boundary && r.ok_V_boundary && r.ok_max_principle && r.ok_V_interior; });
}

K0BoundsReport verify_k0_bounds(const DirectK& k, const QuasimomentumMap& qmap, const K0BoundsOptions& opt) {
  const BandStructure& b = k.bands();
  const auto& mom = qmap.moments();
  K0BoundsReport rep;
  rep.s = b.s_min;
  rep.Q0 = mom.Q[0] + mom.Q_tail[0];
  const int N = b.n_gaps;
  const double s = b.s_min;
  const double eps = opt.eps;
  const auto k0 = [&](cplx z) { return -k.shift(z); };
  const auto k0_rim = [&](int n, double t, int side) { return cplx(t) - k.on_gap_rim(n, t, side); };
  // S_n with the uncomputed gaps j > N bounded through their total mass
  const auto S = [&](int n, double r) {
    const double tail = mom.M_tail / (s * (N + 1 - n)) + mom.M_tail / (s * (N + 1 + n));
    return S_n_sum(b, n, r) + tail;
  };
  const double slack = 1e-9;
  const auto le = [&](double a, double bound) { return a <= bound * (1.0 + slack) + 1e-12; };

  rep.trivial = std::all_of(b.M.begin(), b.M.end(), [](double m) { return m == 0.0; });

  const int n_last = std::min(opt.n_max, N - 1);
  const int P = opt.boundary_points;
  for (int n = 1; n <= n_last; ++n) {
    K0BoundsRow row{};
    row.n = n;
    const double em = b.e_minus[n - 1], ep = b.e_plus[n - 1];
    row.gap = ep - em;
    row.S_eps = S(n, eps);
    row.S_one = S(n, 1.0);
    row.S_eps_plus_S_s = row.S_eps + S(n, s);
    const bool open = !b.is_degenerate(n) && row.gap > 0.0;

    // rims of the gap
    double rim = 0.0;
    if (open) {
      for (int i = 0; i < P; ++i) {
        const double t = em + row.gap * (i + 0.5) / P;
        for (int side : {1, -1}) rim = std::max(rim, std::abs(k0_rim(n, t, side)));
      }
      rim = std::max({rim, std::abs(k0(cplx(em))), std::abs(k0(cplx(ep)))});
      row.Y0 = Y_n_max(b, n);
      row.rim_constant = row.Y0 > 0.0 ? (rim / row.gap - 1.0) / row.Y0 : 0.0;
    }
    row.rim_max = rim;
    row.ok_rim_window = !open || std::abs(rim - row.gap) <= row.gap * row.Y0;

    // stadium dist(z, g_n) = rho around the gap
    const auto stadium = [&](double rho, auto&& visit) {
      for (int i = 0; i < P; ++i) {
        const double t = em + row.gap * (i + 0.5) / P;
        if (open) {
          visit(cplx(t, rho));
          visit(cplx(t, -rho));
        }
        const double a = -0.5 * pi + pi * (i + 0.5) / P;
        visit(cplx(ep + rho * std::cos(a), rho * std::sin(a)));
        visit(cplx(em - rho * std::cos(a), rho * std::sin(a)));
      }
    };
    double eb = 0.0;
    stadium(eps, [&](cplx z) { eb = std::max(eb, std::abs(k0(z))); });
    row.eps_boundary_max = eb;
    row.ok_eps_boundary = le(eb, row.S_eps);

    // maximum principle on U_n: interior values against the boundary (stadium plus both rims)
    row.U_boundary_max = std::max(eb, rim);
    double ui = 0.0;
    for (double frac : {0.25, 0.5, 0.75}) stadium(frac * eps, [&](cplx z) { ui = std::max(ui, std::abs(k0(z))); });
    row.U_interior_max = ui;
    row.ok_max_principle = le(ui, row.U_boundary_max);

    // rectangle V_n: |Im z| <= r between the band midpoints
    const double left = 0.5 * (em + (n == 1 ? b.z0 : b.e_plus[n - 2]));
    const double right = 0.5 * (ep + b.e_minus[n]);
    double vb = 0.0;
    for (int i = 0; i <= P; ++i) {
      const double x = left + (right - left) * i / P;
      const double y = -opt.r + 2.0 * opt.r * i / P;
      for (cplx z : {cplx(x, opt.r), cplx(x, -opt.r), cplx(left, y), cplx(right, y)}) {
        if (std::abs(z.imag()) < 1e-14) z = cplx(z.real(), 0.0);
        vb = std::max(vb, std::abs(k0(z)));
      }
    }
    row.V_boundary_max = vb;
    row.ok_V_boundary = le(vb, row.S_one);

    const int Q = std::max(4, opt.interior_points / 6);
    double vi = std::max(vb, eb);
    for (int i = 1; i < Q; ++i) {
      for (int jj = 1; jj < Q; ++jj) {
        const cplx z(left + (right - left) * i / Q, -opt.r + 2.0 * opt.r * jj / Q);
        if (qmap.dist_to_gaps(z) < eps) continue;
        vi = std::max(vi, std::abs(k0(z)));
      }
    }
    row.V_interior_max = vi;
    row.ok_V_interior = le(vi, row.S_eps_plus_S_s);
    rep.rows.push_back(row);
  }

  for (int n = 1; n <= N; ++n) {
    rep.sum_S_sq_eps += std::pow(S(n, eps), 2);
    rep.sum_S_sq_one += std::pow(S(n, 1.0), 2);
  }
  rep.bound_sum_eps = 4.0 * rep.Q0 * rep.Q0 * (1.0 / (eps * eps) + 1.0 / (s * s));
  rep.bound_sum_one = 4.0 * rep.Q0 * rep.Q0 * (1.0 + 1.0 / (s * s));
  rep.ok_summability = le(rep.sum_S_sq_eps, rep.bound_sum_eps) && le(rep.sum_S_sq_one, rep.bound_sum_one);
  return rep;
}

}  // namespace hillband
