#include "hillband/quasimomentum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "hillband/errors.hpp"

namespace hillband {

namespace {

using std::numbers::pi;
constexpr cplx I(0.0, 1.0);

double sign_pow(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

DirectK::DirectK(const BandStructure& bands, ode::Options opt) : bands_(bands), opt_(opt) {}

cplx DirectK::shift(cplx z) const {
  if (z.imag() > 0.0) return shift_upper(z);
  if (z.imag() < 0.0) return std::conj(shift_upper(std::conj(z)));
  if (z.real() < 0.0) return -shift_real(-z.real());
  return shift_real(z.real());
}

cplx DirectK::shift_real(double z) const {
  const auto& b = bands_;
  if (z < b.z0) throw DomainError("z lies in the gap below the spectrum; use the rim values");
  for (int n = 1; n <= b.n_gaps; ++n) {
    const double em = b.e_minus[n - 1], ep = b.e_plus[n - 1];
    if (z <= em || (b.is_degenerate(n) && z <= ep)) {
      const double d = discriminant_on_momentum(b.op, z, opt_).delta;
      const double c = std::clamp(sign_pow(n - 1) * d, -1.0, 1.0);
      return cplx((n - 1) * pi + std::acos(c) - z, 0.0);
    }
    if (z < ep) throw DomainError("z = " + std::to_string(z) + " lies inside gap " + std::to_string(n));
    if (z == ep) return cplx(n * pi - z, 0.0);
  }
  throw DomainError("z = " + std::to_string(z) + " lies beyond the computed band structure");
}

cplx DirectK::shift_upper(cplx z) const {
  const PeriodOperator& op = bands_.op;
  const auto sol = integrate(op, z, 2, opt_);
  const cplx delta = sol.delta;
  const cplx th = sol.theta1(), thp = sol.theta1_prime(), ph = sol.phi1(), php = sol.phi1_prime();
  const cplx r = std::sqrt(delta * delta - 1.0);
  cplx mu = delta + r;
  if (std::abs(delta - r) > std::abs(mu)) mu = delta - r;

  // initial log-derivative of the Bloch solution theta + M phi with multiplier mu
  const cplx d1 = ph, d2 = mu - php;
  const double c1 = std::abs(d1) * std::max(1.0, std::abs(z)) / (std::abs(mu) + std::abs(th));
  const double c2 = std::abs(d2) / (std::abs(mu) + std::abs(php));
  const cplx M = (c1 >= c2) ? (mu - th) / d1 : thp / d2;

  const bool drift = op.drift().has_value();
  auto rhs = [&](double x, const std::array<cplx, 2>& y, std::array<cplx, 2>& dy) {
    const double b = op.b().eval(x);
    cplx du = b + 2.0 * I * z * y[0] - y[0] * y[0];
    if (drift) du -= 2.0 * op.drift()->eval(x) * (y[0] - I * z);
    dy[0] = du;
    dy[1] = y[0];
  };
  std::array<cplx, 2> y{M + I * z, cplx(0.0)};
  const std::array<double, 3> stops{0.0, 1.0, 2.0};
  std::array<cplx, 3> acc{};
  int idx = 0;
  ode::Options o = opt_;
  o.rtol = std::min(o.rtol, 1e-13);
  o.atol = 1e-18;
  o.h_max = std::min(o.h_max, 0.5 / std::max(1.0, std::sqrt(std::abs(z * z) + op.b_bound())));
  ode::integrate(rhs, y, stops, o, [&](double, const std::array<cplx, 2>& s) { acc[idx++] = s[1]; });
  const cplx shift = I * (acc[2] - acc[1]);

  // the continuous branch must still be a root of cos k = Delta
  const cplx k = z + shift;
  const double residual = std::abs(std::cos(k) - delta) / std::max(1.0, std::abs(delta));
  if (!(residual < 1e-6))
    throw ConsistencyError("quasimomentum branch inconsistent with Delta at z = (" + std::to_string(z.real()) + ", " +
                           std::to_string(z.imag()) + "), residual " + std::to_string(residual));
  return shift;
}

cplx DirectK::on_gap_rim(int n, double t, int side) const {
  const double v = v_on_gap(bands_, n, t);
  return cplx(n * pi, side >= 0 ? v : -v);
}

cplx k_direct(const BandStructure& bands, cplx z) { return DirectK(bands)(z); }

cplx k_on_gap_rim(const BandStructure& bands, int n, double t, int side) {
  return DirectK(bands).on_gap_rim(n, t, side);
}

QuasimomentumMap::QuasimomentumMap(const BandStructure& bands, int m_max)
    : bands_(bands), moments_(gap_mass_and_moments(bands, m_max)) {}

double QuasimomentumMap::dist_to_gaps(cplx z) const {
  double d = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= bands_.n_gaps; ++n) {
    for (double s : {1.0, -1.0}) {
      const double a = std::min(s * bands_.e_minus[n - 1], s * bands_.e_plus[n - 1]);
      const double b = std::max(s * bands_.e_minus[n - 1], s * bands_.e_plus[n - 1]);
      const double x = std::clamp(z.real(), a, b);
      d = std::min(d, std::abs(z - cplx(x, 0.0)));
    }
  }
  return d;
}

std::pair<cplx, double> QuasimomentumMap::cauchy(int L, cplx z) const {
  const cplx z2 = z * z;
  cplx sum = 0.0;
  for (int n = 1; n <= bands_.n_gaps; ++n) {
    const auto& q = bands_.quad[n - 1];
    if (q.empty()) continue;
    double re = q.integrate([&](double t) { return (std::pow(t, L) * (2.0 * z / (t * t - z2))).real(); });
    double im = q.integrate([&](double t) { return (std::pow(t, L) * (2.0 * z / (t * t - z2))).imag(); });
    sum += cplx(re, im);
  }
  sum /= pi;
  const double EN = bands_.E_plus.back();
  const double d = (z2.real() <= EN) ? std::abs(z2 - EN) : std::abs(z2.imag());
  const auto idx = static_cast<std::size_t>(L);
  const double qt = idx < moments_.Q_tail.size() ? moments_.Q_tail[idx] : std::numeric_limits<double>::infinity();
  return {sum, std::abs(z) * qt / d};
}

KIntegral QuasimomentumMap::k_integral(cplx z) const {
  const auto [c, tail] = cauchy(0, z);
  return {z + c, tail, dist_to_gaps(z) < 1e-6};
}

KIntegral QuasimomentumMap::f_integral(int m, cplx z) const {
  if (z == 0.0) throw DomainError("f_m is not defined at z = 0");
  const int L = 2 * m + 2;
  const auto [c, tail] = cauchy(L, z);
  const double scale = std::pow(std::abs(z), -L);
  return {c * std::pow(z, -L), tail * scale, dist_to_gaps(z) < 1e-6};
}

Remainder remainder_f(const DirectK& k, const QuasimomentumMap& qmap, const AsymptoticModel& model, int m, cplx z) {
  if (z == 0.0) throw DomainError("f_m is not defined at z = 0");
  Remainder r;
  r.f_def = k.shift(z) + model.K(z, m);
  const auto fi = qmap.f_integral(m, z);
  r.f_int = fi.k;
  r.tail = fi.tail_bound;
  return r;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  SlopeFit f;
  const double dn = static_cast<double>(n);
  const double vx = sxx - sx * sx / dn, vy = syy - sy * sy / dn, cxy = sxy - sx * sy / dn;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / dn;
  f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

SectorReport verify_sector(const DirectK& k, const AsymptoticModel& model, int m, const SectorOptions& opt) {
  const BandStructure& bands = k.bands();
  SectorReport rep;
  rep.m = m;
  rep.expected_slope = -(2.0 * m + 3.0);
  rep.P_m = model.P_at(m);
  if (bands.op.b().is_zero() && !bands.op.drift()) {
    rep.trivial = true;
    rep.sharpness_notice = "free operator: f vanishes identically";
    return rep;
  }

  // (a) sector: z = iy
  for (int i = 0; i < opt.y_points; ++i) {
    const double y = opt.y_min * std::pow(opt.y_max / opt.y_min, static_cast<double>(i) / (opt.y_points - 1));
    const cplx z(0.0, y);
    const cplx f = k.shift(z) + model.K(z, m);
    rep.y.push_back(y);
    rep.abs_f.push_back(std::abs(f));
    rep.prefactor.push_back((f * std::pow(z, 2 * m + 3)).real());
  }
  rep.sector = fit_loglog(rep.y, rep.abs_f);
  rep.prefactor_estimate = rep.prefactor.back();

  // (b) strip sample of Z_eps
  const double x_hi = bands.e_plus.back() - 1.0;
  for (int i = 0; i < opt.strip_points; ++i) {
    const double x = 5.0 + (x_hi - 5.0) * (i + 0.5) / opt.strip_points;
    const double frac = std::fmod(0.5 + i * 0.6180339887498949, 1.0);
    const double y = opt.strip_r * (2.0 * frac - 1.0);
    cplx z(x, y);
    if (std::abs(y) < opt.eps) z = cplx(x, y < 0 ? -opt.eps : opt.eps);
    const cplx f = k.shift(z) + model.K(z, m);
    rep.strip_max_scaled = std::max(rep.strip_max_scaled, std::abs(std::pow(z, 2 * m + 2) * f));
  }

  // (c), (d) gap-edge sharpness and the bound near gaps
  std::vector<int> open;
  for (int n = bands.n_gaps; n >= 1 && static_cast<int>(open.size()) < opt.sharp_gaps; --n)
    if (!bands.is_degenerate(n)) open.push_back(n);
  std::reverse(open.begin(), open.end());
  if (open.size() < 3) {
    rep.sharpness_notice = "fewer than 3 open gaps: sharpness test skipped";
    return rep;
  }
  for (int n : open) {
    SharpnessRow row{};
    row.n = n;
    const double em = bands.e_minus[n - 1], ep = bands.e_plus[n - 1];
    row.gap = ep - em;
    row.energy_gap = bands.energy_gap_length(n);
    row.f_minus = n * pi - em + model.K(cplx(em), m).real();
    row.f_plus = n * pi - ep + model.K(cplx(ep), m).real();
    const double w = 2.0 * pi * n / row.energy_gap;
    row.ratio_minus = row.f_minus * w;
    row.ratio_plus = -row.f_plus * w;
    row.half_ratio_minus = row.f_minus * 2.0 / row.gap;
    row.half_ratio_plus = -row.f_plus * 2.0 / row.gap;
    // max |f| over the rim and over the eps-stadium around g_n
    double mx = 0.0;
    const int nr = 33;
    for (int i = 0; i < nr; ++i) {
      const double t = em + row.gap * (i + 0.5) / nr;
      mx = std::max(mx, std::abs(k.on_gap_rim(n, t, +1) - t + model.K(cplx(t), m)));
      const cplx z(t, opt.eps);
      mx = std::max(mx, std::abs(k.shift(z) + model.K(z, m)));
    }
    const int ns = 24;
    for (int i = 0; i < ns; ++i) {
      const double a = 2.0 * pi * (i + 0.5) / ns;
      const cplx c = std::polar(opt.eps, a);
      const cplx z = (c.real() >= 0 ? cplx(ep) : cplx(em)) + c;
      mx = std::max(mx, std::abs(k.shift(z) + model.K(z, m)));
    }
    row.max_abs_f_near = mx;
    row.b_n = mx - row.energy_gap / (2.0 * pi * n);
    rep.sharpness.push_back(row);
  }
  return rep;
}

}  // namespace hillband
