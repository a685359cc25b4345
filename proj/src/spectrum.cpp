#include "hillband/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "hillband/errors.hpp"

namespace hillband {

namespace {

using std::numbers::pi;

constexpr std::uintmax_t kRootIterations = 200;

double sign_pow(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// Refines a root of f in [a, b] given f(a), f(b) of opposite sign (or zero).
template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iters = kRootIterations;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

double BandStructure::band_length(int n) const {
  const double left = (n == 1) ? z0 : e_plus.at(n - 2);
  return e_minus.at(n - 1) - left;
}

double find_ground_energy(const PeriodOperator& op, const ode::Options& opt) {
  auto delta = [&](double lam) { return discriminant_on_energy(op, lam, opt).delta; };
  double lo = op.b().min_value() - 1.0;
  double step = 1.0;
  while (delta(lo) <= 1.0) {
    lo -= step;
    step *= 2.0;
    if (step > 1e8) throw BracketError("no energy below the spectrum found", 0);
  }
  const double dstep = 0.25;
  double a = lo, fa = delta(lo) - 1.0;
  for (int i = 0; i < 1'000'000; ++i) {
    const double b = a + dstep;
    const double fb = delta(b) - 1.0;
    if (fb <= 0.0) return refine_root([&](double l) { return delta(l) - 1.0; }, a, b, fa, fb);
    a = b;
    fa = fb;
  }
  throw BracketError("ground edge not bracketed", 0);
}

BandStructure find_band_edges(const PeriodicPotential& p, int N, const SpectrumOptions& opt) {
  return find_band_edges(PeriodOperator::hill(p), N, opt);
}

BandStructure find_band_edges(const PeriodOperator& op_in, int N, const SpectrumOptions& opt) {
  if (N < 1) throw DomainError("number of gaps must be at least 1");
  BandStructure bs;
  bs.normalized = opt.normalize;
  bs.E0 = find_ground_energy(op_in, opt.ode);
  bs.op = opt.normalize ? PeriodOperator::with_drift(op_in.drift() ? *op_in.drift() : PeriodicPotential(),
                                                     op_in.b().shifted(-bs.E0))
                        : op_in;
  const double ground = opt.normalize ? 0.0 : bs.E0;
  const PeriodOperator& op = bs.op;

  auto disc = [&](double z) { return discriminant_on_momentum(op, z, opt.ode); };

  // scan for the extrema e_1, ..., e_{N+1} of Delta (sign changes of Delta')
  double z = ground > 0.0 ? std::sqrt(ground) : 0.0;
  bs.z0 = z;
  z += 1e-3;
  {
    const auto d = disc(z);
    if (std::abs(d.delta) > 1.0 + 1e-8 || d.delta_z >= 0.0)
      throw DomainError("momentum axis does not start inside the first band (ground energy " +
                        std::to_string(bs.E0) + ")");
  }
  const double step = std::min(opt.scan_step, pi / 8.0);
  const double z_max = pi * (N + 4) + std::sqrt(op.b_bound()) + 10.0;
  std::vector<double> extrema;
  double za = z, da = disc(z).delta_z;
  while (static_cast<int>(extrema.size()) < N + 1) {
    const double zb = za + step;
    if (zb > z_max)
      throw BracketError("scan reached z = " + std::to_string(zb) + " after " + std::to_string(extrema.size()) +
                             " gaps",
                         static_cast<int>(extrema.size()));
    const double db = disc(zb).delta_z;
    if ((da < 0.0) != (db < 0.0) || db == 0.0) {
      extrema.push_back(refine_root([&](double x) { return disc(x).delta_z; }, za, zb, da, db));
    }
    za = zb;
    da = db;
  }

  bs.n_gaps = N;
  for (int n = 1; n <= N; ++n) {
    const double en = extrema[n - 1];
    const double sn = sign_pow(n);
    auto f = [&](double x) { return sn * disc(x).delta - 1.0; };
    const double excess = f(en);
    const double left = (n == 1) ? bs.z0 + 1e-3 : extrema[n - 2];
    const double right = extrema[n];
    double em = en, ep = en, h = 0.0;
    bool degenerate = excess <= opt.degenerate_excess;
    if (!degenerate) {
      em = refine_root(f, left, en, f(left), excess);
      ep = refine_root(f, en, right, excess, f(right));
      if (ep - em < opt.degenerate_width) degenerate = true;
      h = std::acosh(1.0 + excess);
    }
    if (degenerate) {
      em = ep = en;
      h = 0.0;
    }
    bs.e_minus.push_back(em);
    bs.e_plus.push_back(ep);
    bs.e_max.push_back(en);
    bs.h.push_back(h);
    bs.degenerate.push_back(degenerate);
    bs.E_minus.push_back(em * em);
    bs.E_plus.push_back(ep * ep);
  }

  // interlacing
  double prev = bs.z0;
  for (int n = 1; n <= N; ++n) {
    const double em = bs.e_minus[n - 1], ep = bs.e_plus[n - 1], en = bs.e_max[n - 1];
    if (!(prev < em && em <= en && en <= ep))
      throw ConsistencyError("band edges violate interlacing at gap " + std::to_string(n));
    prev = ep;
  }

  // per-gap quadrature tables of v
  bs.quad.resize(N);
  for (int n = 1; n <= N; ++n) {
    GapQuadrature& q = bs.quad[n - 1];
    const double em = bs.e_minus[n - 1], ep = bs.e_plus[n - 1];
    q.center = 0.5 * (em + ep);
    q.half_width = 0.5 * (ep - em);
    if (bs.degenerate[n - 1]) continue;
    const int nq = opt.quad_nodes;
    const double sn = sign_pow(n);
    for (int i = 0; i < nq; ++i) {
      const double th = (i + 0.5) * pi / nq;
      const double t = q.center + q.half_width * std::cos(th);
      const double v = std::acosh(std::max(1.0, sn * disc(t).delta));
      q.theta.push_back(th);
      q.t.push_back(t);
      q.v.push_back(v);
      q.g.push_back(v / (q.half_width * std::sin(th)));
    }
  }
  for (int n = 1; n <= N; ++n) bs.M.push_back(bs.quad[n - 1].integrate([](double) { return 1.0; }) / pi);

  bs.s_min = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= N; ++n) bs.s_min = std::min(bs.s_min, bs.band_length(n));
  return bs;
}

std::pair<double, double> gap_height(const BandStructure& bands, int n) {
  if (n < 1 || n > bands.n_gaps) throw DomainError("gap index out of range");
  if (bands.is_degenerate(n)) return {0.5 * (bands.e_minus[n - 1] + bands.e_plus[n - 1]), 0.0};
  return {bands.e_max[n - 1], bands.h[n - 1]};
}

double v_on_gap(const BandStructure& bands, int n, double t) {
  if (n < 1 || n > bands.n_gaps) throw DomainError("gap index out of range");
  const double em = bands.e_minus[n - 1], ep = bands.e_plus[n - 1];
  const double slack = 1e-12 * std::max(1.0, ep);
  if (t < em - slack || t > ep + slack) throw DomainError("t = " + std::to_string(t) + " lies outside gap " + std::to_string(n));
  if (bands.is_degenerate(n)) return 0.0;
  const double d = discriminant_on_momentum(bands.op, t).delta;
  return std::acosh(std::max(1.0, sign_pow(n) * d));
}

double gap_moment(const BandStructure& bands, int n, int m) {
  return bands.quad.at(n - 1).integrate([m](double t) { return std::pow(t, m); }) / pi;
}

GapMoments gap_mass_and_moments(const BandStructure& bands, int m_max) {
  GapMoments out;
  const int N = bands.n_gaps;
  out.M = bands.M;
  // moments up to m_max + 2 so that the Chebyshev-style tail bound for Q_m can use Q_{m+2}
  const int m_ext = m_max + 2;
  std::vector<std::vector<double>> per_gap(m_ext + 1, std::vector<double>(N, 0.0));
  for (int m = 0; m <= m_ext; m += 2)
    for (int n = 1; n <= N; ++n) per_gap[m][n - 1] = gap_moment(bands, n, m);

  // geometric extrapolation of a positive sequence from its last entries
  auto extrapolate = [&](const std::vector<double>& a) {
    int last = N - 1;
    while (last >= 0 && a[last] <= 0.0) --last;
    if (last < 2) return 0.0;
    double ratio = 0.0;
    for (int i = std::max(1, last - 2); i <= last; ++i)
      if (a[i - 1] > 0.0) ratio = std::max(ratio, a[i] / a[i - 1]);
    // the sum runs to N even when trailing gaps are closed; model the closed ones as continuing the decay
    const double from = a[last] * std::pow(ratio, N - 1 - last);
    if (ratio < 0.95) return from * ratio / (1.0 - ratio);
    // slow decay: power-law model a_n ~ C n^-alpha
    const double alpha = std::log(a[last - 1] / a[last]) / std::log(static_cast<double>(last + 1) / last);
    if (alpha <= 1.05) return std::numeric_limits<double>::infinity();
    return a[last] * (last + 1) / (alpha - 1.0) * std::pow(static_cast<double>(last + 1) / N, alpha - 1.0);
  };

  std::vector<double> Q(m_ext + 1, 0.0), tail(m_ext + 1, 0.0);
  for (int m = 0; m <= m_ext; m += 2) {
    for (int n = 0; n < N; ++n) Q[m] += 2.0 * per_gap[m][n];
    tail[m] = 2.0 * extrapolate(per_gap[m]);
  }
  const double eN = std::max(bands.e_plus.back(), pi * N);
  out.Q.assign(Q.begin(), Q.begin() + m_max + 1);
  out.Q_tail.assign(m_max + 1, 0.0);
  // the tail of t^m v is also bounded by the tail of t^{m+2} v over e_N^2
  for (int m = 0; m <= m_max; m += 2) out.Q_tail[m] = std::max(tail[m], tail[m + 2] / (eN * eN));
  out.M_tail = 0.5 * out.Q_tail[0];
  return out;
}

double Y_n_integral(const BandStructure& bands, int n, double t) {
  const double em = bands.e_minus.at(n - 1), ep = bands.e_plus.at(n - 1);
  double sum = 0.0;
  for (int j = 1; j <= bands.n_gaps; ++j) {
    const auto& q = bands.quad[j - 1];
    if (q.empty()) continue;
    for (int sgn : {1, -1}) {
      if (sgn == 1 && j == n) continue;
      sum += q.integrate([&](double s0) {
        const double s = sgn * s0;
        return 1.0 / (std::sqrt(std::abs((s - ep) * (s - em))) * std::abs(s - t));
      });
    }
  }
  return sum / pi;
}

YValue Y_n_function(const BandStructure& bands, int n, double t) {
  if (bands.is_degenerate(n)) throw DomainError("Y_n is undefined on a closed gap");
  const double em = bands.e_minus[n - 1], ep = bands.e_plus[n - 1];
  YValue y{std::numeric_limits<double>::quiet_NaN(), Y_n_integral(bands, n, t)};
  const double vn = std::sqrt(std::max(0.0, (t - em) * (ep - t)));
  if (vn > 0.0) y.direct = v_on_gap(bands, n, t) / vn - 1.0;
  return y;
}

double Y_n_max(const BandStructure& bands, int n, int points) {
  if (bands.is_degenerate(n)) return 0.0;
  const double em = bands.e_minus[n - 1], ep = bands.e_plus[n - 1];
  double best = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = em + (ep - em) * (i + 0.5) / points;
    best = std::max(best, Y_n_integral(bands, n, t));
  }
  return best;
}

double S_n_sum(std::span<const double> M, double s, int n, double r) {
  if (r <= 0.0) throw DomainError("S_n needs r > 0");
  double sum = 0.0;
  const int N = static_cast<int>(M.size());
  for (int j = 1; j <= N; ++j) {
    if (M[j - 1] == 0.0) continue;
    for (int jj : {j, -j}) {
      const int d = std::abs(n - jj);
      const double w = d == 0 ? 0.5 * r : s * d;
      sum += M[j - 1] / w;
    }
  }
  return sum;
}

double S_n_sum(const BandStructure& bands, int n, double r) { return S_n_sum(bands.M, bands.s_min, n, r); }

}  // namespace hillband
