#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "hillband/bloch.hpp"
#include "hillband/distrib.hpp"
#include "hillband/errors.hpp"
#include "hillband/report.hpp"

namespace fs = std::filesystem;
using namespace hillband;
using nlohmann::json;
using nlohmann::ordered_json;
using std::numbers::pi;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Samples {
  double y_min = 20.0, y_max = 200.0;
  int y_points = 16;
  std::vector<double> sector_slopes{0.0, 0.5};  // rays z = y (a + i), inside y > A|x| for A > 2
  int strip_points = 60;
  int random = 200;
  int bloch = 100;
  double im_max = 3.0;
  unsigned seed = 1;
  double r_min = 10.0, r_max = 200.0;
  int r_points = 10;
};

struct Tolerances {
  double route = 1e-6;
  double bloch = 1e-8;
  double slope = 0.3;
  double prefactor = 0.1;
  double moment = 0.01;
  double riccati = 1e-9;
  double consistency = 1e-7;
  double p_minus_one = 0.05;
};

struct RunConfig {
  json raw;
  json potential;
  int m = 1;
  int n_gaps = 20;
  bool normalize = true;
  double eps = 0.1;
  double strip_r = 1.0;
  int kappa_order = 4;
  Samples z;
  Tolerances tol;
  K0BoundsOptions k0;
  std::set<std::string> disabled;
  fs::path out = "out";
};

bool is_distribution(const RunConfig& c) { return c.potential.value("type", std::string()) == "distribution"; }

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  RunConfig c;
  try {
    c.raw = json::parse(f);
    const json& j = c.raw;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("potential")) throw ConfigError("config lacks \"potential\"");
    c.potential = j.at("potential");
    read(j, "m", c.m);
    read(j, "n_gaps", c.n_gaps);
    read(j, "normalize", c.normalize);
    read(j, "eps", c.eps);
    read(j, "strip_r", c.strip_r);
    read(j, "kappa_order", c.kappa_order);
    if (j.contains("output_dir")) c.out = j.at("output_dir").get<std::string>();
    if (j.contains("z_samples")) {
      const json& s = j.at("z_samples");
      read(s, "y_min", c.z.y_min);
      read(s, "y_max", c.z.y_max);
      read(s, "y_points", c.z.y_points);
      read(s, "sector_slopes", c.z.sector_slopes);
      read(s, "strip_points", c.z.strip_points);
      read(s, "random", c.z.random);
      read(s, "bloch", c.z.bloch);
      read(s, "im_max", c.z.im_max);
      read(s, "seed", c.z.seed);
      read(s, "r_min", c.z.r_min);
      read(s, "r_max", c.z.r_max);
      read(s, "r_points", c.z.r_points);
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      read(t, "route", c.tol.route);
      read(t, "bloch", c.tol.bloch);
      read(t, "slope", c.tol.slope);
      read(t, "prefactor", c.tol.prefactor);
      read(t, "moment", c.tol.moment);
      read(t, "riccati", c.tol.riccati);
      read(t, "consistency", c.tol.consistency);
      read(t, "p_minus_one", c.tol.p_minus_one);
    }
    if (j.contains("k0_bounds")) {
      const json& t = j.at("k0_bounds");
      read(t, "r", c.k0.r);
      read(t, "n_max", c.k0.n_max);
      read(t, "boundary_points", c.k0.boundary_points);
      read(t, "interior_points", c.k0.interior_points);
    }
    c.k0.eps = c.eps;
    if (j.contains("disabled_assertions"))
      for (const auto& s : j.at("disabled_assertions")) c.disabled.insert(s.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.m < 0) throw ConfigError("m must be >= 0");
  if (c.n_gaps < 1) throw ConfigError("n_gaps must be >= 1");
  if (!(c.eps > 0.0)) throw ConfigError("eps must be > 0");
  if (!(c.strip_r > 0.0)) throw ConfigError("strip_r must be > 0");
  if (c.z.y_points < 2 || c.z.r_points < 2 || !(c.z.y_min > 0.0) || !(c.z.y_max > c.z.y_min))
    throw ConfigError("z_samples: need y_points, r_points >= 2 and 0 < y_min < y_max");
  if (c.kappa_order < 1) throw ConfigError("kappa_order must be >= 1");
  if (c.k0.r < pi) throw ConfigError("k0_bounds.r must be >= pi");
  try {
    if (is_distribution(c))
      distribution_primitive_from_json(c.potential);
    else
      potential_from_json(c.potential);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  return c;
}

// collects assertion outcomes; disabled ones are recorded as skipped
class Checks {
 public:
  explicit Checks(const std::set<std::string>& disabled) : disabled_(disabled) {}

  void add(const std::string& name, bool ok, double value, double bound, const std::string& detail = "") {
    ordered_json e;
    e["name"] = name;
    e["value"] = value;
    e["bound"] = bound;
    const bool skipped = disabled_.count(name) > 0;
    e["status"] = skipped ? "skipped" : ok ? "pass" : "fail";
    if (!detail.empty()) e["detail"] = detail;
    if (!skipped && !ok) failed_.push_back(e);
    all_.push_back(e);
  }
  const ordered_json& all() const { return all_; }
  const ordered_json& failed() const { return failed_; }
  bool ok() const { return failed_.empty(); }

 private:
  const std::set<std::string>& disabled_;
  ordered_json all_ = ordered_json::array();
  ordered_json failed_ = ordered_json::array();
};

struct Setup {
  std::optional<PeriodicPotential> p;  // smooth potential
  std::optional<RiccatiSolution> riccati;
  BandStructure bands;
};

Setup build(const RunConfig& c) {
  Setup s;
  SpectrumOptions so;
  so.normalize = c.normalize;
  if (is_distribution(c)) {
    auto sol = riccati_solve(distribution_primitive_from_json(c.potential));
    calibrate_c(sol);
    s.bands = find_band_edges(sol.transformed_operator(), c.n_gaps, so);
    s.riccati = std::move(sol);
  } else {
    s.p = potential_from_json(c.potential);
    s.bands = find_band_edges(*s.p, c.n_gaps, so);
  }
  return s;
}

ordered_json header(const RunConfig& c, const std::string& cmd) {
  ordered_json j;
  j["subcommand"] = cmd;
  j["config_hash"] = config_hash(c.raw);
  return j;
}

ordered_json bands_json(const BandStructure& b, const QuasimomentumMap& qm) {
  ordered_json j;
  j["normalized"] = b.normalized;
  j["E0"] = b.E0;
  j["z0"] = b.z0;
  j["n_gaps"] = b.n_gaps;
  j["s_min"] = b.s_min;
  j["Q"] = qm.moments().Q;
  j["Q_tail"] = qm.moments().Q_tail;
  j["M_tail"] = qm.moments().M_tail;
  return j;
}

// sample points of Z_eps: off the gaps by eps, inside the computed range
std::vector<cplx> z_eps_samples(const RunConfig& c, const QuasimomentumMap& qm, int count, unsigned seed_offset) {
  const BandStructure& b = qm.bands();
  std::mt19937_64 rng(c.z.seed + seed_offset);
  const double x_hi = b.e_plus.back() - 1.0;
  std::uniform_real_distribution<double> ux(-x_hi, x_hi), uy(-c.z.im_max, c.z.im_max);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < count) {
    const cplx z(ux(rng), uy(rng));
    if (std::abs(z) < 0.5 || qm.dist_to_gaps(z) < c.eps) continue;
    if (std::abs(z.imag()) < 1e-3) continue;  // keep off the real axis below z0 for unnormalized operators
    out.push_back(z);
  }
  return out;
}

void comb_checks(const BandStructure& b, const QuasimomentumMap& qm, bool smooth, Checks& chk, CsvWriter& csv) {
  const auto& mom = qm.moments();
  const double Q0 = mom.Q[0], s = b.s_min;
  double worst_26 = -1e300, hmax = 0.0, worst_213 = -1e300, worst_214 = -1e300;
  for (int n = 1; n <= b.n_gaps; ++n) {
    const double g = b.gap_length(n), h = b.h[n - 1];
    hmax = std::max(hmax, h);
    worst_26 = std::max(worst_26, g - 2.0 * h);
    double Y0 = 0.0, b213 = 0.0;
    if (!b.is_degenerate(n)) {
      Y0 = Y_n_max(b, n);
      for (int j = -b.n_gaps; j <= b.n_gaps; ++j) {
        if (j == n || j == 0) continue;
        const double d = s * std::abs(n - j);
        b213 += b.M[std::abs(j) - 1] / (d * d);
      }
      if (smooth) {
        worst_213 = std::max(worst_213, Y0 - std::min(b213, Q0 / (s * s)) * (1.0 + 1e-9));
        if (mom.Q.size() > 2)
          worst_214 = std::max(worst_214, Y0 - 4.0 * mom.Q[2] / (n * n * std::pow(s, 4)) * (1.0 + 1e-9));
      }
    }
    csv.row(std::vector<double>{double(n), b.E_minus[n - 1], b.E_plus[n - 1], b.e_minus[n - 1], b.e_plus[n - 1], g, h,
                                b.M[n - 1], Y0, b.is_degenerate(n) ? 1.0 : 0.0});
  }
  chk.add("comb_gap_le_2h", worst_26 <= 1e-12, worst_26, 0.0, "max_n |g_n| - 2 h_n");
  chk.add("comb_h_sq_le_2Q0", hmax * hmax <= 2.0 * Q0 * (1 + 1e-9), hmax * hmax, 2.0 * Q0);
  if (smooth) {
    chk.add("comb_Y0_lemma_m0", worst_213 <= 0.0, worst_213, 0.0, "max_n Y_n^0 - min(sum M_j/(s|n-j|)^2, Q0/s^2)");
    chk.add("comb_Y0_lemma_m1", worst_214 <= 0.0, worst_214, 0.0, "max_n Y_n^0 - 4 Q_2 / (n^2 s^4)");
  }
}

void plot_comb(const BandStructure& b, const fs::path& path) {
  SvgPlot svg("comb", "Re k", "Im k");
  const double top = b.e_plus.back() + 1.0;
  svg.line({-top, top}, {0.0, 0.0}, "#000000");
  for (int n = 1; n <= b.n_gaps; ++n) {
    svg.segment(pi * n, 0.0, pi * n, b.h[n - 1]);
    svg.segment(-pi * n, 0.0, -pi * n, b.h[n - 1]);
  }
  svg.write(path);
}

void plot_v(const BandStructure& b, const fs::path& path) {
  SvgPlot svg("v on the gaps", "t", "v(t + i0)");
  for (const auto& q : b.quad) {
    if (q.empty()) continue;
    std::vector<double> t{q.center - q.half_width}, v{0.0};
    for (int i = static_cast<int>(q.t.size()) - 1; i >= 0; --i) {
      t.push_back(q.t[i]);
      v.push_back(q.v[i]);
    }
    t.push_back(q.center + q.half_width);
    v.push_back(0.0);
    svg.line(t, v);
  }
  svg.write(path);
}

int finish(const RunConfig& c, ordered_json report, const Checks& chk, const std::string& file) {
  report["assertions"] = chk.all();
  write_json(c.out / file, report);
  if (!chk.ok()) {
    ordered_json man;
    man["config_hash"] = config_hash(c.raw);
    man["report"] = file;
    man["failures"] = chk.failed();
    write_json(c.out / "failures.json", man);
    for (const auto& f : chk.failed()) std::cerr << "FAIL " << f["name"].get<std::string>() << "\n";
    return 1;
  }
  return 0;
}

int cmd_bands(const RunConfig& c) {
  const auto s = build(c);
  QuasimomentumMap qm(s.bands);
  Checks chk(c.disabled);
  CsvWriter csv({"n", "E_minus", "E_plus", "e_minus", "e_plus", "gap", "h", "M", "Y0", "degenerate"});
  comb_checks(s.bands, qm, s.p.has_value(), chk, csv);
  csv.write(c.out / "bands.csv");
  plot_comb(s.bands, c.out / "comb.svg");
  plot_v(s.bands, c.out / "v_gaps.svg");
  auto rep = header(c, "bands");
  rep["bands"] = bands_json(s.bands, qm);
  return finish(c, rep, chk, "bands_report.json");
}

int cmd_discriminant(const RunConfig& c) {
  const auto s = build(c);
  const auto& b = s.bands;
  const double top = b.e_plus.back() + 1.0;
  const int n = std::max(200, static_cast<int>(40 * top));
  CsvWriter csv({"z", "E", "delta", "delta_z"});
  std::vector<double> zs, ds;
  for (int i = 0; i <= n; ++i) {
    const double z = b.z0 + (top - b.z0) * i / n;
    const auto d = discriminant_on_momentum(b.op, z);
    csv.row(std::vector<double>{z, z * z, d.delta, d.delta_z});
    zs.push_back(z);
    ds.push_back(std::clamp(d.delta, -3.0, 3.0));
  }
  csv.write(c.out / "discriminant.csv");
  SvgPlot svg("discriminant", "z", "Delta(z)");
  svg.line(zs, ds);
  svg.hline(1.0);
  svg.hline(-1.0);
  svg.write(c.out / "discriminant.svg");
  Checks chk(c.disabled);
  auto rep = header(c, "discriminant");
  rep["points"] = n + 1;
  rep["z_range"] = {b.z0, top};
  return finish(c, rep, chk, "discriminant_report.json");
}

void route_check(const RunConfig& c, const DirectK& k, const QuasimomentumMap& qm, Checks& chk, CsvWriter* csv) {
  double worst = -1e300, worst_diff = 0.0;
  for (const cplx z : z_eps_samples(c, qm, c.z.random, 0)) {
    const cplx kd = k(z);
    const auto ki = qm.k_integral(z);
    const double diff = std::abs(kd - ki.k), bound = ki.tail_bound + c.tol.route;
    worst = std::max(worst, diff - bound);
    worst_diff = std::max(worst_diff, diff);
    if (csv)
      csv->row(std::vector<double>{z.real(), z.imag(), kd.real(), kd.imag(), ki.k.real(), ki.k.imag(), diff, ki.tail_bound});
  }
  chk.add("route_equivalence", worst <= 0.0, worst_diff, c.tol.route, "max |k_direct - k_integral|, bound adds the tail");
}

int cmd_quasimomentum(const RunConfig& c) {
  const auto s = build(c);
  DirectK k(s.bands);
  QuasimomentumMap qm(s.bands);
  Checks chk(c.disabled);
  CsvWriter csv({"re_z", "im_z", "re_k_direct", "im_k_direct", "re_k_integral", "im_k_integral", "diff", "tail"});
  route_check(c, k, qm, chk, &csv);
  csv.write(c.out / "quasimomentum.csv");
  // k along the real axis
  const auto& b = s.bands;
  std::vector<double> t, re, im;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double x = b.z0 + (b.e_plus.back() - b.z0) * i / n;
    int gap = 0;
    for (int g = 1; g <= b.n_gaps; ++g)
      if (x > b.e_minus[g - 1] && x < b.e_plus[g - 1]) gap = g;
    const cplx kx = gap ? k.on_gap_rim(gap, x, 1) : k(cplx(x));
    t.push_back(x);
    re.push_back(kx.real());
    im.push_back(kx.imag());
  }
  SvgPlot svg("quasimomentum on the real line", "t", "k(t + i0)");
  svg.line(t, re);
  svg.line(t, im, "#d62728");
  svg.write(c.out / "k_real.svg");
  auto rep = header(c, "quasimomentum");
  rep["bands"] = bands_json(b, qm);
  rep["samples"] = c.z.random;
  return finish(c, rep, chk, "quasimomentum_report.json");
}

void bloch_check(const RunConfig& c, const DirectK& k, const QuasimomentumMap& qm, Checks& chk, CsvWriter* csv) {
  double worst = 0.0;
  int poles = 0;
  for (const cplx z : z_eps_samples(c, qm, c.z.bloch, 1)) {
    try {
      const auto e = bloch_psi(k, z, 5);
      const auto id = check_bloch_identities(e, integrate(k.bands().op, z, 5));
      worst = std::max(worst, id.max());
      if (csv)
        csv->row(std::vector<double>{z.real(), z.imag(), e.k.real(), e.k.imag(), e.M_plus.real(), e.M_plus.imag(),
                                     e.M_minus.real(), e.M_minus.imag(), id.max()});
    } catch (const PoleError&) {
      ++poles;
    }
  }
  chk.add("bloch_identities", worst <= c.tol.bloch, worst, c.tol.bloch,
          "max relative residual; " + std::to_string(poles) + " samples on Dirichlet poles");
}

int cmd_bloch(const RunConfig& c) {
  const auto s = build(c);
  DirectK k(s.bands);
  QuasimomentumMap qm(s.bands);
  Checks chk(c.disabled);
  CsvWriter csv({"re_z", "im_z", "re_k", "im_k", "re_M_plus", "im_M_plus", "re_M_minus", "im_M_minus", "residual"});
  bloch_check(c, k, qm, chk, &csv);
  csv.write(c.out / "bloch.csv");
  auto rep = header(c, "bloch");
  rep["samples"] = c.z.bloch;
  return finish(c, rep, chk, "bloch_report.json");
}

ordered_json fit_json(const SlopeFit& f) {
  ordered_json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r2"] = f.r2;
  return j;
}

int cmd_verify(const RunConfig& c) {
  if (is_distribution(c)) throw ConfigError("verify needs a smooth potential; use distrib-verify");
  const auto s = build(c);
  const auto& b = s.bands;
  DirectK k(b);
  QuasimomentumMap qm(b, std::max(6, 2 * c.m + 2));
  Checks chk(c.disabled);
  auto rep = header(c, "verify");
  rep["bands"] = bands_json(b, qm);

  CsvWriter bcsv({"n", "E_minus", "E_plus", "e_minus", "e_plus", "gap", "h", "M", "Y0", "degenerate"});
  comb_checks(b, qm, true, chk, bcsv);
  bcsv.write(c.out / "bands.csv");
  route_check(c, k, qm, chk, nullptr);
  bloch_check(c, k, qm, chk, nullptr);

  // moment identities Q_{2j+2} = P_j
  const PeriodicPotential& pn = b.op.b();
  const auto P = coefficients_P(pn, c.m + 1);
  ordered_json moments = ordered_json::array();
  if (b.normalized) {
    for (int j = -1; j <= c.m; ++j) {
      const std::size_t idx = static_cast<std::size_t>(2 * j + 2);
      if (idx >= qm.moments().Q.size()) break;
      const double Q = qm.moments().Q[idx], Pj = P[j + 1], tail = qm.moments().Q_tail[idx];
      const double bound = tail + c.tol.moment * std::abs(Pj) + 1e-12;
      chk.add("moment_Q" + std::to_string(idx) + "_eq_P" + std::to_string(j), std::abs(Q - Pj) <= bound,
              std::abs(Q - Pj), bound);
      moments.push_back({{"j", j}, {"Q", Q}, {"P", Pj}, {"tail", tail}});
    }
  }
  rep["moments"] = moments;

  // sector asymptotics of f_{m+1}
  AsymptoticModel model11(pn, c.m + 1);
  SectorOptions o11;
  o11.y_min = c.z.y_min;
  o11.y_max = c.z.y_max;
  o11.y_points = c.z.y_points;
  o11.eps = c.eps;
  o11.strip_r = c.strip_r;
  o11.strip_points = c.z.strip_points;
  const auto r11 = verify_sector(k, model11, c.m, o11);
  ordered_json a;
  a["m"] = c.m;
  a["trivial"] = r11.trivial;
  a["expected_slope"] = r11.expected_slope;
  a["P_m"] = r11.P_m;
  CsvWriter scsv({"ray", "y", "abs_f"});
  if (!r11.trivial) {
    a["sector"] = fit_json(r11.sector);
    a["prefactor_estimate"] = r11.prefactor_estimate;
    a["strip_max_scaled"] = r11.strip_max_scaled;
    chk.add("sector_slope", std::abs(r11.sector.slope - r11.expected_slope) <= c.tol.slope, r11.sector.slope,
            r11.expected_slope);
    const double rel = std::abs(r11.prefactor_estimate / (-r11.P_m) - 1.0);
    chk.add("sector_prefactor", rel <= c.tol.prefactor, r11.prefactor_estimate, -r11.P_m, "relative deviation from -P_m");
    ordered_json rays = ordered_json::array();
    for (std::size_t r = 0; r < c.z.sector_slopes.size(); ++r) {
      const double sl = c.z.sector_slopes[r];
      std::vector<double> ys, fs;
      for (int i = 0; i < c.z.y_points; ++i) {
        const double y = c.z.y_min * std::pow(c.z.y_max / c.z.y_min, double(i) / (c.z.y_points - 1));
        const cplx z(sl * y, y);
        const double af = std::abs(k.shift(z) + model11.K(z, c.m));
        ys.push_back(std::abs(z));
        fs.push_back(af);
        scsv.row(std::vector<double>{double(r), y, af});
      }
      const auto fit = fit_loglog(ys, fs);
      chk.add("sector_ray_slope_" + std::to_string(r), std::abs(fit.slope - r11.expected_slope) <= c.tol.slope, fit.slope,
              r11.expected_slope, "ray x = " + fmt17(sl) + " y");
      auto rj = fit_json(fit);
      rj["x_over_y"] = sl;
      rays.push_back(rj);
    }
    a["rays"] = rays;
    ordered_json sharp = ordered_json::array();
    for (const auto& row : r11.sharpness)
      sharp.push_back({{"n", row.n},
                       {"gap", row.gap},
                       {"ratio_minus", row.ratio_minus},
                       {"ratio_plus", row.ratio_plus},
                       {"half_ratio_minus", row.half_ratio_minus},
                       {"half_ratio_plus", row.half_ratio_plus},
                       {"max_abs_f_near_over_gap", row.max_abs_f_near / row.gap}});
    a["sharpness"] = sharp;
    if (!r11.sharpness_notice.empty()) a["sharpness_notice"] = r11.sharpness_notice;
  }
  scsv.write(c.out / "sector.csv");

  // Bloch asymptotics
  AsymptoticModel model12(pn, c.m);
  BlochAsymOptions o12;
  o12.r_min = c.z.r_min;
  o12.r_max = c.z.r_max;
  o12.r_points = c.z.r_points;
  o12.strip_r = c.strip_r;
  o12.eps = c.eps;
  const auto r12 = verify_bloch_asymptotics(k, model12, o12, &qm);
  ordered_json t12;
  t12["radius"] = r12.radius;
  t12["err_M"] = r12.err_M;
  t12["err_psi"] = r12.err_psi;
  t12["err_k"] = r12.err_k;
  t12["moment_odd_err"] = r12.moment_odd_err;
  t12["moment_even_abs"] = r12.moment_even_abs;
  if (r12.notice.empty()) {
    t12["fit_M"] = fit_json(r12.fit_M);
    t12["fit_psi"] = fit_json(r12.fit_psi);
    chk.add("bloch_psi_decay", r12.fit_psi.slope <= r12.bound_psi + c.tol.slope, r12.fit_psi.slope,
            r12.bound_psi + c.tol.slope);
    chk.add("weyl_m_decay", r12.fit_M.slope <= r12.bound_M + c.tol.slope, r12.fit_M.slope, r12.bound_M + c.tol.slope);
    if (r12.k_checked) {
      t12["fit_k"] = fit_json(r12.fit_k);
      chk.add("k_minus_xi_decay", r12.fit_k.slope <= r12.bound_k + c.tol.slope, r12.fit_k.slope,
              r12.bound_k + c.tol.slope);
    }
  } else {
    t12["notice"] = r12.notice;
  }
  CsvWriter ecsv({"radius", "err_M", "err_psi", "err_k"});
  for (std::size_t i = 0; i < r12.radius.size(); ++i)
    ecsv.row(std::vector<double>{r12.radius[i], r12.err_M[i], r12.err_psi[i], r12.err_k[i]});
  ecsv.write(c.out / "bloch_errors.csv");

  rep["asymptotics"] = a;
  rep["bloch_asymptotics"] = t12;
  plot_comb(b, c.out / "comb.svg");
  const int code = finish(c, rep, chk, "verify_report.json");
  write_json(c.out / "asymptotics_report.json", a);
  return code;
}

int cmd_distrib_verify(const RunConfig& c) {
  if (!is_distribution(c)) throw ConfigError("distrib-verify needs a potential of type \"distribution\"");
  const auto s = build(c);
  const auto& sol = *s.riccati;
  const auto& b = s.bands;
  Checks chk(c.disabled);
  auto rep = header(c, "distrib-verify");
  ordered_json r;
  r["norm_q_sq"] = sol.norm_q_sq;
  r["c"] = sol.c;
  r["residual"] = sol.residual;
  r["iterations"] = sol.iterations;
  r["q"] = potential_to_json(sol.q);
  rep["riccati"] = r;
  chk.add("riccati_residual", sol.residual <= c.tol.riccati, sol.residual, c.tol.riccati);
  chk.add("q_mean_zero", std::abs(sol.q.mean()) <= 1e-14, std::abs(sol.q.mean()), 1e-14);
  const double d0 = discriminant_on_energy(sol.transformed_operator(), 0.0).delta;
  chk.add("spectrum_bottom", std::abs(d0 - 1.0) <= 1e-9, std::abs(d0 - 1.0), 1e-9, "|Delta(lambda = 0) - 1|");

  // the same potential as a smooth one, when p' is a trigonometric polynomial
  {
    SpectrumOptions so;
    so.normalize = c.normalize;
    const auto bh = find_band_edges(sol.p.derivative(1).shifted(sol.c), std::min(c.n_gaps, 10), so);
    double worst = 0.0;
    for (int n = 0; n < bh.n_gaps; ++n)
      worst = std::max({worst, std::abs(bh.E_minus[n] - b.E_minus[n]), std::abs(bh.E_plus[n] - b.E_plus[n])});
    chk.add("smooth_consistency", worst <= c.tol.consistency, worst, c.tol.consistency, "max edge difference, first 10 gaps");
  }

  DirectK k(b);
  QuasimomentumMap qm(b);
  rep["bands"] = bands_json(b, qm);
  {
    std::vector<double> ys, sh;
    for (int i = 0; i < c.z.y_points; ++i) {
      const double y = c.z.y_min * std::pow(c.z.y_max / c.z.y_min, double(i) / (c.z.y_points - 1));
      ys.push_back(y);
      sh.push_back(std::abs(k.shift(cplx(0.0, y))));
    }
    const auto fit = fit_loglog(ys, sh);
    const double y = c.z.y_max;
    const double Pm1 = (-k.shift(cplx(0.0, y)) * cplx(0.0, y)).real();
    const double target = 0.5 * sol.norm_q_sq;
    ordered_json pj = fit_json(fit);
    pj["P_minus_one_fit"] = Pm1;
    pj["half_norm_q_sq"] = target;
    rep["k_asymptotics"] = pj;
    if (target > 0.0) {
      chk.add("k_shift_slope", std::abs(fit.slope + 1.0) <= c.tol.slope, fit.slope, -1.0);
      chk.add("P_minus_one", std::abs(Pm1 / target - 1.0) <= c.tol.p_minus_one, Pm1, target, "relative deviation");
    }
  }

  const auto t = verify_k0_bounds(k, qm, c.k0);
  CsvWriter csv({"n", "gap", "Y0", "rim_max", "rim_constant", "eps_boundary_max", "S_eps", "V_boundary_max", "S_one",
                 "V_max", "S_eps_plus_S_s", "U_interior_max", "U_boundary_max"});
  bool ok10 = true, ok11 = true, ok12 = true, ok13 = true, ok14 = true;
  std::string f10, f11, f12, f13, f14;
  const auto note = [](std::string& s, int n) { s += (s.empty() ? "n = " : ", ") + std::to_string(n); };
  for (const auto& row : t.rows) {
    csv.row(std::vector<double>{double(row.n), row.gap, row.Y0, row.rim_max, row.rim_constant, row.eps_boundary_max,
                                row.S_eps, row.V_boundary_max, row.S_one, row.V_interior_max, row.S_eps_plus_S_s,
                                row.U_interior_max, row.U_boundary_max});
    if (!row.ok_rim_window) ok10 = false, note(f10, row.n);
    if (!row.ok_eps_boundary) ok11 = false, note(f11, row.n);
    if (!row.ok_V_boundary) ok12 = false, note(f12, row.n);
    if (!row.ok_max_principle) ok13 = false, note(f13, row.n);
    if (!row.ok_V_interior) ok14 = false, note(f14, row.n);
  }
  csv.write(c.out / "k0_bounds.csv");
  const double nrows = static_cast<double>(t.rows.size());
  chk.add("k0_rim_window", ok10, nrows, 0.0, f10);
  chk.add("k0_eps_boundary", ok11, nrows, 0.0, f11);
  chk.add("k0_V_boundary", ok12, nrows, 0.0, f12);
  chk.add("k0_maximum_principle", ok13, nrows, 0.0, f13);
  chk.add("k0_V_interior", ok14, nrows, 0.0, f14);
  chk.add("S_summability", t.ok_summability, t.sum_S_sq_eps, t.bound_sum_eps);
  ordered_json tj;
  tj["Q0"] = t.Q0;
  tj["s"] = t.s;
  tj["r"] = c.k0.r;
  tj["sum_S_sq_eps"] = t.sum_S_sq_eps;
  tj["bound_eps"] = t.bound_sum_eps;
  tj["sum_S_sq_one"] = t.sum_S_sq_one;
  tj["bound_one"] = t.bound_sum_one;
  rep["k0_bounds"] = tj;

  SvgPlot svg("k_0 on the boundary of U_n against S_n(eps)", "n", "");
  std::vector<double> ns, lhs, rhs;
  for (const auto& row : t.rows) {
    ns.push_back(row.n);
    lhs.push_back(row.eps_boundary_max);
    rhs.push_back(row.S_eps);
  }
  svg.line(ns, lhs);
  svg.line(ns, rhs, "#d62728");
  svg.write(c.out / "k0_bounds.svg");
  return finish(c, rep, chk, "distrib_report.json");
}

int cmd_dump_kappa(const RunConfig& c) {
  const std::string text = dump_kappa(c.kappa_order);
  std::ofstream(c.out / "kappa.txt", std::ios::binary) << text;
  std::cout << text;
  Checks chk(c.disabled);
  auto rep = header(c, "dump-kappa");
  rep["order"] = c.kappa_order;
  return finish(c, rep, chk, "kappa_report.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, quasimomentum and Bloch asymptotics of periodic Hill operators"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"bands", "band edges, gap data and comb inequalities"},
      {"discriminant", "Delta on the real momentum axis"},
      {"quasimomentum", "k by the direct and gap-integral routes"},
      {"bloch", "Bloch functions and Weyl functions"},
      {"verify", "sector, Bloch asymptotics and identity suite"},
      {"distrib-verify", "Riccati reduction of c + p' and the k_0 bounds"},
      {"dump-kappa", "print the kappa recursion"}};
  for (const auto& [name, help] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    RunConfig c = parse_config(config_path);
    if (!out_dir.empty()) c.out = out_dir;
    fs::create_directories(c.out);
    if (cmd == "bands") return cmd_bands(c);
    if (cmd == "discriminant") return cmd_discriminant(c);
    if (cmd == "quasimomentum") return cmd_quasimomentum(c);
    if (cmd == "bloch") return cmd_bloch(c);
    if (cmd == "verify") return cmd_verify(c);
    if (cmd == "distrib-verify") return cmd_distrib_verify(c);
    return cmd_dump_kappa(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 3;
  }
}
