#include "hillband/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hillband/errors.hpp"

namespace hillband {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int next_pow2_above(int n) {
  int g = 1;
  while (g <= n) g <<= 1;
  return g;
}

int admissible_grid(int requested, int harmonics) {
  int g = std::max(requested, 2);
  if ((g & (g - 1)) != 0) g = next_pow2_above(g);
  if (g <= 8 * harmonics) g = next_pow2_above(8 * harmonics);
  return g;
}

}  // namespace

PeriodicPotential::PeriodicPotential() : PeriodicPotential({0.0}, {}) {}

PeriodicPotential::PeriodicPotential(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                                     int grid_size, int max_jet)
    : cos_(std::move(cos_coeffs)), max_jet_(max_jet) {
  if (cos_.empty()) cos_.push_back(0.0);
  // sin_coeffs arrive as [s_1, s_2, ...]; store with a leading zero so indices line up.
  const std::size_t h = std::max(cos_.size(), sin_coeffs.size() + 1);
  cos_.resize(h, 0.0);
  sin_.assign(h, 0.0);
  for (std::size_t n = 0; n < sin_coeffs.size(); ++n) sin_[n + 1] = sin_coeffs[n];
  // trim trailing zero harmonics
  while (cos_.size() > 1 && cos_.back() == 0.0 && sin_.back() == 0.0) {
    cos_.pop_back();
    sin_.pop_back();
  }
  if (max_jet_ < 0) throw DomainError("max_jet must be non-negative");
  grid_size_ = admissible_grid(grid_size, harmonics());
}

PeriodicPotential PeriodicPotential::constant(double c) { return PeriodicPotential({c}, {}); }

PeriodicPotential PeriodicPotential::from_samples(std::span<const double> values, int max_jet) {
  if (values.size() < 2 || values.size() % 2 != 0)
    throw DomainError("samples potential needs an even number (>= 2) of values");
  std::vector<double> c, s;
  real_dft(values, c, s);
  std::vector<double> sin_coeffs(s.begin() + 1, s.end());
  return PeriodicPotential(std::move(c), std::move(sin_coeffs), static_cast<int>(values.size()), max_jet);
}

double PeriodicPotential::eval(double x) const {
  const int h = harmonics();
  double value = cos_[0];
  if (h == 0) return value;
  const double c1 = std::cos(kTwoPi * x), s1 = std::sin(kTwoPi * x);
  double cn = c1, sn = s1;
  for (int n = 1; n <= h; ++n) {
    value += cos_[n] * cn + sin_[n] * sn;
    const double cn1 = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cn1;
  }
  return value;
}

std::vector<double> PeriodicPotential::jet(double x, int order) const {
  std::vector<double> out(order + 1, 0.0);
  out[0] = cos_[0];
  const int h = harmonics();
  const double c1 = std::cos(kTwoPi * x), s1 = std::sin(kTwoPi * x);
  double cn = c1, sn = s1;
  for (int n = 1; n <= h; ++n) {
    // d^j/dx^j of (a cos + b sin)(w x) cycles through (a,b) -> w (b, -a)
    const double w = kTwoPi * n;
    double a = cos_[n], b = sin_[n], scale = 1.0;
    for (int j = 0; j <= order; ++j) {
      out[j] += scale * (a * cn + b * sn);
      const double na = b, nb = -a;
      a = na;
      b = nb;
      scale *= w;
    }
    const double cn1 = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cn1;
  }
  return out;
}

PeriodicPotential PeriodicPotential::derivative(int order) const {
  if (order < 0) throw DomainError("derivative order must be non-negative");
  if (order > max_jet_)
    throw CapabilityError("derivative order " + std::to_string(order) + " exceeds jet budget " +
                          std::to_string(max_jet_));
  if (order == 0) return *this;
  const int h = harmonics();
  std::vector<double> c(h + 1, 0.0), s(h, 0.0);
  for (int n = 1; n <= h; ++n) {
    const double w = std::pow(kTwoPi * n, order);
    double a = cos_[n], b = sin_[n];
    for (int j = 0; j < order % 4; ++j) {
      const double na = b, nb = -a;
      a = na;
      b = nb;
    }
    c[n] = w * a;
    s[n - 1] = w * b;
  }
  return PeriodicPotential(std::move(c), std::move(s), grid_size_, max_jet_);
}

std::vector<double> PeriodicPotential::samples() const { return samples(grid_size_); }

std::vector<double> PeriodicPotential::samples(int n) const {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = eval(static_cast<double>(j) / n);
  return out;
}

PeriodicPotential PeriodicPotential::shifted(double c) const {
  auto cc = cos_;
  cc[0] += c;
  return PeriodicPotential(std::move(cc), std::vector<double>(sin_.begin() + 1, sin_.end()), grid_size_, max_jet_);
}

PeriodicPotential PeriodicPotential::translated(double a) const {
  const int h = harmonics();
  std::vector<double> c(h + 1), s(h);
  c[0] = cos_[0];
  for (int n = 1; n <= h; ++n) {
    // a cos(w(x+t)) + b sin(w(x+t)) re-expanded in cos(wx), sin(wx)
    const double ct = std::cos(kTwoPi * n * a), st = std::sin(kTwoPi * n * a);
    c[n] = cos_[n] * ct + sin_[n] * st;
    s[n - 1] = sin_[n] * ct - cos_[n] * st;
  }
  return PeriodicPotential(std::move(c), std::move(s), grid_size_, max_jet_);
}

PeriodicPotential PeriodicPotential::scaled(double factor) const {
  auto c = cos_;
  std::vector<double> s(sin_.begin() + 1, sin_.end());
  for (auto& v : c) v *= factor;
  for (auto& v : s) v *= factor;
  return PeriodicPotential(std::move(c), std::move(s), grid_size_, max_jet_);
}

PeriodicPotential PeriodicPotential::antiderivative() const {
  const int h = harmonics();
  std::vector<double> c(h + 1, 0.0), s(h, 0.0);
  for (int n = 1; n <= h; ++n) {
    const double w = kTwoPi * n;
    // int (a cos + b sin) = (a sin - b cos) / w
    s[n - 1] = cos_[n] / w;
    c[n] = -sin_[n] / w;
  }
  return PeriodicPotential(std::move(c), std::move(s), grid_size_, max_jet_);
}

PeriodicPotential PeriodicPotential::operator+(const PeriodicPotential& o) const {
  const int h = std::max(harmonics(), o.harmonics());
  std::vector<double> c(h + 1, 0.0), s(h, 0.0);
  for (int n = 0; n <= h; ++n) {
    if (n <= harmonics()) c[n] += cos_[n];
    if (n <= o.harmonics()) c[n] += o.cos_[n];
    if (n >= 1 && n <= harmonics()) s[n - 1] += sin_[n];
    if (n >= 1 && n <= o.harmonics()) s[n - 1] += o.sin_[n];
  }
  return PeriodicPotential(std::move(c), std::move(s), std::max(grid_size_, o.grid_size_),
                           std::min(max_jet_, o.max_jet_));
}

PeriodicPotential PeriodicPotential::operator*(const PeriodicPotential& o) const {
  // exact product of two trigonometric polynomials via complex coefficients
  const int ha = harmonics(), hb = o.harmonics(), h = ha + hb;
  auto complex_coeffs = [](const PeriodicPotential& p, int n, double& re, double& im) {
    // p = sum_n hat_n e^{2 pi i n x}; hat_n = (c_n - i s_n)/2 for n > 0
    const int an = std::abs(n);
    if (an > p.harmonics()) {
      re = im = 0.0;
      return;
    }
    if (an == 0) {
      re = p.cos_[0];
      im = 0.0;
      return;
    }
    re = 0.5 * p.cos_[an];
    im = (n > 0 ? -0.5 : 0.5) * p.sin_[an];
  };
  std::vector<double> c(h + 1, 0.0), s(h, 0.0);
  for (int n = 0; n <= h; ++n) {
    double re = 0.0, im = 0.0;
    for (int k = -ha; k <= ha; ++k) {
      const int l = n - k;
      if (std::abs(l) > hb) continue;
      double ar, ai, br, bi;
      complex_coeffs(*this, k, ar, ai);
      complex_coeffs(o, l, br, bi);
      re += ar * br - ai * bi;
      im += ar * bi + ai * br;
    }
    if (n == 0) {
      c[0] = re;
    } else {
      c[n] = 2.0 * re;
      s[n - 1] = -2.0 * im;
    }
  }
  return PeriodicPotential(std::move(c), std::move(s), std::max(grid_size_, o.grid_size_),
                           std::min(max_jet_, o.max_jet_));
}

double PeriodicPotential::norm_sq() const {
  double acc = cos_[0] * cos_[0];
  for (int n = 1; n <= harmonics(); ++n) acc += 0.5 * (cos_[n] * cos_[n] + sin_[n] * sin_[n]);
  return acc;
}

double PeriodicPotential::max_abs_bound() const {
  double acc = std::abs(cos_[0]);
  for (int n = 1; n <= harmonics(); ++n) acc += std::abs(cos_[n]) + std::abs(sin_[n]);
  return acc;
}

double PeriodicPotential::min_value() const {
  double lo = eval(0.0);
  const int n = std::max(grid_size_, 256);
  for (int j = 1; j < n; ++j) lo = std::min(lo, eval(static_cast<double>(j) / n));
  return lo;
}

bool PeriodicPotential::is_zero() const {
  return std::all_of(cos_.begin(), cos_.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(sin_.begin(), sin_.end(), [](double v) { return v == 0.0; });
}

double period_integral(std::span<const double> f) {
  if (f.empty()) return 0.0;
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc / static_cast<double>(f.size());
}

void real_dft(std::span<const double> values, std::vector<double>& cos_out, std::vector<double>& sin_out) {
  const std::size_t n = values.size();
  const std::size_t h = n / 2;  // harmonics 0..h-1 kept
  cos_out.assign(h, 0.0);
  sin_out.assign(h, 0.0);
  std::vector<double> ct(n), st(n);
  for (std::size_t j = 0; j < n; ++j) {
    ct[j] = std::cos(kTwoPi * static_cast<double>(j) / n);
    st[j] = std::sin(kTwoPi * static_cast<double>(j) / n);
  }
  for (std::size_t k = 0; k < h; ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (k * j) % n;
      a += values[j] * ct[idx];
      b += values[j] * st[idx];
    }
    const double norm = (k == 0) ? 1.0 / n : 2.0 / n;
    cos_out[k] = a * norm;
    sin_out[k] = b * norm;
  }
}

PeriodicPotential potential_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) throw DomainError("potential descriptor needs a \"type\" field");
  const std::string type = j.at("type").get<std::string>();
  const int max_jet = j.value("max_jet", kDefaultMaxJet);
  if (type == "fourier") {
    auto c = j.value("cos", std::vector<double>{0.0});
    auto s = j.value("sin", std::vector<double>{});
    return PeriodicPotential(std::move(c), std::move(s), j.value("grid_size", kDefaultGridSize), max_jet);
  }
  if (type == "samples") {
    auto v = j.at("values").get<std::vector<double>>();
    return PeriodicPotential::from_samples(v, max_jet);
  }
  throw DomainError("unknown potential type \"" + type + "\"");
}

nlohmann::ordered_json potential_to_json(const PeriodicPotential& p) {
  nlohmann::ordered_json j;
  j["type"] = "fourier";
  j["cos"] = p.cos_coeffs();
  j["sin"] = std::vector<double>(p.sin_coeffs().begin() + 1, p.sin_coeffs().end());
  j["grid_size"] = p.grid_size();
  return j;
}

}  // namespace hillband
