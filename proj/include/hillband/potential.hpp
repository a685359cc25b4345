#pragma once

#include <span>
#include <vector>

#include "json.hpp"

namespace hillband {

inline constexpr int kDefaultGridSize = 1024;
inline constexpr int kDefaultMaxJet = 8;

/// A real 1-periodic function stored as a finite Fourier series
///
///   p(x) = c_0 + sum_{n>=1} c_n cos(2 pi n x) + s_n sin(2 pi n x).
///
/// The uniform grid x_j = j / grid_size is used for samples and period
/// integrals. grid_size is always a power of two exceeding eight times the
/// highest retained harmonic; a smaller request is raised to the next such
/// power of two. Instances are immutable.
class PeriodicPotential {
 public:
  PeriodicPotential();
  PeriodicPotential(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                    int grid_size = kDefaultGridSize, int max_jet = kDefaultMaxJet);

  /// Converts samples at x_j = j / N to Fourier coefficients via a DFT.
  /// N must be even; the Nyquist harmonic is dropped.
  static PeriodicPotential from_samples(std::span<const double> values, int max_jet = kDefaultMaxJet);

  static PeriodicPotential constant(double c);

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  /// Termwise derivative. Throws CapabilityError when order exceeds max_jet().
  PeriodicPotential derivative(int order) const;

  /// Values at the grid points x_j = j / grid_size().
  std::vector<double> samples() const;
  std::vector<double> samples(int n) const;

  /// Values of p, p', ..., p^(order) at x, sharing one pass over the harmonics.
  std::vector<double> jet(double x, int order) const;

  PeriodicPotential shifted(double c) const;      // p + c
  PeriodicPotential translated(double a) const;   // p(x + a)
  PeriodicPotential scaled(double s) const;       // s * p
  PeriodicPotential antiderivative() const;       // mean-zero primitive of p - mean(p)
  PeriodicPotential operator+(const PeriodicPotential& other) const;
  PeriodicPotential operator*(const PeriodicPotential& other) const;

  double mean() const { return cos_[0]; }
  /// ||p||^2 = int_0^1 p^2 dx, from Parseval.
  double norm_sq() const;
  double max_abs_bound() const;  // sum of |coefficients|
  double min_value() const;      // minimum over a fine sample

  int harmonics() const { return static_cast<int>(cos_.size()) - 1; }
  int grid_size() const { return grid_size_; }
  int max_jet() const { return max_jet_; }
  bool is_zero() const;

  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }  // index 0 unused, always 0

 private:
  std::vector<double> cos_;  // c_0 .. c_H
  std::vector<double> sin_;  // 0, s_1 .. s_H
  int grid_size_;
  int max_jet_;
};

/// Trapezoidal rule on the periodic uniform grid: the arithmetic mean of the samples.
double period_integral(std::span<const double> f);

/// Real DFT of uniform samples: returns (cos, sin) coefficients up to harmonic N/2 - 1.
void real_dft(std::span<const double> values, std::vector<double>& cos_out, std::vector<double>& sin_out);

/// Parses the JSON potential descriptors
///   {"type":"fourier","cos":[...],"sin":[...]}  and  {"type":"samples","values":[...]}.
/// Optional keys: "grid_size", "max_jet".
PeriodicPotential potential_from_json(const nlohmann::json& j);
nlohmann::ordered_json potential_to_json(const PeriodicPotential& p);

}  // namespace hillband
