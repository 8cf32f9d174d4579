#pragma once

#include <complex>
#include <span>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/fft.hpp"

namespace eqod {

/// FFT-ordered angular wavenumbers 2*pi*n/L for n = 0..nx/2-1, -nx/2..-1.
/// The Nyquist bin carries -nx/2 * 2*pi/L. nx must be even.
std::vector<double> wavenumbers(int nx, double length);

/// Fourier differentiation on one periodic grid. Read-only after
/// construction, so one workspace may be shared between threads.
class SpectralWorkspace {
 public:
  SpectralWorkspace(int nx, double length);

  int nx() const { return fft_.size(); }
  double length() const { return length_; }
  /// Full FFT-ordered wavenumber array (length nx).
  const std::vector<double>& wavenumbers() const { return k_; }
  /// Wavenumbers of the half spectrum produced by RealFft (length nx/2+1).
  /// The last entry is the Nyquist bin, stored as its negative frequency.
  std::span<const double> half_wavenumbers() const { return {k_half_}; }
  const RealFft& fft() const { return fft_; }

  /// d^order/dx^order of a periodic row; odd orders drop the Nyquist mode.
  std::vector<double> derivative(std::span<const double> row, int order) const;

  /// Row-by-row derivative of an nt x nx field.
  Field derivative(const Field& values, int order) const;

  /// Multiplier (i k)^order for half-spectrum bin n, Nyquist zeroed for odd
  /// orders.
  std::complex<double> multiplier(int n, int order) const;

 private:
  double length_;
  RealFft fft_;
  std::vector<double> k_;
  std::vector<double> k_half_;
};

/// Convenience wrapper: derivative of one row on a domain of length L.
std::vector<double> spectral_derivative(std::span<const double> row, int order, double length);

/// dt*dx * sum w_i f_ij with w = 1/2 on the first and last rows, 1 elsewhere;
/// the space direction is periodic and uses unit weights throughout.
double trapezoid_2d(const Field& values, double dx, double dt);

}  // namespace eqod
