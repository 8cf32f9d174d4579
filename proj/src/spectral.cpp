#include "eqod/spectral.hpp"

#include <cmath>
#include <numbers>

#include "eqod/error.hpp"

namespace eqod {

std::vector<double> wavenumbers(int nx, double length) {
  require(nx > 0 && nx % 2 == 0, "wavenumbers: nx must be a positive even number");
  require(length > 0.0, "wavenumbers: domain length must be positive");
  const double scale = 2.0 * std::numbers::pi / length;
  std::vector<double> k(static_cast<std::size_t>(nx));
  for (int n = 0; n < nx; ++n) k[static_cast<std::size_t>(n)] = scale * (n < nx / 2 ? n : n - nx);
  return k;
}

SpectralWorkspace::SpectralWorkspace(int nx, double length)
    : length_(length), fft_(nx), k_(eqod::wavenumbers(nx, length)) {
  k_half_.assign(k_.begin(), k_.begin() + nx / 2);
  k_half_.push_back(k_[static_cast<std::size_t>(nx / 2)]);
}

std::complex<double> SpectralWorkspace::multiplier(int n, int order) const {
  const int nyquist = nx() / 2;
  if (order % 2 == 1 && n == nyquist) return {0.0, 0.0};
  const std::complex<double> ik(0.0, k_half_[static_cast<std::size_t>(n)]);
  std::complex<double> m(1.0, 0.0);
  for (int p = 0; p < order; ++p) m *= ik;
  return m;
}

std::vector<double> SpectralWorkspace::derivative(std::span<const double> row, int order) const {
  require(static_cast<int>(row.size()) == nx(), "spectral derivative: row length mismatch");
  require(order >= 0 && order <= 4, "spectral derivative: order must be in 0..4");
  for (double v : row) require(std::isfinite(v), "spectral derivative: non-finite input");
  if (order == 0) return {row.begin(), row.end()};
  auto spec = fft_.forward(row);
  for (int n = 0; n < fft_.spectrum_size(); ++n) spec[static_cast<std::size_t>(n)] *= multiplier(n, order);
  return fft_.inverse(spec);
}

Field SpectralWorkspace::derivative(const Field& values, int order) const {
  require(values.cols() == nx(), "spectral derivative: field width mismatch");
  Field out(values.rows(), values.cols());
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(fft_.spectrum_size()));
  std::vector<std::complex<double>> mult(spec.size());
  for (int n = 0; n < fft_.spectrum_size(); ++n) mult[static_cast<std::size_t>(n)] = multiplier(n, order);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    std::span<const double> row(values.row(i).data(), static_cast<std::size_t>(nx()));
    for (double v : row) require(std::isfinite(v), "spectral derivative: non-finite input");
    fft_.forward(row, spec);
    for (std::size_t n = 0; n < spec.size(); ++n) spec[n] *= mult[n];
    fft_.inverse(spec, std::span<double>(out.row(i).data(), static_cast<std::size_t>(nx())));
  }
  return out;
}

std::vector<double> spectral_derivative(std::span<const double> row, int order, double length) {
  require(order >= 1 && order <= 4, "spectral derivative: order must be in 1..4");
  require(row.size() % 2 == 0, "spectral derivative: row length must be even");
  return SpectralWorkspace(static_cast<int>(row.size()), length).derivative(row, order);
}

double trapezoid_2d(const Field& values, double dx, double dt) {
  const Eigen::Index nt = values.rows();
  if (nt == 0 || values.cols() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < nt; ++i) {
    const double w = (nt > 1 && (i == 0 || i == nt - 1)) ? 0.5 : 1.0;
    total += w * values.row(i).sum();
  }
  return total * dx * dt;
}

}  // namespace eqod
