#pragma once

#include <complex>
#include <span>
#include <vector>

namespace eqod {

/// Real-to-complex FFT of fixed length n (unnormalized forward, inverse
/// scaled by 1/n so inverse(forward(x)) == x). Backed by FFTW; plans are
/// created once per length and shared, execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// `in` is not modified.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  std::vector<std::complex<double>> forward(std::span<const double> in) const;
  std::vector<double> inverse(std::span<const std::complex<double>> in) const;

 private:
  int n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace eqod
