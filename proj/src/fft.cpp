#include "eqod/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "eqod/error.hpp"

namespace eqod {

namespace {

struct Plans {
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW's planner is not thread-safe; plans are made under this lock and kept
// for the life of the process.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

Plans plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<double> r(static_cast<std::size_t>(n));
  std::vector<fftw_complex> c(static_cast<std::size_t>(n / 2 + 1));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p{fftw_plan_dft_r2c_1d(n, r.data(), c.data(), flags),
          fftw_plan_dft_c2r_1d(n, c.data(), r.data(), flags | FFTW_DESTROY_INPUT)};
  if (p.forward == nullptr || p.inverse == nullptr)
    throw Error(ErrorKind::numerical, "FFTW failed to create a plan of length " + std::to_string(n));
  cache.emplace(n, p);
  return p;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  require(n >= 2, "FFT length must be >= 2");
  const Plans p = plans_for(n);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  require(static_cast<int>(in.size()) == n_ && static_cast<int>(out.size()) == spectrum_size(),
          "RealFft::forward: size mismatch");
  // r2c leaves its input intact; the cast only satisfies the C signature.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  require(static_cast<int>(in.size()) == spectrum_size() && static_cast<int>(out.size()) == n_,
          "RealFft::inverse: size mismatch");
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / n_;
  for (double& v : out) v *= scale;
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> in) const {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(spectrum_size()));
  forward(in, out);
  return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> in) const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  inverse(in, out);
  return out;
}

}  // namespace eqod
