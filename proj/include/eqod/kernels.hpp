#pragma once

// Dense inner-loop kernels used by weak-form quadrature, term evaluation and
// coordinate descent. Each kernel has a scalar reference implementation and
// vectorized variants (AVX2+FMA on x86-64, NEON on AArch64); the best variant
// the CPU supports is chosen at startup. Setting EQOD_ISA=scalar|avx2|neon in
// the environment overrides the choice.
//
// Vectorized reductions reassociate sums, so results agree with the scalar
// reference to rounding, not bitwise. Within one process the active table
// never changes unless select() is called.

#include <cstddef>
#include <span>
#include <string_view>

namespace eqod::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct Table {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[i] = a[i] * b[i]   (out may alias a or b)
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  /// y[r] = sum_c A[r*ld + c] * x[c] for r < rows, c < cols (row-major A)
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y);
};

const Table& scalar_table();
/// nullptr when the variant was not compiled in or the CPU lacks support.
const Table* avx2_table();
const Table* neon_table();

/// Table currently in use.
const Table& active();

/// Force a variant; throws eqod::Error if unavailable on this machine.
void select(Isa isa);

/// Every table usable on this machine, scalar first.
std::span<const Table* const> available();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_squares(std::span<const double> a) { return active().dot(a.data(), a.data(), a.size()); }

}  // namespace eqod::kernels
