#pragma once

#include "eqod/kernels.hpp"

namespace eqod::kernels::detail {

extern const Table kScalarTable;

// Defined only when the matching translation unit is compiled for the target.
#if defined(EQOD_HAVE_AVX2)
extern const Table kAvx2Table;
#endif
#if defined(EQOD_HAVE_NEON)
extern const Table kNeonTable;
#endif

}  // namespace eqod::kernels::detail
