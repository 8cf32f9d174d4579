#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

#include "eqod/error.hpp"
#include "kernels_impl.hpp"

namespace eqod::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(EQOD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::vector<const Table*> build_available() {
  std::vector<const Table*> out{&detail::kScalarTable};
#if defined(EQOD_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&detail::kAvx2Table);
#endif
#if defined(EQOD_HAVE_NEON)
  out.push_back(&detail::kNeonTable);
#endif
  return out;
}

const std::vector<const Table*>& tables() {
  static const std::vector<const Table*> kTables = build_available();
  return kTables;
}

const Table* find(Isa isa) {
  for (const Table* t : tables())
    if (t->isa == isa) return t;
  return nullptr;
}

const Table* initial_choice() {
  if (const char* env = std::getenv("EQOD_ISA")) {
    const std::string want(env);
    for (const Table* t : tables())
      if (isa_name(t->isa) == want) return t;
  }
  return tables().back();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> kCurrent{initial_choice()};
  return kCurrent;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const Table& scalar_table() { return detail::kScalarTable; }
const Table* avx2_table() { return find(Isa::avx2); }
const Table* neon_table() { return find(Isa::neon); }

const Table& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  const Table* t = find(isa);
  if (t == nullptr) fail("kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  current().store(t, std::memory_order_relaxed);
}

std::span<const Table* const> available() { return tables(); }

}  // namespace eqod::kernels
