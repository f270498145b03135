#include <cstdlib>
#include <string>

#include "fbns/simd/kernels.hpp"

namespace fbns::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return detail::avx2_table;
#endif
  (void)isa;
  return detail::scalar_table;
}

const KernelTable& kernels() {
  static const KernelTable& active = [] () -> const KernelTable& {
    const char* forced = std::getenv("SOLVER_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return detail::scalar_table;
    return kernels(Isa::avx2);
  }();
  return active;
}

}  // namespace fbns::simd
