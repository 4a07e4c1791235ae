#include <cstdlib>
#include <string>

#include "obfus/simd/kernels.hpp"

namespace obfus::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if OBFUS_SIMD_X86 && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Isa::Neon: return OBFUS_SIMD_NEON != 0;
  }
  return false;
}

namespace {

Isa detect() {
  if (const char* forced = std::getenv("OBFUS_SIMD")) {
    std::string v(forced);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (v == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa best_isa() {
  static const Isa isa = detect();
  return isa;
}

void eval(const Program& program, std::span<std::uint64_t> values, std::size_t words, Isa isa) {
  switch (isa) {
    case Isa::Avx2:
      if (isa_available(Isa::Avx2)) return eval_avx2(program, values, words);
      break;
    case Isa::Neon:
      if (isa_available(Isa::Neon)) return eval_neon(program, values, words);
      break;
    case Isa::Scalar: break;
  }
  eval_scalar(program, values, words);
}

}  // namespace obfus::simd
