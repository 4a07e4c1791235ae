#pragma once

// Bit-parallel gate evaluation. Each net carries `words` 64-bit lanes, one
// input pattern per bit. The scalar kernel is the reference; the vector
// kernels must produce bit-identical results and are picked at runtime.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "obfus/netlist.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define OBFUS_SIMD_X86 1
#else
#define OBFUS_SIMD_X86 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define OBFUS_SIMD_NEON 1
#else
#define OBFUS_SIMD_NEON 0
#endif

namespace obfus::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// True when the kernel is compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Widest available kernel; `OBFUS_SIMD=scalar|avx2|neon` overrides.
Isa best_isa();

struct Op {
  GateKind kind;
  std::uint32_t out;
  std::uint32_t first;  // offset into Program::operands
  std::uint32_t count;
};

/// Gates in evaluation order over dense net indices.
struct Program {
  std::uint32_t net_count = 0;
  std::vector<Op> ops;
  std::vector<std::uint32_t> operands;
};

/// Ops follow the graph's topological order; net indices are NetIds.
Program compile(const NetGraph& graph);

/// `values` is net-major: net n occupies [n * words, (n + 1) * words).
/// Input nets must be filled by the caller; every op output is overwritten.
void eval_scalar(const Program& program, std::span<std::uint64_t> values, std::size_t words);
void eval_avx2(const Program& program, std::span<std::uint64_t> values, std::size_t words);
void eval_neon(const Program& program, std::span<std::uint64_t> values, std::size_t words);

void eval(const Program& program, std::span<std::uint64_t> values, std::size_t words,
          Isa isa);

inline void eval(const Program& program, std::span<std::uint64_t> values,
                 std::size_t words) {
  eval(program, values, words, best_isa());
}

}  // namespace obfus::simd
