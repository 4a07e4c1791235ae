#include "obfus/simd/kernels.hpp"

#if OBFUS_SIMD_X86
#include <immintrin.h>
#endif

namespace obfus::simd {

namespace detail {
void eval_op_tail(const Program& p, const Op& op, std::uint64_t* values, std::size_t words,
                  std::size_t begin);
}

#if OBFUS_SIMD_X86

namespace {

#define OBFUS_AVX2 __attribute__((target("avx2")))

OBFUS_AVX2 inline __m256i load(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

OBFUS_AVX2 inline void store(std::uint64_t* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

OBFUS_AVX2 void eval_op(const Program& p, const Op& op, std::uint64_t* v, std::size_t words,
                        std::size_t vec_end) {
  const std::uint32_t* in = p.operands.data() + op.first;
  std::uint64_t* out = v + static_cast<std::size_t>(op.out) * words;
  auto src = [v, in, words](std::uint32_t k) {
    return v + static_cast<std::size_t>(in[k]) * words;
  };
  const __m256i ones = _mm256_set1_epi64x(-1);

  switch (op.kind) {
    case GateKind::And:
    case GateKind::Nand: {
      const __m256i invert = op.kind == GateKind::Nand ? ones : _mm256_setzero_si256();
      for (std::size_t w = 0; w < vec_end; w += 4) {
        __m256i acc = load(src(0) + w);
        for (std::uint32_t k = 1; k < op.count; ++k) acc = _mm256_and_si256(acc, load(src(k) + w));
        store(out + w, _mm256_xor_si256(acc, invert));
      }
      break;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      const __m256i invert = op.kind == GateKind::Nor ? ones : _mm256_setzero_si256();
      for (std::size_t w = 0; w < vec_end; w += 4) {
        __m256i acc = load(src(0) + w);
        for (std::uint32_t k = 1; k < op.count; ++k) acc = _mm256_or_si256(acc, load(src(k) + w));
        store(out + w, _mm256_xor_si256(acc, invert));
      }
      break;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      const __m256i invert = op.kind == GateKind::Xnor ? ones : _mm256_setzero_si256();
      for (std::size_t w = 0; w < vec_end; w += 4) {
        __m256i acc = load(src(0) + w);
        for (std::uint32_t k = 1; k < op.count; ++k) acc = _mm256_xor_si256(acc, load(src(k) + w));
        store(out + w, _mm256_xor_si256(acc, invert));
      }
      break;
    }
    case GateKind::Not:
      for (std::size_t w = 0; w < vec_end; w += 4) {
        store(out + w, _mm256_xor_si256(load(src(0) + w), ones));
      }
      break;
    case GateKind::Buff:
      for (std::size_t w = 0; w < vec_end; w += 4) store(out + w, load(src(0) + w));
      break;
    case GateKind::Mux: {
      const std::uint64_t* s = src(0);
      const std::uint64_t* a = src(1);
      const std::uint64_t* b = src(2);
      for (std::size_t w = 0; w < vec_end; w += 4) {
        __m256i sv = load(s + w);
        // andnot(x, y) = ~x & y
        store(out + w, _mm256_or_si256(_mm256_andnot_si256(sv, load(a + w)),
                                       _mm256_and_si256(sv, load(b + w))));
      }
      break;
    }
  }
}

}  // namespace

void eval_avx2(const Program& program, std::span<std::uint64_t> values, std::size_t words) {
  const std::size_t vec_end = words & ~std::size_t{3};
  for (const Op& op : program.ops) {
    eval_op(program, op, values.data(), words, vec_end);
    if (vec_end != words) detail::eval_op_tail(program, op, values.data(), words, vec_end);
  }
}

#else

void eval_avx2(const Program& program, std::span<std::uint64_t> values, std::size_t words) {
  eval_scalar(program, values, words);
}

#endif

}  // namespace obfus::simd
