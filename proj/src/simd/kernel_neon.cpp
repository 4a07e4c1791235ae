#include "obfus/simd/kernels.hpp"

#if OBFUS_SIMD_NEON
#include <arm_neon.h>
#endif

namespace obfus::simd {

namespace detail {
void eval_op_tail(const Program& p, const Op& op, std::uint64_t* values, std::size_t words,
                  std::size_t begin);
}

#if OBFUS_SIMD_NEON

namespace {

inline uint64x2_t vnot(uint64x2_t v) {
  return vreinterpretq_u64_u32(vmvnq_u32(vreinterpretq_u32_u64(v)));
}

void eval_op(const Program& p, const Op& op, std::uint64_t* v, std::size_t words,
             std::size_t vec_end) {
  const std::uint32_t* in = p.operands.data() + op.first;
  std::uint64_t* out = v + static_cast<std::size_t>(op.out) * words;
  auto src = [v, in, words](std::uint32_t k) {
    return v + static_cast<std::size_t>(in[k]) * words;
  };
  const bool invert = op.kind == GateKind::Nand || op.kind == GateKind::Nor ||
                      op.kind == GateKind::Xnor || op.kind == GateKind::Not;

  for (std::size_t w = 0; w < vec_end; w += 2) {
    uint64x2_t acc = vld1q_u64(src(0) + w);
    switch (op.kind) {
      case GateKind::And:
      case GateKind::Nand:
        for (std::uint32_t k = 1; k < op.count; ++k) acc = vandq_u64(acc, vld1q_u64(src(k) + w));
        break;
      case GateKind::Or:
      case GateKind::Nor:
        for (std::uint32_t k = 1; k < op.count; ++k) acc = vorrq_u64(acc, vld1q_u64(src(k) + w));
        break;
      case GateKind::Xor:
      case GateKind::Xnor:
        for (std::uint32_t k = 1; k < op.count; ++k) acc = veorq_u64(acc, vld1q_u64(src(k) + w));
        break;
      case GateKind::Not:
      case GateKind::Buff:
        break;
      case GateKind::Mux:
        // vbslq picks bits of the second operand where the mask is set.
        acc = vbslq_u64(acc, vld1q_u64(src(2) + w), vld1q_u64(src(1) + w));
        break;
    }
    vst1q_u64(out + w, invert ? vnot(acc) : acc);
  }
}

}  // namespace

void eval_neon(const Program& program, std::span<std::uint64_t> values, std::size_t words) {
  const std::size_t vec_end = words & ~std::size_t{1};
  for (const Op& op : program.ops) {
    eval_op(program, op, values.data(), words, vec_end);
    if (vec_end != words) detail::eval_op_tail(program, op, values.data(), words, vec_end);
  }
}

#else

void eval_neon(const Program& program, std::span<std::uint64_t> values, std::size_t words) {
  eval_scalar(program, values, words);
}

#endif

}  // namespace obfus::simd
