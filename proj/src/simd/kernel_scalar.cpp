#include "obfus/simd/kernels.hpp"

namespace obfus::simd {

Program compile(const NetGraph& graph) {
  Program p;
  p.net_count = static_cast<std::uint32_t>(graph.net_count());
  p.ops.reserve(graph.netlist().gates.size());
  for (std::size_t gi : graph.topo_gates()) {
    NetId out = static_cast<NetId>(graph.input_count() + gi);
    auto fanins = graph.fanins(out);
    Op op{graph.netlist().gates[gi].kind, out, static_cast<std::uint32_t>(p.operands.size()),
          static_cast<std::uint32_t>(fanins.size())};
    p.operands.insert(p.operands.end(), fanins.begin(), fanins.end());
    p.ops.push_back(op);
  }
  return p;
}

namespace {

// Evaluates lanes [begin, end) of one op. Shared with the vector kernels
// for their tails.
inline void eval_op_range(const Program& p, const Op& op, std::uint64_t* v,
                          std::size_t words, std::size_t begin, std::size_t end) {
  const std::uint32_t* in = p.operands.data() + op.first;
  std::uint64_t* out = v + static_cast<std::size_t>(op.out) * words;
  auto src = [&](std::uint32_t k) { return v + static_cast<std::size_t>(in[k]) * words; };

  switch (op.kind) {
    case GateKind::And:
    case GateKind::Nand: {
      const std::uint64_t invert = op.kind == GateKind::Nand ? ~0ULL : 0ULL;
      for (std::size_t w = begin; w < end; ++w) {
        std::uint64_t acc = src(0)[w];
        for (std::uint32_t k = 1; k < op.count; ++k) acc &= src(k)[w];
        out[w] = acc ^ invert;
      }
      break;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      const std::uint64_t invert = op.kind == GateKind::Nor ? ~0ULL : 0ULL;
      for (std::size_t w = begin; w < end; ++w) {
        std::uint64_t acc = src(0)[w];
        for (std::uint32_t k = 1; k < op.count; ++k) acc |= src(k)[w];
        out[w] = acc ^ invert;
      }
      break;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      const std::uint64_t invert = op.kind == GateKind::Xnor ? ~0ULL : 0ULL;
      for (std::size_t w = begin; w < end; ++w) {
        std::uint64_t acc = src(0)[w];
        for (std::uint32_t k = 1; k < op.count; ++k) acc ^= src(k)[w];
        out[w] = acc ^ invert;
      }
      break;
    }
    case GateKind::Not:
      for (std::size_t w = begin; w < end; ++w) out[w] = ~src(0)[w];
      break;
    case GateKind::Buff:
      for (std::size_t w = begin; w < end; ++w) out[w] = src(0)[w];
      break;
    case GateKind::Mux: {
      const std::uint64_t* s = src(0);
      const std::uint64_t* a = src(1);
      const std::uint64_t* b = src(2);
      for (std::size_t w = begin; w < end; ++w) out[w] = (~s[w] & a[w]) | (s[w] & b[w]);
      break;
    }
  }
}

}  // namespace

namespace detail {
void eval_op_tail(const Program& p, const Op& op, std::uint64_t* values, std::size_t words,
                  std::size_t begin) {
  eval_op_range(p, op, values, words, begin, words);
}
}  // namespace detail

void eval_scalar(const Program& program, std::span<std::uint64_t> values, std::size_t words) {
  for (const Op& op : program.ops) eval_op_range(program, op, values.data(), words, 0, words);
}

}  // namespace obfus::simd
