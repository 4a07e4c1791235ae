#include "obfus/simulate.hpp"

#include <algorithm>

#include "obfus/error.hpp"

namespace obfus {

PackedSimulator::PackedSimulator(const Netlist& netlist, simd::Isa isa)
    : graph_(netlist), program_(simd::compile(graph_)), isa_(isa) {}

void PackedSimulator::run(std::span<const std::uint64_t> inputs, std::size_t words) {
  const std::size_t pis = graph_.input_count();
  if (inputs.size() != pis * words) {
    throw InputError("packed input size " + std::to_string(inputs.size()) + " != " +
                     std::to_string(pis) + " inputs x " + std::to_string(words) + " words");
  }
  words_ = words;
  values_.assign(graph_.net_count() * words, 0);
  std::copy(inputs.begin(), inputs.end(), values_.begin());
  simd::eval(program_, values_, words, isa_);
}

std::span<const std::uint64_t> PackedSimulator::net(NetId id) const {
  return std::span<const std::uint64_t>(values_).subspan(static_cast<std::size_t>(id) * words_,
                                                         words_);
}

std::span<const std::uint64_t> PackedSimulator::output(std::size_t po_index) const {
  return net(graph_.output_ids()[po_index]);
}

Bits PackedSimulator::evaluate(const Bits& inputs) {
  if (inputs.size() != graph_.input_count()) {
    throw InputError("expected " + std::to_string(graph_.input_count()) + " input bits, got " +
                     std::to_string(inputs.size()));
  }
  std::vector<std::uint64_t> words(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) words[i] = inputs[i] ? 1 : 0;
  run(words, 1);
  Bits out(graph_.output_ids().size());
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = (output(o)[0] & 1) != 0;
  return out;
}

Assignment simulate(const Netlist& netlist, const Assignment& inputs) {
  PackedSimulator sim(netlist, simd::Isa::Scalar);
  Bits in;
  in.reserve(netlist.inputs.size());
  for (const auto& pi : netlist.inputs) {
    auto it = inputs.find(pi);
    if (it == inputs.end()) throw InputError("missing value for primary input '" + pi + "'");
    in.push_back(it->second);
  }
  for (const auto& [name, _] : inputs) {
    if (std::find(netlist.inputs.begin(), netlist.inputs.end(), name) == netlist.inputs.end()) {
      throw InputError("'" + name + "' is not a primary input");
    }
  }
  Bits out = sim.evaluate(in);
  Assignment result;
  for (std::size_t o = 0; o < out.size(); ++o) result[netlist.outputs[o]] = out[o];
  return result;
}

void exhaustive_patterns(std::size_t input_count, std::uint64_t first_word, std::size_t words,
                         std::span<std::uint64_t> out) {
  static constexpr std::uint64_t kLowMasks[6] = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  for (std::size_t i = 0; i < input_count; ++i) {
    std::uint64_t* dst = out.data() + i * words;
    for (std::size_t w = 0; w < words; ++w) {
      if (i < 6) {
        dst[w] = kLowMasks[i];
      } else {
        dst[w] = ((first_word + w) >> (i - 6)) & 1 ? ~0ULL : 0ULL;
      }
    }
  }
}

}  // namespace obfus
