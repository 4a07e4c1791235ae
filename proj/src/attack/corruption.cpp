#include <algorithm>
#include <bit>

#include "obfus/attack.hpp"
#include "obfus/error.hpp"
#include "obfus/locking.hpp"
#include "obfus/rng.hpp"

namespace obfus {

namespace {

CorruptionStats measure(const Netlist& locked, const Oracle& oracle, const std::vector<Key>& keys,
                        std::size_t inputs, Rng& rng, std::string_view key_prefix) {
  if (keys.empty() || inputs == 0) throw StatError("corruption sampling needs at least one key and one input");
  const auto key_names = key_inputs_of(locked, key_prefix);
  if (key_names.empty()) throw StatError("key width 0: no wrong keys exist");
  for (const auto& k : keys) {
    if (k.size() != key_names.size()) {
      throw StatError("key has " + std::to_string(k.size()) + " bits, the netlist has " +
                      std::to_string(key_names.size()) + " key inputs");
    }
  }
  Netlist visible;
  for (const auto& pi : locked.inputs) {
    if (pi.rfind(key_prefix, 0) != 0) visible.inputs.push_back(pi);
  }
  visible.outputs = locked.outputs;
  check_same_interface(oracle.netlist(), visible);

  const Netlist& ref = oracle.netlist();
  const std::size_t words = (inputs + 63) / 64;
  const std::uint64_t tail = inputs % 64 == 0 ? ~0ULL : (1ULL << (inputs % 64)) - 1;

  std::vector<std::uint64_t> ref_in(ref.inputs.size() * words);
  for (auto& w : ref_in) w = rng.next();
  PackedSimulator ref_sim(ref);
  ref_sim.run(ref_in, words);

  PackedSimulator sim(locked);
  const NetGraph& g = sim.graph();
  std::vector<std::ptrdiff_t> row(g.input_count(), -1);  // reference PI row, -1 for key inputs
  std::vector<std::size_t> key_index(g.input_count(), 0);
  for (NetId i = 0; i < g.input_count(); ++i) {
    const auto& name = g.name(i);
    auto it = std::find(key_names.begin(), key_names.end(), name);
    if (it != key_names.end()) {
      key_index[i] = static_cast<std::size_t>(it - key_names.begin());
    } else {
      row[i] = std::find(ref.inputs.begin(), ref.inputs.end(), name) - ref.inputs.begin();
    }
  }
  std::vector<std::size_t> ref_po;
  for (const auto& po : locked.outputs) {
    ref_po.push_back(static_cast<std::size_t>(std::find(ref.outputs.begin(), ref.outputs.end(), po) -
                                              ref.outputs.begin()));
  }

  std::uint64_t corrupted = 0;
  std::uint64_t hamming = 0;
  std::vector<std::uint64_t> in(g.input_count() * words);
  for (const Key& key : keys) {
    for (NetId i = 0; i < g.input_count(); ++i) {
      for (std::size_t w = 0; w < words; ++w) {
        in[i * words + w] = row[i] >= 0 ? ref_in[static_cast<std::size_t>(row[i]) * words + w]
                                        : (key.bits[key_index[i]] ? ~0ULL : 0ULL);
      }
    }
    sim.run(in, words);
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t mask = w + 1 == words ? tail : ~0ULL;
      std::uint64_t any = 0;
      for (std::size_t o = 0; o < locked.outputs.size(); ++o) {
        std::uint64_t d = (sim.output(o)[w] ^ ref_sim.output(ref_po[o])[w]) & mask;
        any |= d;
        hamming += static_cast<std::uint64_t>(std::popcount(d));
      }
      corrupted += static_cast<std::uint64_t>(std::popcount(any));
    }
  }
  CorruptionStats s;
  s.pairs = keys.size() * inputs;
  s.corruption_rate = static_cast<double>(corrupted) / static_cast<double>(s.pairs);
  s.mean_output_hamming = static_cast<double>(hamming) / static_cast<double>(s.pairs);
  return s;
}

}  // namespace

CorruptionStats corruption_stats(const Netlist& locked, const Oracle& oracle, const Key& correct_key,
                                 const CorruptionSamples& samples, std::uint64_t seed,
                                 std::string_view key_prefix) {
  if (correct_key.size() == 0) throw StatError("key width 0: no wrong keys exist");
  if (samples.wrong_keys == 0 || samples.inputs == 0) {
    throw StatError("wrong_keys and inputs must both be at least 1");
  }
  Rng rng = Rng::stream(seed, rng_stream::kCorruption);
  std::vector<Key> keys;
  keys.reserve(samples.wrong_keys);
  while (keys.size() < samples.wrong_keys) {
    Key k;
    for (std::size_t i = 0; i < correct_key.size(); ++i) k.bits.push_back(rng.bit());
    if (k != correct_key) keys.push_back(std::move(k));
  }
  return measure(locked, oracle, keys, samples.inputs, rng, key_prefix);
}

CorruptionStats corruption_stats_for_keys(const Netlist& locked, const Oracle& oracle,
                                          const std::vector<Key>& keys, std::size_t inputs,
                                          std::uint64_t seed, std::string_view key_prefix) {
  Rng rng = Rng::stream(seed, rng_stream::kCorruption);
  return measure(locked, oracle, keys, inputs, rng, key_prefix);
}

}  // namespace obfus
