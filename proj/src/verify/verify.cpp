#include "obfus/verify.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "obfus/error.hpp"

namespace obfus {

std::string_view to_string(VerifyMode m) {
  switch (m) {
    case VerifyMode::Auto: return "auto";
    case VerifyMode::Exhaustive: return "exhaustive";
    case VerifyMode::Sat: return "sat";
  }
  return "?";
}

std::string_view to_string(FunctionalResult::Kind k) {
  switch (k) {
    case FunctionalResult::Kind::Equivalent: return "equivalent";
    case FunctionalResult::Kind::Mismatch: return "mismatch";
    case FunctionalResult::Kind::Skipped: return "skipped";
  }
  return "?";
}

std::vector<std::string> structural_check(const Netlist& locked, const std::vector<NetName>& key_inputs,
                                          const Netlist& original, std::string_view key_prefix) {
  std::vector<std::string> diags;
  for (const auto& d : validate(locked)) diags.push_back("locked netlist invalid: " + d.message);

  if (locked.inputs.size() != original.inputs.size() + key_inputs.size()) {
    diags.push_back("locked netlist has " + std::to_string(locked.inputs.size()) + " inputs, expected " +
                    std::to_string(original.inputs.size()) + " + " + std::to_string(key_inputs.size()));
  }
  std::set<NetName> locked_pis(locked.inputs.begin(), locked.inputs.end());
  for (const auto& k : key_inputs) {
    if (k.rfind(key_prefix, 0) != 0) {
      diags.push_back("key input '" + k + "' lacks the prefix '" + std::string(key_prefix) + "'");
    }
    if (!locked_pis.count(k)) diags.push_back("key input '" + k + "' is not a primary input");
  }
  for (const auto& pi : original.inputs) {
    if (!locked_pis.count(pi)) diags.push_back("original input '" + pi + "' missing from locked netlist");
  }
  std::set<NetName> lo(locked.outputs.begin(), locked.outputs.end());
  std::set<NetName> oo(original.outputs.begin(), original.outputs.end());
  for (const auto& po : oo) {
    if (!lo.count(po)) diags.push_back("original output '" + po + "' missing from locked netlist");
  }
  for (const auto& po : lo) {
    if (!oo.count(po)) diags.push_back("locked netlist has extra output '" + po + "'");
  }
  return diags;
}

namespace {

Assignment with_key(Assignment x, const std::vector<NetName>& key_inputs, const Key& key) {
  for (std::size_t i = 0; i < key_inputs.size(); ++i) x[key_inputs[i]] = key.bits[i] != 0;
  return x;
}

FunctionalResult exhaustive(const Netlist& locked, const std::vector<NetName>& key_inputs,
                            const Netlist& original, const Key& key, std::uint64_t& vectors) {
  const std::size_t n = original.inputs.size();
  PackedSimulator ref(original);
  PackedSimulator sim(locked);
  const NetGraph& g = sim.graph();

  std::vector<std::ptrdiff_t> row(g.input_count(), -1);
  std::vector<std::uint64_t> fixed(g.input_count(), 0);
  for (NetId i = 0; i < g.input_count(); ++i) {
    const auto& name = g.name(i);
    auto k = std::find(key_inputs.begin(), key_inputs.end(), name);
    if (k != key_inputs.end()) {
      fixed[i] = key.bits[static_cast<std::size_t>(k - key_inputs.begin())] ? ~0ULL : 0ULL;
    } else {
      row[i] = std::find(original.inputs.begin(), original.inputs.end(), name) - original.inputs.begin();
    }
  }
  std::vector<std::size_t> ref_po;
  for (const auto& po : locked.outputs) {
    ref_po.push_back(static_cast<std::size_t>(
        std::find(original.outputs.begin(), original.outputs.end(), po) - original.outputs.begin()));
  }

  const std::uint64_t total_words = n < 6 ? 1 : (std::uint64_t{1} << (n - 6));
  const std::uint64_t last_mask = n < 6 ? (std::uint64_t{1} << (std::uint64_t{1} << n)) - 1 : ~0ULL;
  const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(total_words, 1024));
  std::vector<std::uint64_t> ref_in(n * chunk);
  std::vector<std::uint64_t> in(g.input_count() * chunk);

  FunctionalResult r;
  r.kind = FunctionalResult::Kind::Equivalent;
  vectors = n < 6 ? (std::uint64_t{1} << n) : 0;
  for (std::uint64_t first = 0; first < total_words; first += chunk) {
    const std::size_t words = static_cast<std::size_t>(std::min<std::uint64_t>(chunk, total_words - first));
    ref_in.resize(n * words);
    in.resize(g.input_count() * words);
    exhaustive_patterns(n, first, words, ref_in);
    ref.run(ref_in, words);
    for (NetId i = 0; i < g.input_count(); ++i) {
      for (std::size_t w = 0; w < words; ++w) {
        in[i * words + w] = row[i] >= 0 ? ref_in[static_cast<std::size_t>(row[i]) * words + w] : fixed[i];
      }
    }
    sim.run(in, words);
    if (n >= 6) vectors += words * 64;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t any = 0;
      for (std::size_t o = 0; o < locked.outputs.size(); ++o) {
        any |= sim.output(o)[w] ^ ref.output(ref_po[o])[w];
      }
      any &= last_mask;
      if (!any) continue;
      const std::uint64_t p = (first + w) * 64 + static_cast<std::uint64_t>(std::countr_zero(any));
      Assignment x;
      for (std::size_t i = 0; i < n; ++i) x[original.inputs[i]] = ((p >> i) & 1) != 0;
      if (simulate(locked, with_key(x, key_inputs, key)) == simulate(original, x)) {
        throw std::logic_error("exhaustive counterexample does not reproduce in simulation");
      }
      r.kind = FunctionalResult::Kind::Mismatch;
      r.counterexample = std::move(x);
      return r;
    }
  }
  return r;
}

}  // namespace

Verdict functional_verify(const Netlist& locked, const std::vector<NetName>& key_inputs,
                          const Netlist& original, const Key& key, const VerifyOptions& options) {
  if (key.size() != key_inputs.size()) {
    throw VerifyError("key has " + std::to_string(key.size()) + " bits but the locked netlist has " +
                      std::to_string(key_inputs.size()) + " key inputs");
  }
  const std::size_t n = original.inputs.size();
  if (options.mode == VerifyMode::Exhaustive && n > kExhaustiveHardLimit) {
    throw VerifyError("exhaustive verification of " + std::to_string(n) + " inputs refused (limit " +
                      std::to_string(kExhaustiveHardLimit) + "); use the sat mode");
  }

  Verdict v;
  v.diagnostics = structural_check(locked, key_inputs, original, options.key_prefix);
  v.structural_ok = v.diagnostics.empty();
  v.mode_used = options.mode == VerifyMode::Auto
                    ? (n <= kExhaustiveAutoLimit ? VerifyMode::Exhaustive : VerifyMode::Sat)
                    : options.mode;
  if (!v.structural_ok) {
    v.functional.kind = FunctionalResult::Kind::Skipped;
    v.functional.reason = "structural check failed";
    return v;
  }

  if (v.mode_used == VerifyMode::Exhaustive) {
    v.functional = exhaustive(locked, key_inputs, original, key, v.vectors);
    return v;
  }
  auto eq = equivalence_check(apply_key(locked, key_inputs, key), original, options.sat);
  switch (eq.status) {
    case EquivalenceResult::Status::Equivalent:
      v.functional.kind = FunctionalResult::Kind::Equivalent;
      break;
    case EquivalenceResult::Status::Different:
      v.functional.kind = FunctionalResult::Kind::Mismatch;
      v.functional.counterexample = eq.counterexample;
      break;
    case EquivalenceResult::Status::Aborted:
      v.functional.kind = FunctionalResult::Kind::Skipped;
      v.functional.reason = "solver limit reached";
      break;
  }
  return v;
}

}  // namespace obfus
