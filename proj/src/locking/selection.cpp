#include <algorithm>
#include <numeric>

#include "obfus/error.hpp"
#include "obfus/locking.hpp"
#include "obfus/rng.hpp"
#include "obfus/scoap.hpp"

namespace obfus {

std::vector<NetName> key_inputs_of(const Netlist& netlist, std::string_view key_prefix) {
  std::vector<NetName> out;
  for (const auto& pi : netlist.inputs) {
    if (pi.rfind(key_prefix, 0) == 0) out.push_back(pi);
  }
  return out;
}

std::vector<NetName> eligible_nets(const Netlist& netlist, std::string_view key_prefix) {
  std::vector<NetName> out;
  for (const auto& pi : netlist.inputs) {
    if (pi.rfind(key_prefix, 0) != 0) out.push_back(pi);
  }
  for (const auto& g : netlist.gates) out.push_back(g.output);
  return out;
}

namespace {

// Sort key: larger score first, then name ascending.
struct Scored {
  NetId id;
  std::uint64_t score;
};

std::vector<NetId> rank(const NetGraph& graph, std::vector<Scored> scored) {
  std::stable_sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return graph.name(a.id) < graph.name(b.id);
  });
  std::vector<NetId> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.id);
  return out;
}

std::size_t count(const std::vector<bool>& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

std::vector<NetId> cone_ranking(const NetGraph& graph, const std::vector<NetId>& pool) {
  std::vector<Scored> scored;
  for (NetId id : pool) {
    scored.push_back({id, count(graph.tfi_mask(id)) + count(graph.tfo_mask(id))});
  }
  return rank(graph, std::move(scored));
}

}  // namespace

std::vector<NetName> select_nets(const Netlist& netlist, Selection strategy, std::size_t k,
                                 std::uint64_t seed, std::string_view key_prefix) {
  if (k == 0) return {};
  NetGraph graph(netlist);
  std::vector<NetId> pool;
  for (const auto& name : eligible_nets(netlist, key_prefix)) pool.push_back(graph.id(name));
  if (k > pool.size()) {
    throw SelectionError("cannot select " + std::to_string(k) + " nets: only " +
                         std::to_string(pool.size()) + " eligible nets");
  }

  std::vector<NetId> chosen;
  switch (strategy) {
    case Selection::Random: {
      Rng rng = Rng::stream(seed, rng_stream::kSelect);
      chosen = rng.sample(pool, k);
      break;
    }
    case Selection::ConeSize: {
      chosen = cone_ranking(graph, pool);
      chosen.resize(k);
      break;
    }
    case Selection::Scoap: {
      ScoapMetrics m = scoap(graph);
      std::vector<Scored> scored;
      for (NetId id : pool) {
        const auto& t = m[id];
        // Unobservable nets cannot corrupt an output; they rank last.
        std::uint64_t score = t.co >= kUnobservable ? 0 : t.cc0 + t.cc1 + t.co;
        scored.push_back({id, score});
      }
      chosen = rank(graph, std::move(scored));
      chosen.resize(k);
      break;
    }
    case Selection::FanHeavy: {
      std::vector<Scored> scored;
      for (NetId id : pool) {
        std::uint64_t fanout = graph.loads(id).size() + graph.output_slots(id);
        std::uint64_t arity = graph.fanins(id).size();
        scored.push_back({id, fanout * arity});
      }
      chosen = rank(graph, std::move(scored));
      chosen.resize(k);
      break;
    }
    case Selection::Sll: {
      std::vector<bool> blocked(graph.net_count(), false);
      for (NetId id : cone_ranking(graph, pool)) {
        if (blocked[id]) continue;
        chosen.push_back(id);
        if (chosen.size() == k) break;
        blocked[id] = true;
        auto in = graph.tfi_mask(id);
        auto out = graph.tfo_mask(id);
        for (std::size_t i = 0; i < blocked.size(); ++i) {
          if (in[i] || out[i]) blocked[i] = true;
        }
      }
      if (chosen.size() < k) {
        throw SelectionError("sll selection found only " + std::to_string(chosen.size()) +
                             " path-disjoint nets for key size " + std::to_string(k) +
                             "; use a smaller key size");
      }
      break;
    }
  }

  std::vector<NetName> out;
  out.reserve(chosen.size());
  for (NetId id : chosen) out.push_back(graph.name(id));
  return out;
}

}  // namespace obfus
