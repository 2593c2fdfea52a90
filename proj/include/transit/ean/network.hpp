#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "transit/ean/ean.hpp"
#include "transit/ptn/instance.hpp"
#include "transit/ptn/turnarounds.hpp"

namespace transit::ean {

// Shared, immutable input of the transport stages: the instance with all
// deadheads filled in and its extended event-activity network. Extension only
// appends, so the base events and activities form a prefix of `net`.
struct Network {
  ptn::PtnInstance inst;
  Ean net;
  std::size_t base_events = 0;
  std::size_t base_activities = 0;
  std::vector<std::pair<std::pair<int, int>, double>> od;  // positive demands

  int line_index(int line_id) const { return static_cast<int>(inst.line_pos(line_id)); }
};

inline std::shared_ptr<const Network> make_network(const ptn::PtnInstance& inst) {
  auto n = std::make_shared<Network>();
  n->inst = ptn::derive_turnarounds(inst);
  Ean base = build_ean(n->inst);
  n->base_events = base.events.size();
  n->base_activities = base.activities.size();
  n->net = extend_for_routing(std::move(base), n->inst);
  n->od = n->inst.demands();
  return n;
}

}  // namespace transit::ean
