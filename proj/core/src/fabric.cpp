#include "ricsim/fabric.hpp"

#include <algorithm>
#include <set>

namespace ricsim {

bool RicSpec::owns(CellIndex c) const {
  return std::find(owned.begin(), owned.end(), c) != owned.end();
}

bool RicSpec::on_boundary(CellIndex c) const {
  return std::find(boundary.begin(), boundary.end(), c) != boundary.end();
}

void RicTopology::validate(const Topology& topo) const {
  if (near_rt.empty()) throw ValidationError("rics: at least one Near-RT RIC required");
  if (delay < 0) throw ValidationError("rics.propagation_delay: must be >= 0");
  std::set<std::string> ids{non_rt};
  std::vector<int> owner_count(topo.size(), 0);
  for (const auto& r : near_rt) {
    if (r.id.empty()) throw ValidationError("rics: empty RIC id");
    if (!ids.insert(r.id).second) throw ValidationError("rics: duplicate RIC id '" + r.id + "'");
    for (CellIndex c : r.owned) {
      if (c < 0 || static_cast<std::size_t>(c) >= topo.size()) {
        throw ValidationError("rics[" + r.id + "].cells: unknown cell");
      }
      ++owner_count[static_cast<std::size_t>(c)];
    }
    for (CellIndex c : r.boundary) {
      if (!r.owns(c)) {
        throw ValidationError("rics[" + r.id + "].boundary: cell '" + topo.name(c) +
                              "' not owned by this RIC");
      }
    }
  }
  for (std::size_t i = 0; i < owner_count.size(); ++i) {
    if (owner_count[i] != 1) {
      throw ValidationError("rics: cell '" + topo.name(static_cast<CellIndex>(i)) +
                            "' must be owned by exactly one Near-RT RIC");
    }
  }
}

const RicSpec& RicTopology::ric(std::string_view id) const {
  for (const auto& r : near_rt) {
    if (r.id == id) return r;
  }
  throw ValidationError("unknown RIC '" + std::string(id) + "'");
}

std::optional<std::string> RicTopology::owner(CellIndex c) const {
  for (const auto& r : near_rt) {
    if (r.owns(c)) return r.id;
  }
  return std::nullopt;
}

bool RicTopology::controls(std::string_view ric_id, const Target& t) const {
  for (const auto& r : near_rt) {
    if (r.id != ric_id) continue;
    if (r.owns(t.cell)) return true;
    return t.param == ParamKind::kCio && r.owns(t.neighbor);
  }
  return false;
}

std::vector<CellIndex> RicTopology::derive_boundary(const Topology& topo,
                                                    const std::vector<RicSpec>& rics,
                                                    std::size_t which) {
  std::vector<CellIndex> out;
  const auto& me = rics.at(which);
  for (CellIndex c : me.owned) {
    bool adjacent = false;
    for (std::size_t j = 0; j < topo.size(); ++j) {
      const auto other = static_cast<CellIndex>(j);
      if (me.owns(other)) continue;
      if (topo.is_neighbor(c, other) || topo.is_neighbor(other, c)) adjacent = true;
    }
    if (adjacent) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Fabric::enqueue(std::string to, FabricPayload payload, Tick sent) {
  queue_.push_back({sent, sent + topo_.delay, std::move(to), std::move(payload), next_seq_++});
}

void Fabric::publish(const CmActivityReport& report) {
  for (const auto& r : topo_.near_rt) {
    if (r.id != report.origin) enqueue(r.id, report, report.published);
  }
}

void Fabric::register_policy(const PolicyConstraint& c, Tick tick) {
  for (const auto& r : topo_.near_rt) {
    const bool relevant = std::any_of(c.scope.begin(), c.scope.end(),
                                      [&](CellIndex cell) { return r.owns(cell); });
    if (relevant) enqueue(r.id, c, tick);
  }
}

void Fabric::register_update(const PolicyUpdate& u, Tick tick) {
  for (const auto& r : topo_.near_rt) enqueue(r.id, u, tick);
}

std::vector<Delivery> Fabric::distribute(Tick now) {
  std::vector<Delivery> due;
  std::vector<Delivery> rest;
  for (auto& d : queue_) {
    (d.due <= now ? due : rest).push_back(std::move(d));
  }
  queue_ = std::move(rest);
  std::stable_sort(due.begin(), due.end(), [](const Delivery& a, const Delivery& b) {
    return a.due != b.due ? a.due < b.due : a.seq < b.seq;
  });
  return due;
}

}  // namespace ricsim
