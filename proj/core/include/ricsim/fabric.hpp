#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ricsim/apps.hpp"
#include "ricsim/event_log.hpp"
#include "ricsim/ran_model.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

struct RicSpec {
  std::string id;
  std::vector<CellIndex> owned;
  std::vector<CellIndex> boundary;

  bool owns(CellIndex c) const;
  bool on_boundary(CellIndex c) const;
  bool operator==(const RicSpec&) const = default;
};

// Near-RT RICs partition the cells; the Non-RT RIC relays everything between
// them with a fixed propagation delay.
struct RicTopology {
  std::vector<RicSpec> near_rt;
  std::string non_rt = "non-rt";
  Tick delay = 5;

  // Throws ValidationError unless owned sets partition the cells and boundary
  // sets are subsets of owned sets.
  void validate(const Topology& topo) const;

  const RicSpec& ric(std::string_view id) const;
  std::optional<std::string> owner(CellIndex c) const;
  // A RIC controls a target when it owns the source cell. A cio relation whose
  // destination it owns is shared with the neighboring segment.
  bool controls(std::string_view ric_id, const Target& t) const;
  // Cells adjacent to a cell of another segment.
  static std::vector<CellIndex> derive_boundary(const Topology& topo,
                                                const std::vector<RicSpec>& rics,
                                                std::size_t which);

  bool operator==(const RicTopology&) const = default;
};

struct ActuationRecord {
  DecisionId decision = 0;
  std::string app;
  Target target;
  double value = 0.0;
  double previous = 0.0;
  Tick tick = 0;

  bool operator==(const ActuationRecord&) const = default;
};

// Enrichment payload describing one RIC's CM activity since its previous
// report. Immutable once published.
struct CmActivityReport {
  std::string origin;
  Tick published = 0;
  std::vector<ActuationRecord> actuations;
  std::vector<std::pair<std::string, ConflictClass>> conflicts;
  std::vector<std::string> alerts;
  std::string policy_digest;

  bool operator==(const CmActivityReport&) const = default;
};

struct PolicyUpdate {
  std::string id;
  Json body;

  bool operator==(const PolicyUpdate&) const = default;
};

using FabricPayload = std::variant<CmActivityReport, PolicyConstraint, PolicyUpdate>;

struct Delivery {
  Tick sent = 0;
  Tick due = 0;
  std::string to;
  FabricPayload payload;
  std::uint64_t seq = 0;

  bool operator==(const Delivery&) const = default;
};

// Reliable, in-order, fixed-delay hub-and-spoke relay through the Non-RT RIC.
class Fabric {
 public:
  Fabric() = default;
  explicit Fabric(RicTopology topo) : topo_(std::move(topo)) {}

  const RicTopology& topology() const { return topo_; }

  // Queues the report for every Near-RT RIC except its origin.
  void publish(const CmActivityReport& report);
  // Queues a constraint for each RIC owning a cell in its scope.
  void register_policy(const PolicyConstraint& c, Tick tick);
  // Queues an MNO policy update for every Near-RT RIC.
  void register_update(const PolicyUpdate& u, Tick tick);

  // Removes and returns every queued message due at or before `now`, in
  // (due, enqueue order).
  std::vector<Delivery> distribute(Tick now);

  std::size_t in_flight() const { return queue_.size(); }
  bool operator==(const Fabric&) const = default;

 private:
  void enqueue(std::string to, FabricPayload payload, Tick sent);

  RicTopology topo_;
  std::vector<Delivery> queue_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace ricsim
