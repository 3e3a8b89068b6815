#pragma once

#include "ricsim/apps.hpp"
#include "ricsim/detect.hpp"
#include "ricsim/event_log.hpp"
#include "ricsim/fabric.hpp"
#include "ricsim/pmon.hpp"
#include "ricsim/resolve.hpp"
#include "ricsim/supervisor.hpp"

// Log payload encodings. Cells are encoded by index; the scenario-loaded entry
// carries the index -> name table.
namespace ricsim {

Json to_json(const Target& t);
Target target_from_json(const Json& j);

Json to_json(const ControlDecision& d);
ControlDecision decision_from_json(const Json& j);

Json to_json(const PolicyConstraint& c);
PolicyConstraint constraint_from_json(const Json& j);

Json to_json(const ConflictRecord& r);
Json to_json(const ResolutionAction& a);
Json to_json(const ResolutionOutcome& o);
ResolutionOutcome outcome_from_json(const Json& j);
Json to_json(const Reassignment& r);
Json to_json(const CmActivityReport& r);
Json to_json(const KpiAlert& a);

Json to_json(const CellKpis& k);
CellKpis cell_kpis_from_json(const Json& j);
Json frame_to_json(const KpiFrame& f);
KpiFrame frame_from_json(Tick tick, const Json& cells);

}  // namespace ricsim
