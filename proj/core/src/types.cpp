#include "ricsim/types.hpp"

namespace ricsim {

std::string_view to_string(ParamKind p) {
  switch (p) {
    case ParamKind::kCio:
      return "cio";
    case ParamKind::kTxPower:
      return "tx_power";
    case ParamKind::kTtt:
      return "ttt";
  }
  return "?";
}

std::string_view to_string(KpiKind k) {
  switch (k) {
    case KpiKind::kLoad:
      return "load";
    case KpiKind::kPingpong:
      return "pingpong";
    case KpiKind::kHof:
      return "hof";
    case KpiKind::kEnergy:
      return "energy";
  }
  return "?";
}

ParamKind param_from_string(std::string_view s) {
  for (ParamKind p : kAllParams) {
    if (to_string(p) == s) return p;
  }
  throw ValidationError("unknown parameter '" + std::string(s) + "'");
}

KpiKind kpi_from_string(std::string_view s) {
  for (KpiKind k : kAllKpis) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown kpi '" + std::string(s) + "'");
}

std::string_view to_string(ConflictClass c) {
  switch (c) {
    case ConflictClass::kC1:
      return "C1";
    case ConflictClass::kC2:
      return "C2";
    case ConflictClass::kC3:
      return "C3";
    case ConflictClass::kC4:
      return "C4";
    case ConflictClass::kC5:
      return "C5";
  }
  return "?";
}

ConflictClass class_from_string(std::string_view s) {
  for (ConflictClass c : kAllClasses) {
    if (to_string(c) == s) return c;
  }
  throw ValidationError("unknown conflict class '" + std::string(s) + "'");
}

}  // namespace ricsim
