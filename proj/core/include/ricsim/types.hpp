#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ricsim {

// One tick is one Near-RT control interval.
using Tick = std::int64_t;
using CellIndex = int;
using DecisionId = std::uint64_t;

inline constexpr CellIndex kNoCell = -1;

enum class ParamKind { kCio, kTxPower, kTtt };
enum class KpiKind { kLoad, kPingpong, kHof, kEnergy };

inline constexpr std::array<ParamKind, 3> kAllParams{ParamKind::kCio, ParamKind::kTxPower,
                                                     ParamKind::kTtt};
inline constexpr std::array<KpiKind, 4> kAllKpis{KpiKind::kLoad, KpiKind::kPingpong, KpiKind::kHof,
                                                 KpiKind::kEnergy};

// C1 direct-intra, C2 indirect-intra, C3 implicit, C4 inter-RIC, C5 cross-loop.
enum class ConflictClass { kC1, kC2, kC3, kC4, kC5 };

inline constexpr std::array<ConflictClass, 5> kAllClasses{
    ConflictClass::kC1, ConflictClass::kC2, ConflictClass::kC3, ConflictClass::kC4,
    ConflictClass::kC5};

std::string_view to_string(ParamKind p);
std::string_view to_string(KpiKind k);
ParamKind param_from_string(std::string_view s);
KpiKind kpi_from_string(std::string_view s);
std::string_view to_string(ConflictClass c);
ConflictClass class_from_string(std::string_view s);

// A controllable parameter instance: cio is per directed neighbor pair, the
// others are per cell (neighbor stays kNoCell).
struct Target {
  ParamKind param = ParamKind::kCio;
  CellIndex cell = 0;
  CellIndex neighbor = kNoCell;

  auto operator<=>(const Target&) const = default;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ricsim
