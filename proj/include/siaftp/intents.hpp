#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "siaftp/errors.hpp"

namespace siaftp {

// 16-class controlling-intent taxonomy: 6 maneuvering intents plus 10
// non-maneuvering classes that only appear in the text subset.
enum class Intent : int {
  kAltAdj = 0,
  kOffset = 1,
  kCanoff = 2,
  kFlyto = 3,
  kSpdAdj = 4,
  kHeadAdjFlyto = 5,
  kHandoff = 6,
  kSquawk = 7,
  kQnh = 8,
  kReportPos = 9,
  kHold = 10,
  kContact = 11,
  kReadback = 12,
  kTaxi = 13,
  kApproach = 14,
  kMisc = 15,
};

inline constexpr int kNumIntentClasses = 16;
inline constexpr int kNumManeuverIntents = 6;

inline const std::array<std::string, kNumIntentClasses>& intent_names() {
  static const std::array<std::string, kNumIntentClasses> names = {
      "ALT_ADJ", "OFFSET", "CANOFF",     "FLYTO", "SPD_ADJ", "HEAD_ADJ&FLYTO",
      "HANDOFF", "SQUAWK", "QNH",        "REPORT_POS", "HOLD", "CONTACT",
      "READBACK", "TAXI",  "APPROACH",   "MISC"};
  return names;
}

inline const std::string& intent_name(Intent i) {
  return intent_names()[static_cast<std::size_t>(i)];
}

inline Intent intent_from_name(const std::string& name) {
  const auto& names = intent_names();
  for (int i = 0; i < kNumIntentClasses; ++i)
    if (names[static_cast<std::size_t>(i)] == name)
      return static_cast<Intent>(i);
  throw std::invalid_argument("unknown intent class: " + name);
}

inline bool is_maneuvering(Intent i) {
  return static_cast<int>(i) < kNumManeuverIntents;
}

enum class Side { kLeft, kRight };
enum class TurnDir { kLeft, kRight };

inline const char* side_word(Side s) { return s == Side::kLeft ? "left" : "right"; }
inline const char* turn_word(TurnDir d) {
  return d == TurnDir::kLeft ? "left" : "right";
}

// One controlling instruction: the intent set plus the parameters required by
// the maneuvering intents it contains.
struct IntentSpec {
  std::vector<Intent> intents;  // ascending class order, no duplicates

  double pilot_delay_s = 0.0;  // seconds between confirmation and execution

  std::optional<double> target_alt_m;     // ALT_ADJ
  std::optional<int> offset_miles;        // OFFSET (and CANOFF initial state)
  std::optional<Side> offset_side;        // OFFSET / CANOFF
  std::optional<std::string> waypoint;    // FLYTO / HEAD_ADJ&FLYTO
  std::optional<double> target_speed_mps; // SPD_ADJ
  std::optional<TurnDir> turn_dir;        // HEAD_ADJ&FLYTO

  bool has(Intent i) const {
    for (Intent x : intents)
      if (x == i) return true;
    return false;
  }

  bool maneuvering() const {
    for (Intent x : intents)
      if (is_maneuvering(x)) return true;
    return false;
  }

  void validate() const {
    if (pilot_delay_s < 0.0 || pilot_delay_s > 40.0)
      throw std::invalid_argument("pilot delay must lie in [0, 40] s");
    auto require = [&](Intent i, bool present, const char* what) {
      if (has(i) && !present)
        throw std::invalid_argument(std::string("intent ") + intent_name(i) +
                                    " requires parameter " + what);
      if (!has(i) && present && strict_param_owner(i))
        throw std::invalid_argument(std::string("parameter ") + what +
                                    " present without intent " +
                                    intent_name(i));
    };
    require(Intent::kAltAdj, target_alt_m.has_value(), "target_alt_m");
    require(Intent::kOffset, offset_miles.has_value() && offset_side.has_value(),
            "offset_miles/offset_side");
    require(Intent::kSpdAdj, target_speed_mps.has_value(), "target_speed_mps");
    require(Intent::kHeadAdjFlyto,
            waypoint.has_value() && turn_dir.has_value(),
            "waypoint/turn_dir");
    if (has(Intent::kFlyto) && !waypoint)
      throw std::invalid_argument("intent FLYTO requires parameter waypoint");
  }

 private:
  // Parameters shared between intents (offset fields also describe the CANOFF
  // initial state, waypoint is shared by FLYTO variants) are exempt from the
  // present-iff-required check.
  static bool strict_param_owner(Intent i) {
    return i == Intent::kAltAdj || i == Intent::kSpdAdj;
  }
};

}  // namespace siaftp
