#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "siaftp/intents.hpp"
#include "siaftp/rng.hpp"

namespace siaftp::synth {

// Digit words. Callsigns may use the radiotelephony variants (tree, fife,
// niner); instruction parameters use the plain words.
inline const char* digit_word(int d, bool icao_variant = false) {
  static const char* plain[] = {"zero", "one", "two",   "three", "four",
                                "five", "six", "seven", "eight", "nine"};
  static const char* icao[] = {"zero", "one", "two",   "tree", "four",
                               "fife", "six", "seven", "eight", "niner"};
  return icao_variant ? icao[d] : plain[d];
}

inline std::string spell_digits(long value, bool icao_variant = false) {
  std::string s = std::to_string(value);
  std::string out;
  for (char c : s) {
    if (!out.empty()) out += ' ';
    out += digit_word(c - '0', icao_variant);
  }
  return out;
}

// Altitude in meters, multiples of 100, verbalized in the thousands form:
// 8400 -> "eight thousand four hundred meters",
// 12200 -> "one two thousand two hundred meters".
inline std::string spell_altitude(double alt_m) {
  long v = std::lround(alt_m);
  long thousands = v / 1000;
  long hundreds = (v % 1000) / 100;
  std::string out;
  if (thousands >= 10)
    out = spell_digits(thousands);
  else
    out = digit_word(static_cast<int>(thousands));
  out += " thousand";
  if (hundreds > 0) {
    out += ' ';
    out += digit_word(static_cast<int>(hundreds));
    out += " hundred";
  }
  out += " meters";
  return out;
}

inline std::string spell_miles(int miles) {
  return digit_word(miles);  // offsets are single-digit mile counts
}

// One template family per maneuvering intent; index 0 follows the standard
// phraseology. "{alt}" etc. are substituted at render time.
inline const std::vector<std::string>& clause_templates(Intent intent,
                                                        bool descend = false) {
  static const std::vector<std::string> climb = {
      "climb maintain {alt}", "climb and maintain {alt}", "climb to {alt}",
      "climb now maintain {alt}", "recleared climb maintain {alt}"};
  static const std::vector<std::string> desc = {
      "descend maintain {alt}", "descend and maintain {alt}",
      "descend to {alt}", "descend now maintain {alt}",
      "recleared descend maintain {alt}"};
  static const std::vector<std::string> offset = {
      "offset {n} miles {side} of the track due to weather",
      "offset {n} miles {side} of route",
      "fly offset {n} miles {side} of the track",
      "offset {n} miles to the {side} due to traffic",
      "proceed offset {n} miles {side}"};
  static const std::vector<std::string> canoff = {
      "can cancel offset", "cancel offset",
      "cancel the offset rejoin the track", "you can cancel offset now",
      "cancel offset proceed on track"};
  static const std::vector<std::string> flyto = {
      "direct to {wpt}", "proceed direct to {wpt}", "fly direct to {wpt}",
      "cleared direct to {wpt}", "when able proceed direct {wpt}"};
  static const std::vector<std::string> spd_up = {
      "increase speed {spd}", "increase speed to {spd}", "speed up to {spd}",
      "adjust speed to {spd}", "increase speed {spd} due to traffic"};
  static const std::vector<std::string> spd_down = {
      "reduce speed {spd}", "reduce speed to {spd}", "slow down to {spd}",
      "adjust speed to {spd}", "reduce speed {spd} due to traffic"};
  static const std::vector<std::string> head_flyto = {
      "turn {dir} direct to {wpt}", "turn {dir} heading direct {wpt}",
      "turn {dir} proceed direct to {wpt}",
      "turn {dir} and fly direct to {wpt}",
      "make a {dir} turn direct to {wpt}"};
  static const std::vector<std::string> handoff = {
      "radar service terminated handoff complete",
      "handoff to area control complete", "identified handoff accepted",
      "radar handoff complete good day"};
  static const std::vector<std::string> squawk = {
      "squawk {code}", "squawk {code} and ident",
      "reset transponder squawk {code}", "squawk ident {code}"};
  static const std::vector<std::string> qnh = {
      "qnh {q} hectopascals", "current qnh {q}",
      "qnh {q} no significant change", "altimeter setting qnh {q}"};
  static const std::vector<std::string> report = {
      "report position over {wpt}", "report passing {wpt}",
      "next report at {wpt}", "report reaching {wpt}"};
  static const std::vector<std::string> hold = {
      "hold over {wpt} as published", "hold at {wpt} expect further clearance",
      "enter the hold at {wpt}", "hold over {wpt} maintain present level"};
  static const std::vector<std::string> contact = {
      "contact {fac} control on {freq}", "contact {fac} on {freq} good day",
      "call {fac} control {freq}", "contact {fac} radar {freq}"};
  static const std::vector<std::string> readback = {
      "readback correct", "roger readback correct",
      "readback correct good day", "that is correct"};
  static const std::vector<std::string> taxi = {
      "taxi to holding point runway {rwy} via taxiway {twy}",
      "taxi via {twy} to runway {rwy}", "taxi to stand via taxiway {twy}",
      "continue taxi runway {rwy}"};
  static const std::vector<std::string> approach = {
      "cleared ils approach runway {rwy}",
      "cleared ils approach runway {rwy} report established",
      "expect ils approach runway {rwy}", "cleared approach runway {rwy}"};
  static const std::vector<std::string> misc = {
      "say again", "stand by", "correction disregard", "say intentions",
      "wind calm"};

  switch (intent) {
    case Intent::kAltAdj: return descend ? desc : climb;
    case Intent::kOffset: return offset;
    case Intent::kCanoff: return canoff;
    case Intent::kFlyto: return flyto;
    case Intent::kSpdAdj: return descend ? spd_down : spd_up;
    case Intent::kHeadAdjFlyto: return head_flyto;
    case Intent::kHandoff: return handoff;
    case Intent::kSquawk: return squawk;
    case Intent::kQnh: return qnh;
    case Intent::kReportPos: return report;
    case Intent::kHold: return hold;
    case Intent::kContact: return contact;
    case Intent::kReadback: return readback;
    case Intent::kTaxi: return taxi;
    case Intent::kApproach: return approach;
    case Intent::kMisc: return misc;
  }
  return misc;
}

// Extra parameters for the non-maneuvering clauses; sampled at render time.
struct FillerParams {
  std::string waypoint;   // REPORT_POS / HOLD
  std::string squawk;     // 4 octal digits
  std::string qnh;        // e.g. "one zero one three"
  std::string facility;   // CONTACT
  std::string frequency;  // "one two four decimal six five"
  std::string runway;     // "zero two left"
  std::string taxiway;    // "alpha"
};

inline FillerParams sample_filler_params(Rng& rng,
                                         const std::vector<std::string>& wpts) {
  static const char* facilities[] = {"chengdu", "kunming",  "guiyang",
                                     "chongqing", "lanzhou", "xian"};
  static const char* taxiways[] = {"alpha", "bravo", "charlie", "delta",
                                   "echo"};
  static const char* rwy_side[] = {"left", "right"};
  FillerParams f;
  f.waypoint = wpts[rng.uniform_int(wpts.size())];
  std::string sq;
  for (int i = 0; i < 4; ++i) {
    if (!sq.empty()) sq += ' ';
    sq += digit_word(rng.uniform_int(0, 7));
  }
  f.squawk = sq;
  f.qnh = "one zero " + std::string(digit_word(rng.uniform_int(0, 3))) + " " +
          digit_word(rng.uniform_int(0, 9));
  f.facility = facilities[rng.uniform_int(std::size_t{6})];
  f.frequency = "one two " + std::string(digit_word(rng.uniform_int(0, 9))) +
                " decimal " + digit_word(rng.uniform_int(0, 9)) + " " +
                digit_word(rng.uniform_int(0, 9));
  f.runway = "zero " + std::string(digit_word(rng.uniform_int(1, 9))) + " " +
             rwy_side[rng.uniform_int(std::size_t{2})];
  f.taxiway = taxiways[rng.uniform_int(std::size_t{5})];
  return f;
}

inline void replace_all(std::string& s, const std::string& key,
                        const std::string& value) {
  for (std::size_t at = s.find(key); at != std::string::npos;
       at = s.find(key, at)) {
    s.replace(at, key.size(), value);
    at += value.size();
  }
}

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Render one clause of the instruction with a fixed template index.
inline std::string render_clause(Intent intent, const IntentSpec& spec,
                                 const FillerParams& filler, bool descend,
                                 std::size_t template_idx) {
  const auto& family = clause_templates(intent, descend);
  std::string s = family[template_idx % family.size()];
  if (spec.target_alt_m) replace_all(s, "{alt}", spell_altitude(*spec.target_alt_m));
  if (spec.offset_miles) replace_all(s, "{n}", spell_miles(*spec.offset_miles));
  if (spec.offset_side) replace_all(s, "{side}", side_word(*spec.offset_side));
  if (spec.waypoint) replace_all(s, "{wpt}", lowercase(*spec.waypoint));
  if (spec.target_speed_mps)
    replace_all(s, "{spd}", spell_digits(std::lround(*spec.target_speed_mps)));
  if (spec.turn_dir) replace_all(s, "{dir}", turn_word(*spec.turn_dir));
  replace_all(s, "{wpt}", lowercase(filler.waypoint));
  replace_all(s, "{code}", filler.squawk);
  replace_all(s, "{q}", filler.qnh);
  replace_all(s, "{fac}", filler.facility);
  replace_all(s, "{freq}", filler.frequency);
  replace_all(s, "{rwy}", filler.runway);
  replace_all(s, "{twy}", filler.taxiway);
  return s;
}

// Render the full instruction: callsign followed by one clause per intent in
// canonical class order, with rng-chosen templates. The climb/descend and
// increase/reduce wordings come from comparing targets with the current state.
inline std::string render_instruction(const IntentSpec& spec,
                                      const std::string& callsign, Rng& rng,
                                      const std::vector<std::string>& wpts,
                                      double current_alt_m,
                                      double current_speed_mps) {
  spec.validate();
  FillerParams filler = sample_filler_params(rng, wpts);
  std::string out = callsign;
  for (Intent i : spec.intents) {
    bool down = false;
    if (i == Intent::kAltAdj && spec.target_alt_m)
      down = *spec.target_alt_m < current_alt_m;
    if (i == Intent::kSpdAdj && spec.target_speed_mps)
      down = *spec.target_speed_mps < current_speed_mps;
    std::size_t idx = rng.uniform_int(clause_templates(i, down).size());
    out += ' ';
    out += render_clause(i, spec, filler, down, idx);
  }
  return out;
}

}  // namespace siaftp::synth
