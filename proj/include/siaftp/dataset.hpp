#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "siaftp/errors.hpp"
#include "siaftp/intents.hpp"

namespace siaftp {

inline constexpr int kObsLen = 9;
inline constexpr int kHorizons = 15;
inline constexpr int kWindowLen = kObsLen + kHorizons;  // 24
inline constexpr double kStepSeconds = 20.0;

struct TrajectoryPoint {
  double lon = 0.0;  // degrees
  double lat = 0.0;  // degrees
  double alt = 0.0;  // meters
  double vx = 0.0;   // m/s east
  double vy = 0.0;   // m/s north
  double vz = 0.0;   // m/s vertical
  double t = 0.0;    // seconds since episode start

  double attr(int k) const {
    switch (k) {
      case 0: return lon;
      case 1: return lat;
      case 2: return alt;
      case 3: return vx;
      case 4: return vy;
      default: return vz;
    }
  }
  void set_attr(int k, double v) {
    switch (k) {
      case 0: lon = v; break;
      case 1: lat = v; break;
      case 2: alt = v; break;
      case 3: vx = v; break;
      case 4: vy = v; break;
      default: vz = v; break;
    }
  }
};

struct TrajRecord {
  long id = 0;
  int day = 1;
  std::vector<TrajectoryPoint> points;  // 24 at 20-s spacing
};

struct TextRecord {
  long id = 0;
  int day = 1;
  std::string text;
  std::optional<std::vector<std::string>> labels;  // absent for MLM-only rows
};

struct PairRecord {
  long id = 0;
  int day = 1;
  std::string callsign;
  std::vector<TrajectoryPoint> obs;     // 9
  std::vector<TrajectoryPoint> future;  // 15
  std::string text;
  std::vector<std::string> labels;
  IntentSpec spec;
};

namespace detail {

inline nlohmann::json point_to_array(const TrajectoryPoint& p) {
  return nlohmann::json::array({p.lon, p.lat, p.alt, p.vx, p.vy, p.vz});
}

inline TrajectoryPoint point_from_array(const nlohmann::json& a, double t) {
  TrajectoryPoint p;
  p.lon = a.at(0);
  p.lat = a.at(1);
  p.alt = a.at(2);
  p.vx = a.at(3);
  p.vy = a.at(4);
  p.vz = a.at(5);
  p.t = t;
  return p;
}

}  // namespace detail

inline nlohmann::json spec_to_json(const IntentSpec& s) {
  nlohmann::json j;
  auto names = nlohmann::json::array();
  for (Intent i : s.intents) names.push_back(intent_name(i));
  j["intents"] = names;
  j["delay_s"] = s.pilot_delay_s;
  if (s.target_alt_m) j["target_alt_m"] = *s.target_alt_m;
  if (s.offset_miles) j["offset_miles"] = *s.offset_miles;
  if (s.offset_side) j["offset_side"] = side_word(*s.offset_side);
  if (s.waypoint) j["waypoint"] = *s.waypoint;
  if (s.target_speed_mps) j["target_speed_mps"] = *s.target_speed_mps;
  if (s.turn_dir) j["turn_dir"] = turn_word(*s.turn_dir);
  return j;
}

inline IntentSpec spec_from_json(const nlohmann::json& j) {
  IntentSpec s;
  for (const auto& n : j.at("intents"))
    s.intents.push_back(intent_from_name(n.get<std::string>()));
  s.pilot_delay_s = j.at("delay_s");
  if (j.contains("target_alt_m")) s.target_alt_m = j["target_alt_m"];
  if (j.contains("offset_miles")) s.offset_miles = j["offset_miles"];
  if (j.contains("offset_side"))
    s.offset_side = j["offset_side"] == "left" ? Side::kLeft : Side::kRight;
  if (j.contains("waypoint")) s.waypoint = j["waypoint"];
  if (j.contains("target_speed_mps")) s.target_speed_mps = j["target_speed_mps"];
  if (j.contains("turn_dir"))
    s.turn_dir = j["turn_dir"] == "left" ? TurnDir::kLeft : TurnDir::kRight;
  return s;
}

inline nlohmann::json to_json(const TrajRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["day"] = r.day;
  auto pts = nlohmann::json::array();
  for (const auto& p : r.points) pts.push_back(detail::point_to_array(p));
  j["points"] = pts;
  return j;
}

inline nlohmann::json to_json(const TextRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["day"] = r.day;
  j["text"] = r.text;
  if (r.labels) j["labels"] = *r.labels;
  return j;
}

inline nlohmann::json to_json(const PairRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["day"] = r.day;
  j["callsign"] = r.callsign;
  auto obs = nlohmann::json::array();
  for (const auto& p : r.obs) obs.push_back(detail::point_to_array(p));
  j["obs"] = obs;
  auto fut = nlohmann::json::array();
  for (const auto& p : r.future) fut.push_back(detail::point_to_array(p));
  j["future"] = fut;
  j["text"] = r.text;
  j["labels"] = r.labels;
  j["spec"] = spec_to_json(r.spec);
  return j;
}

inline TrajRecord traj_from_json(const nlohmann::json& j) {
  TrajRecord r;
  r.id = j.at("id");
  r.day = j.at("day");
  int k = 0;
  for (const auto& a : j.at("points"))
    r.points.push_back(detail::point_from_array(a, kStepSeconds * k++));
  return r;
}

inline TextRecord text_from_json(const nlohmann::json& j) {
  TextRecord r;
  r.id = j.at("id");
  r.day = j.at("day");
  r.text = j.at("text");
  if (j.contains("labels"))
    r.labels = j["labels"].get<std::vector<std::string>>();
  return r;
}

inline PairRecord pair_from_json(const nlohmann::json& j) {
  PairRecord r;
  r.id = j.at("id");
  r.day = j.at("day");
  r.callsign = j.at("callsign");
  int k = 0;
  for (const auto& a : j.at("obs"))
    r.obs.push_back(detail::point_from_array(a, kStepSeconds * k++));
  for (const auto& a : j.at("future"))
    r.future.push_back(detail::point_from_array(a, kStepSeconds * k++));
  r.text = j.at("text");
  r.labels = j.at("labels").get<std::vector<std::string>>();
  r.spec = spec_from_json(j.at("spec"));
  return r;
}

template <typename Record>
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<Record>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

template <typename Record, typename Parse>
std::vector<Record> read_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path.string());
  std::vector<Record> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse(nlohmann::json::parse(line)));
  }
  return out;
}

inline std::vector<TrajRecord> read_traj_jsonl(const std::filesystem::path& p) {
  return read_jsonl<TrajRecord>(p, traj_from_json);
}
inline std::vector<TextRecord> read_text_jsonl(const std::filesystem::path& p) {
  return read_jsonl<TextRecord>(p, text_from_json);
}
inline std::vector<PairRecord> read_pair_jsonl(const std::filesystem::path& p) {
  return read_jsonl<PairRecord>(p, pair_from_json);
}

// Day-indexed split boundaries; defaults mirror a 7/1/1 day partition.
struct SplitSpec {
  int train_days = 7;
  int valid_days = 1;
  int test_days = 1;

  int total_days() const { return train_days + valid_days + test_days; }
  void validate() const {
    if (train_days < 1 || valid_days < 1 || test_days < 1)
      throw ConfigError("each split needs at least one day");
  }
  bool in_train(int day) const { return day <= train_days; }
  bool in_valid(int day) const {
    return day > train_days && day <= train_days + valid_days;
  }
  bool in_test(int day) const { return day > train_days + valid_days; }
};

enum class Split { kTrain, kValid, kTest };

template <typename Record>
std::vector<Record> filter_split(const std::vector<Record>& records,
                                 const SplitSpec& spec, Split split) {
  std::vector<Record> out;
  for (const auto& r : records) {
    bool keep = (split == Split::kTrain && spec.in_train(r.day)) ||
                (split == Split::kValid && spec.in_valid(r.day)) ||
                (split == Split::kTest && spec.in_test(r.day));
    if (keep) out.push_back(r);
  }
  return out;
}

}  // namespace siaftp
