#pragma once

#include <array>
#include <set>
#include <filesystem>
#include <string>
#include <vector>

#include "siaftp/dataset.hpp"
#include "siaftp/synth/phraseology.hpp"
#include "siaftp/synth/world.hpp"

namespace siaftp::synth {

struct GenConfig {
  int traj_windows = 10000;
  int text_instructions = 100000;
  int pairs = 7500;
  double labeled_fraction = 0.6;
  SplitSpec split;
  int fleet_size = 48;
  int generated_waypoints = 5;
  SimParams sim;
};

// A scenario is one label set with a mixture weight.
struct Scenario {
  std::vector<Intent> intents;
  double weight = 0.0;
};

inline const std::vector<Scenario>& pair_scenarios() {
  static const std::vector<Scenario> s = {
      {{Intent::kAltAdj}, 0.30},
      {{Intent::kOffset}, 0.14},
      {{Intent::kCanoff}, 0.10},
      {{Intent::kFlyto}, 0.14},
      {{Intent::kSpdAdj}, 0.10},
      {{Intent::kHeadAdjFlyto}, 0.12},
      {{Intent::kCanoff, Intent::kFlyto}, 0.05},
      {{Intent::kAltAdj, Intent::kSpdAdj}, 0.05},
  };
  return s;
}

inline const std::vector<Scenario>& text_scenarios() {
  static const std::vector<Scenario> s = [] {
    std::vector<Scenario> v;
    for (int i = 0; i < kNumIntentClasses; ++i)
      v.push_back({{static_cast<Intent>(i)}, 0.055});
    v.push_back({{Intent::kCanoff, Intent::kFlyto}, 0.06});
    v.push_back({{Intent::kAltAdj, Intent::kSpdAdj}, 0.06});
    return v;
  }();
  return s;
}

// Per-class marginal frequency implied by a scenario mixture.
inline std::array<double, kNumIntentClasses> expected_class_frequency(
    const std::vector<Scenario>& scenarios) {
  std::array<double, kNumIntentClasses> freq{};
  double total = 0.0;
  for (const auto& s : scenarios) total += s.weight;
  for (const auto& s : scenarios)
    for (Intent i : s.intents)
      freq[static_cast<std::size_t>(i)] += s.weight / total;
  return freq;
}

inline std::vector<std::string> build_fleet(Rng& rng, int size) {
  static const char* airlines[] = {
      "air china",     "china southern", "china eastern", "sichuan",
      "west china",    "dynasty",        "qatari",        "loulan",
      "cathay",        "juneyao",        "spring",        "okay air"};
  std::vector<std::string> fleet;
  std::set<std::string> seen;
  while (static_cast<int>(fleet.size()) < size) {
    std::string cs = airlines[rng.uniform_int(std::size_t{12})];
    bool icao = rng.bernoulli(0.3);
    int ndigits = rng.bernoulli(0.5) ? 3 : 4;
    cs += ' ';
    for (int i = 0; i < ndigits; ++i) {
      if (i) cs += ' ';
      cs += digit_word(rng.uniform_int(0, 9), icao);
    }
    if (seen.insert(cs).second) fleet.push_back(cs);
  }
  return fleet;
}

// Standard cruise levels with a skewed popularity profile; the narrow menu
// keeps the templated corpus low-entropy, like recurring daily traffic.
inline const std::vector<double>& flight_levels() {
  static const std::vector<double> v = {7800.0,  8100.0,  8400.0, 8900.0,
                                        9200.0,  9500.0,  9800.0, 10100.0,
                                        10400.0, 11000.0, 11600.0, 12200.0};
  return v;
}

inline const std::vector<double>& flight_level_weights() {
  static const std::vector<double> w = {10, 8, 8, 7, 7, 6, 6, 5, 5, 4, 3, 3};
  return w;
}

struct EpisodePlan {
  IntentSpec spec;
  InitialState init;
  SimParams sim;
};

namespace detail {

inline double pick_level(Rng& rng) {
  return flight_levels()[rng.categorical(flight_level_weights())];
}

inline double pick_speed(Rng& rng, double lo = 180.0, double hi = 240.0) {
  int steps = static_cast<int>((hi - lo) / 10.0);
  return lo + 10.0 * rng.uniform_int(0, steps);
}

inline void plan_alt_adj(EpisodePlan& plan, Rng& rng) {
  const auto& levels = flight_levels();
  double start = plan.init.alt;
  std::vector<double> candidates;
  for (double l : levels) {
    double d = std::abs(l - start);
    if (d >= 600.0 && d <= 2400.0) candidates.push_back(l);
  }
  if (candidates.empty()) throw GenerationRejected("no reachable flight level");
  double target = candidates[rng.uniform_int(candidates.size())];
  plan.spec.target_alt_m = target;
  double duration = rng.uniform(120.0, 240.0);
  plan.sim.climb_rate =
      std::clamp(std::abs(target - start) / duration, 5.0, 15.0);
}

inline void plan_offset_like(EpisodePlan& plan, Rng& rng) {
  static const std::vector<double> mile_w = {0.45, 0.30, 0.15, 0.10};
  plan.spec.offset_miles = 3 + static_cast<int>(rng.categorical(mile_w));
  plan.spec.offset_side = rng.bernoulli(0.5) ? Side::kLeft : Side::kRight;
  plan.init.speed = 170.0 + 5.0 * rng.uniform_int(0, 3);
  plan.sim.turn_rate = 0.55 * geo::kDegToRad;
  plan.sim.intercept = rng.uniform(30.0, 45.0) * geo::kDegToRad;
  plan.spec.pilot_delay_s = rng.uniform_int(0, 30);
}

inline void plan_direct_to(EpisodePlan& plan, const WaypointTable& wpts,
                           Rng& rng, bool commanded_turn) {
  geo::LocalFrame frame{plan.init.lon, plan.init.lat};
  double t_instr = plan.sim.instruction_time_s;
  double px = plan.init.speed * t_instr * std::cos(plan.init.heading);
  double py = plan.init.speed * t_instr * std::sin(plan.init.heading);
  double lo_bear = commanded_turn ? 15.0 : 0.0;
  double hi_bear = commanded_turn ? 85.0 : 75.0;
  std::vector<std::pair<std::string, double>> candidates;
  for (const auto& [name, pos] : wpts.points) {
    double wx, wy;
    frame.to_local(pos.lon, pos.lat, wx, wy);
    double d = std::hypot(wx - px, wy - py);
    if (d < 35e3 || d > 110e3) continue;
    double bear = std::atan2(wy - py, wx - px);
    double rel = wrap_angle(bear - plan.init.heading);
    double rel_deg = std::abs(rel) / geo::kDegToRad;
    if (rel_deg < lo_bear || rel_deg > hi_bear) continue;
    candidates.emplace_back(name, rel);
  }
  if (candidates.empty())
    throw GenerationRejected("no reachable waypoint in the direct-to cone");
  auto [name, rel] = candidates[rng.uniform_int(candidates.size())];
  plan.spec.waypoint = name;
  if (commanded_turn)
    plan.spec.turn_dir = rel > 0 ? TurnDir::kLeft : TurnDir::kRight;
  plan.sim.turn_rate = rng.uniform(0.35, 0.5) * geo::kDegToRad;
}

inline void plan_spd_adj(EpisodePlan& plan, Rng& rng) {
  double target = plan.init.speed;
  for (int tries = 0; tries < 50 && std::abs(target - plan.init.speed) < 20.0;
       ++tries)
    target = pick_speed(rng, 170.0, 240.0);
  if (std::abs(target - plan.init.speed) < 20.0)
    throw GenerationRejected("no distinct target speed");
  plan.spec.target_speed_mps = target;
  plan.sim.speed_accel = rng.uniform(0.2, 0.5);
}

}  // namespace detail

// Sample the full episode plan for a scenario. Throws GenerationRejected when
// the drawn geometry cannot realize the intent; callers retry with a fresh
// attempt stream.
inline EpisodePlan plan_episode(const std::vector<Intent>& intents,
                                const WaypointTable& wpts,
                                const geo::RegionOfInterest& roi, Rng& rng,
                                const SimParams& base_sim) {
  EpisodePlan plan;
  plan.sim = base_sim;
  plan.spec.intents = intents;
  plan.init.lon = rng.uniform(roi.lon_min + 1.3, roi.lon_max - 1.3);
  plan.init.lat = rng.uniform(roi.lat_min + 1.3, roi.lat_max - 1.3);
  plan.init.heading = rng.uniform(-kPi, kPi);
  plan.init.alt = detail::pick_level(rng);
  plan.init.speed = detail::pick_speed(rng);
  plan.spec.pilot_delay_s = rng.uniform_int(0, 40);

  for (Intent i : intents) {
    switch (i) {
      case Intent::kAltAdj: detail::plan_alt_adj(plan, rng); break;
      case Intent::kOffset:
      case Intent::kCanoff: detail::plan_offset_like(plan, rng); break;
      case Intent::kFlyto:
        detail::plan_direct_to(plan, wpts, rng, false);
        break;
      case Intent::kHeadAdjFlyto:
        detail::plan_direct_to(plan, wpts, rng, true);
        break;
      case Intent::kSpdAdj: detail::plan_spd_adj(plan, rng); break;
      default: break;
    }
  }
  plan.spec.validate();
  return plan;
}

struct DatasetSummary {
  std::filesystem::path traj_path;
  std::filesystem::path text_path;
  std::filesystem::path pair_path;
  int traj_count = 0;
  int text_count = 0;
  int pair_count = 0;
};

namespace detail {

inline int day_of(long index, long count, int days) {
  return 1 + static_cast<int>((index * days) / count);
}

template <typename MakeFn>
auto with_retries(std::uint64_t seed, const char* tag, long index,
                  MakeFn make) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt >= 100)
      throw Error(std::string("episode generation kept failing for ") + tag);
    Rng rng = Rng::stream(seed, tag, static_cast<std::uint64_t>(index), attempt);
    try {
      return make(rng);
    } catch (const GenerationRejected&) {
      continue;
    }
  }
}

}  // namespace detail

// Build the three subsets and write them as JSONL under out_dir.
inline DatasetSummary generate_datasets(const GenConfig& config,
                                        std::uint64_t master_seed,
                                        const std::filesystem::path& out_dir) {
  config.split.validate();
  if (config.pairs <= 0 || config.traj_windows <= 0 ||
      config.text_instructions <= 0)
    throw ConfigError("dataset counts must be positive");

  geo::RegionOfInterest roi;
  Rng wp_rng = Rng::stream(master_seed, "waypoints");
  WaypointTable wpts = WaypointTable::build(wp_rng, roi, config.generated_waypoints);
  Rng fleet_rng = Rng::stream(master_seed, "fleet");
  std::vector<std::string> fleet = build_fleet(fleet_rng, config.fleet_size);
  std::vector<std::string> wpt_names;
  for (const auto& [name, pos] : wpts.points) wpt_names.push_back(name);

  int days = config.split.total_days();

  // Paired subset: maneuvering scenarios only.
  std::vector<PairRecord> pairs;
  pairs.reserve(static_cast<std::size_t>(config.pairs));
  {
    std::vector<double> w;
    for (const auto& s : pair_scenarios()) w.push_back(s.weight);
    for (long i = 0; i < config.pairs; ++i) {
      PairRecord rec = detail::with_retries(
          master_seed, "pair", i, [&](Rng& rng) {
            const auto& sc = pair_scenarios()[rng.categorical(w)];
            EpisodePlan plan =
                plan_episode(sc.intents, wpts, roi, rng, config.sim);
            auto points = simulate_episode(plan.spec, plan.init, plan.sim,
                                           wpts, rng);
            PairRecord r;
            r.callsign = fleet[rng.uniform_int(fleet.size())];
            r.text = render_instruction(plan.spec, r.callsign, rng, wpt_names,
                                        plan.init.alt, plan.init.speed);
            r.obs.assign(points.begin(), points.begin() + kObsLen);
            r.future.assign(points.begin() + kObsLen, points.end());
            for (Intent in : plan.spec.intents)
              r.labels.push_back(intent_name(in));
            r.spec = plan.spec;
            return r;
          });
      rec.id = i;
      rec.day = detail::day_of(i, config.pairs, days);
      pairs.push_back(std::move(rec));
    }
  }

  // Trajectory subset: cruise plus the same maneuver mixture, no text.
  std::vector<TrajRecord> trajs;
  trajs.reserve(static_cast<std::size_t>(config.traj_windows));
  {
    std::vector<double> w = {0.35};
    for (const auto& s : pair_scenarios()) w.push_back(s.weight * 0.65);
    for (long i = 0; i < config.traj_windows; ++i) {
      TrajRecord rec = detail::with_retries(
          master_seed, "traj", i, [&](Rng& rng) {
            std::size_t k = rng.categorical(w);
            std::vector<Intent> intents;
            if (k > 0) intents = pair_scenarios()[k - 1].intents;
            EpisodePlan plan = plan_episode(intents, wpts, roi, rng, config.sim);
            TrajRecord r;
            r.points = simulate_episode(plan.spec, plan.init, plan.sim, wpts, rng);
            return r;
          });
      rec.id = i;
      rec.day = detail::day_of(i, config.traj_windows, days);
      trajs.push_back(std::move(rec));
    }
  }

  // Text subset: all 16 classes; a fraction carries labels.
  std::vector<TextRecord> texts;
  texts.reserve(static_cast<std::size_t>(config.text_instructions));
  {
    std::vector<double> w;
    for (const auto& s : text_scenarios()) w.push_back(s.weight);
    for (long i = 0; i < config.text_instructions; ++i) {
      TextRecord rec = detail::with_retries(
          master_seed, "text", i, [&](Rng& rng) {
            const auto& sc = text_scenarios()[rng.categorical(w)];
            IntentSpec spec;
            spec.intents = sc.intents;
            double alt = detail::pick_level(rng);
            double speed = detail::pick_speed(rng);
            spec.pilot_delay_s = 0.0;
            for (Intent in : sc.intents) {
              switch (in) {
                case Intent::kAltAdj: {
                  EpisodePlan tmp;
                  tmp.init.alt = alt;
                  tmp.spec = spec;
                  detail::plan_alt_adj(tmp, rng);
                  spec.target_alt_m = tmp.spec.target_alt_m;
                  break;
                }
                case Intent::kOffset:
                case Intent::kCanoff: {
                  static const std::vector<double> mw = {0.45, 0.3, 0.15, 0.1};
                  spec.offset_miles = 3 + static_cast<int>(rng.categorical(mw));
                  spec.offset_side =
                      rng.bernoulli(0.5) ? Side::kLeft : Side::kRight;
                  break;
                }
                case Intent::kFlyto:
                  spec.waypoint = wpt_names[rng.uniform_int(wpt_names.size())];
                  break;
                case Intent::kHeadAdjFlyto:
                  spec.waypoint = wpt_names[rng.uniform_int(wpt_names.size())];
                  spec.turn_dir =
                      rng.bernoulli(0.5) ? TurnDir::kLeft : TurnDir::kRight;
                  break;
                case Intent::kSpdAdj: {
                  double target = speed;
                  while (std::abs(target - speed) < 20.0)
                    target = detail::pick_speed(rng, 170.0, 240.0);
                  spec.target_speed_mps = target;
                  break;
                }
                default: break;
              }
            }
            TextRecord r;
            std::string cs = fleet[rng.uniform_int(fleet.size())];
            r.text = render_instruction(spec, cs, rng, wpt_names, alt, speed);
            if (rng.bernoulli(config.labeled_fraction)) {
              std::vector<std::string> names;
              for (Intent in : sc.intents) names.push_back(intent_name(in));
              r.labels = names;
            }
            return r;
          });
      rec.id = i;
      rec.day = detail::day_of(i, config.text_instructions, days);
      texts.push_back(std::move(rec));
    }
  }

  std::filesystem::create_directories(out_dir);
  DatasetSummary summary;
  summary.traj_path = out_dir / "traj.jsonl";
  summary.text_path = out_dir / "texts.jsonl";
  summary.pair_path = out_dir / "pairs.jsonl";
  write_jsonl(summary.traj_path, trajs);
  write_jsonl(summary.text_path, texts);
  write_jsonl(summary.pair_path, pairs);
  summary.traj_count = static_cast<int>(trajs.size());
  summary.text_count = static_cast<int>(texts.size());
  summary.pair_count = static_cast<int>(pairs.size());
  return summary;
}

}  // namespace siaftp::synth
