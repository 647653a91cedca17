#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "siaftp/dataset.hpp"
#include "siaftp/geo.hpp"
#include "siaftp/intents.hpp"
#include "siaftp/rng.hpp"

namespace siaftp::synth {

inline constexpr double kPi = 3.14159265358979323846;

inline double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a < -kPi) a += 2.0 * kPi;
  return a;
}

struct WaypointTable {
  std::map<std::string, geo::GeodeticPosition> points;  // name -> position

  static WaypointTable build(Rng& rng, const geo::RegionOfInterest& roi,
                             int generated) {
    WaypointTable t;
    t.add("MARSO", 101.2, 26.5);
    t.add("UBDID", 106.8, 30.1);
    t.add("SUMUN", 103.9, 33.2);
    t.add("KAKMI", 109.5, 24.8);
    t.add("IRVED", 98.4, 29.0);
    const std::string consonants = "bcdfgklmnprstvz";
    const std::string vowels = "aeiou";
    while (static_cast<int>(t.points.size()) < 5 + generated) {
      std::string name;
      for (int i = 0; i < 5; ++i) {
        const std::string& pool = (i % 2 == 0) ? consonants : vowels;
        name += pool[rng.uniform_int(pool.size())];
      }
      for (char& c : name) c = static_cast<char>(std::toupper(c));
      if (t.points.count(name)) continue;
      double lon = rng.uniform(roi.lon_min + 1.5, roi.lon_max - 1.5);
      double lat = rng.uniform(roi.lat_min + 1.5, roi.lat_max - 1.5);
      t.points[name] = {lat, lon, 0.0};
    }
    return t;
  }

  void add(const std::string& name, double lon, double lat) {
    points[name] = {lat, lon, 0.0};
  }

  const geo::GeodeticPosition& at(const std::string& name) const {
    auto it = points.find(name);
    if (it == points.end())
      throw std::invalid_argument("unknown waypoint: " + name);
    return it->second;
  }
};

struct InitialState {
  double lon = 104.0;
  double lat = 30.0;
  double alt = 9200.0;
  double heading = 0.0;  // math convention: 0 = east, CCW positive, radians
  double speed = 210.0;  // ground speed, m/s
};

struct SimParams {
  double dt = 1.0;
  double resample_s = kStepSeconds;
  int window = kWindowLen;
  double instruction_time_s = (kObsLen - 1) * kStepSeconds;  // 160 s

  double turn_rate = 0.45 * geo::kDegToRad;  // rad/s, well under the 3 deg/s cap
  double intercept = 32.0 * geo::kDegToRad;  // offset intercept angle
  double climb_rate = 10.0;                  // |vz| ceiling for ALT_ADJ, m/s
  double vert_accel = 0.18;                  // m/s^2
  double speed_accel = 0.35;                 // m/s^2

  double noise_h_m = 20.0;
  double noise_v_m = 10.0;
  bool add_noise = true;
};

namespace detail {

struct Capture {
  double ref_x = 0.0, ref_y = 0.0;  // a point on the reference track
  double ref_heading = 0.0;
  double target_cross = 0.0;  // signed; left of track is positive
  double intercept = 0.0;     // capped intercept angle, radians
};

struct Channels {
  enum class Lat { kHold, kCapture, kPursuit } lat = Lat::kHold;
  Capture capture;
  double wp_x = 0.0, wp_y = 0.0;
  bool alt_active = false;
  double target_alt = 0.0;
  bool spd_active = false;
  double target_speed = 0.0;
};

struct State {
  double x = 0.0, y = 0.0, alt = 0.0;
  double heading = 0.0, speed = 0.0, vz = 0.0;
};

inline double signed_cross(const State& s, const Capture& c) {
  double nx = -std::sin(c.ref_heading), ny = std::cos(c.ref_heading);
  return (s.x - c.ref_x) * nx + (s.y - c.ref_y) * ny;
}

inline void step_lateral(State& s, const Channels& ch, const SimParams& p) {
  if (ch.lat == Channels::Lat::kHold) return;
  double max_turn = p.turn_rate * p.dt;
  double want_heading;
  if (ch.lat == Channels::Lat::kPursuit) {
    want_heading = std::atan2(ch.wp_y - s.y, ch.wp_x - s.x);
  } else {
    const Capture& c = ch.capture;
    double cross = signed_cross(s, c);
    double remaining = c.target_cross - cross;
    double delta = wrap_angle(s.heading - c.ref_heading);
    double want_delta;
    if (std::abs(remaining) < 60.0 && std::abs(delta) < 3.0 * geo::kDegToRad) {
      // Captured: hold the track, trimming residual cross-track error.
      double k = (2.0 * geo::kDegToRad) / 100.0;
      want_delta = std::clamp(remaining * k, -2.0 * geo::kDegToRad,
                              2.0 * geo::kDegToRad);
    } else {
      double dir = remaining >= 0.0 ? 1.0 : -1.0;
      // Cross-track that will accrue while unwinding the present heading
      // offset back to track-parallel at the commanded turn rate.
      double unwind = (s.speed / p.turn_rate) * (1.0 - std::cos(delta));
      bool same_side = delta * dir > 0.0;
      if (same_side && std::abs(remaining) <= unwind)
        want_delta = 0.0;  // begin the turn-in
      else
        want_delta = dir * c.intercept;
    }
    want_heading = c.ref_heading + want_delta;
  }
  double err = wrap_angle(want_heading - s.heading);
  s.heading = wrap_angle(s.heading + std::clamp(err, -max_turn, max_turn));
}

inline void step_vertical(State& s, const Channels& ch, const SimParams& p) {
  if (!ch.alt_active) return;
  double dalt = ch.target_alt - s.alt;
  double dir = dalt >= 0.0 ? 1.0 : -1.0;
  if (std::abs(dalt) < 2.0 && std::abs(s.vz) <= 2.0 * p.vert_accel * p.dt) {
    s.alt = ch.target_alt;
    s.vz = 0.0;
    return;
  }
  double stop_dist = s.vz * s.vz / (2.0 * p.vert_accel);
  double want_vz = 0.0;
  if (!(s.vz * dir >= 0.0 && std::abs(dalt) <= stop_dist))
    want_vz = dir * p.climb_rate;
  s.vz += std::clamp(want_vz - s.vz, -p.vert_accel * p.dt, p.vert_accel * p.dt);
}

inline void step_speed(State& s, const Channels& ch, const SimParams& p) {
  if (!ch.spd_active) return;
  s.speed += std::clamp(ch.target_speed - s.speed, -p.speed_accel * p.dt,
                        p.speed_accel * p.dt);
}

}  // namespace detail

// Intercept angle capped so the S-turn geometry can complete: each of the two
// constant-rate turns consumes (v/w)(1-cos x) of cross-track.
inline double capture_intercept(double cross_m, double speed,
                                const SimParams& p) {
  double cosx = 1.0 - std::abs(cross_m) * p.turn_rate / (2.0 * speed);
  double cap = std::acos(std::clamp(cosx, -1.0, 1.0));
  return std::min(p.intercept, cap);
}

// Point-mass episode simulator. Integrates at p.dt in a local tangent frame
// anchored at the initial position, arms the spec's maneuvers at
// instruction_time + pilot_delay, resamples every p.resample_s, and adds
// Gaussian observation noise afterward.
inline std::vector<TrajectoryPoint> simulate_episode(
    const IntentSpec& spec, const InitialState& init, const SimParams& p,
    const WaypointTable& waypoints, Rng& rng) {
  spec.validate();
  geo::RegionOfInterest roi;
  if (!roi.contains(init.lon, init.lat, init.alt, 2500.0))
    throw GenerationRejected("initial state outside the ROI");

  geo::LocalFrame frame{init.lon, init.lat};
  detail::State s;
  s.alt = init.alt;
  s.heading = init.heading;
  s.speed = init.speed;

  detail::Channels ch;
  // CANOFF flies offset from its original track from the episode start; the
  // reference line is displaced sideways from the aircraft.
  if (spec.has(Intent::kCanoff) && !spec.has(Intent::kFlyto)) {
    if (!spec.offset_miles || !spec.offset_side)
      throw std::invalid_argument("CANOFF episode needs offset parameters");
  }

  double exec_t = p.instruction_time_s + spec.pilot_delay_s;
  bool armed = false;

  auto arm = [&]() {
    if (spec.has(Intent::kAltAdj)) {
      ch.alt_active = true;
      ch.target_alt = *spec.target_alt_m;
    }
    if (spec.has(Intent::kSpdAdj)) {
      ch.spd_active = true;
      ch.target_speed = *spec.target_speed_mps;
    }
    if (spec.has(Intent::kFlyto) || spec.has(Intent::kHeadAdjFlyto)) {
      // Direct-to supersedes any lateral capture (a combined CANOFF&FLYTO
      // cancels the offset by turning straight to the fix).
      const auto& wp = waypoints.at(*spec.waypoint);
      ch.lat = detail::Channels::Lat::kPursuit;
      frame.to_local(wp.lon, wp.lat, ch.wp_x, ch.wp_y);
    } else if (spec.has(Intent::kOffset)) {
      double sign = *spec.offset_side == Side::kLeft ? 1.0 : -1.0;
      detail::Capture c;
      c.ref_x = s.x;
      c.ref_y = s.y;
      c.ref_heading = s.heading;
      c.target_cross = sign * (*spec.offset_miles) * geo::kMetersPerNm;
      c.intercept = capture_intercept(c.target_cross, s.speed, p);
      ch.capture = c;
      ch.lat = detail::Channels::Lat::kCapture;
    } else if (spec.has(Intent::kCanoff)) {
      double sign = *spec.offset_side == Side::kLeft ? 1.0 : -1.0;
      double cross = sign * (*spec.offset_miles) * geo::kMetersPerNm;
      detail::Capture c;
      c.ref_heading = s.heading;
      // The original track lies `cross` to the opposite side of the aircraft.
      c.ref_x = s.x + std::sin(c.ref_heading) * cross;
      c.ref_y = s.y - std::cos(c.ref_heading) * cross;
      c.target_cross = 0.0;
      c.intercept = capture_intercept(cross, s.speed, p);
      ch.capture = c;
      ch.lat = detail::Channels::Lat::kCapture;
    }
  };

  int steps = static_cast<int>((p.window - 1) * p.resample_s / p.dt);
  std::vector<TrajectoryPoint> out;
  out.reserve(p.window);
  int stride = static_cast<int>(p.resample_s / p.dt);

  auto sample = [&](double t) {
    TrajectoryPoint pt;
    frame.to_geodetic(s.x, s.y, pt.lon, pt.lat);
    pt.alt = s.alt;
    pt.vx = s.speed * std::cos(s.heading);
    pt.vy = s.speed * std::sin(s.heading);
    pt.vz = s.vz;
    pt.t = t;
    out.push_back(pt);
  };

  sample(0.0);
  for (int k = 1; k <= steps; ++k) {
    double t = k * p.dt;
    if (!armed && t > exec_t) {
      arm();
      armed = true;
    }
    detail::step_lateral(s, ch, p);
    detail::step_vertical(s, ch, p);
    detail::step_speed(s, ch, p);
    s.x += s.speed * std::cos(s.heading) * p.dt;
    s.y += s.speed * std::sin(s.heading) * p.dt;
    s.alt += s.vz * p.dt;
    if (k % stride == 0) sample(t);
  }

  if (p.add_noise) {
    for (auto& pt : out) {
      double nx = rng.normal(0.0, p.noise_h_m);
      double ny = rng.normal(0.0, p.noise_h_m);
      pt.lon += nx / frame.m_per_deg_lon();
      pt.lat += ny / geo::kMetersPerDegLat;
      pt.alt += rng.normal(0.0, p.noise_v_m);
    }
  }

  for (const auto& pt : out) {
    if (!roi.contains(pt.lon, pt.lat, pt.alt, 2500.0))
      throw GenerationRejected("episode left the padded ROI");
    if (std::abs(pt.vx) > 350.0 || std::abs(pt.vy) > 350.0 ||
        std::abs(pt.vz) > 30.0)
      throw GenerationRejected("velocity bound exceeded");
  }
  return out;
}

}  // namespace siaftp::synth
