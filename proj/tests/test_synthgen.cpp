#include "siaftp/synth/generator.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace siaftp;
using namespace siaftp::synth;

namespace {

SimParams noiseless() {
  SimParams p;
  p.add_noise = false;
  return p;
}

WaypointTable test_waypoints() {
  Rng rng(1);
  return WaypointTable::build(rng, geo::RegionOfInterest{}, 5);
}

// Independent projection oracle: signed cross-track of point p relative to the
// line through `origin` with direction `heading`, computed from plain dot
// products in the local frame.
double cross_track_oracle(const geo::LocalFrame& frame, double origin_x,
                          double origin_y, double heading,
                          const TrajectoryPoint& p) {
  double x, y;
  frame.to_local(p.lon, p.lat, x, y);
  double nx = -std::sin(heading), ny = std::cos(heading);
  return (x - origin_x) * nx + (y - origin_y) * ny;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empty intent set with zero noise gives a straight constant-velocity track") {
  IntentSpec spec;  // no intents
  InitialState init;
  init.heading = 0.35;
  init.speed = 220.0;
  Rng rng(3);
  auto pts = simulate_episode(spec, init, noiseless(), test_waypoints(), rng);
  REQUIRE(pts.size() == 24);
  geo::LocalFrame frame{init.lon, init.lat};
  for (std::size_t k = 0; k < pts.size(); ++k) {
    double x, y;
    frame.to_local(pts[k].lon, pts[k].lat, x, y);
    double t = 20.0 * static_cast<double>(k);
    CHECK(std::abs(x - init.speed * std::cos(init.heading) * t) < 1e-6);
    CHECK(std::abs(y - init.speed * std::sin(init.heading) * t) < 1e-6);
    CHECK(pts[k].alt == init.alt);
    CHECK(pts[k].vx == Catch::Approx(init.speed * std::cos(init.heading)));
    CHECK(pts[k].t == t);
  }
}

TEST_CASE("ALT_ADJ climb reaches the target level within 50 m") {
  IntentSpec spec;
  spec.intents = {Intent::kAltAdj};
  spec.target_alt_m = 12200.0;
  spec.pilot_delay_s = 0.0;
  InitialState init;
  init.alt = 10400.0;
  SimParams p = noiseless();
  p.climb_rate = 12.0;
  Rng rng(4);
  auto pts = simulate_episode(spec, init, p, test_waypoints(), rng);
  CHECK(std::abs(pts.back().alt - 12200.0) <= 50.0);
  CHECK(std::abs(pts.back().vz) < 1.0);
  // observations are untouched before the instruction
  for (int k = 0; k < kObsLen; ++k) CHECK(pts[k].alt == init.alt);
}

TEST_CASE("OFFSET right by 3 miles ends 3*1852 m abeam, by the projection oracle") {
  IntentSpec spec;
  spec.intents = {Intent::kOffset};
  spec.offset_miles = 3;
  spec.offset_side = Side::kRight;
  spec.pilot_delay_s = 0.0;
  InitialState init;
  init.heading = -0.8;
  init.speed = 180.0;
  SimParams p = noiseless();
  p.turn_rate = 0.55 * geo::kDegToRad;
  p.intercept = 35.0 * geo::kDegToRad;
  Rng rng(5);
  auto pts = simulate_episode(spec, init, p, test_waypoints(), rng);
  geo::LocalFrame frame{init.lon, init.lat};
  // the reference track passes through the position at maneuver onset
  double ox, oy;
  frame.to_local(pts[kObsLen - 1].lon, pts[kObsLen - 1].lat, ox, oy);
  double terminal =
      cross_track_oracle(frame, ox, oy, init.heading, pts.back());
  CHECK(std::abs(terminal - (-3.0 * 1852.0)) <= 50.0);  // right = negative
  // track-parallel again at the end
  double prev = cross_track_oracle(frame, ox, oy, init.heading,
                                   pts[pts.size() - 2]);
  CHECK(std::abs(terminal - prev) < 25.0);
}

TEST_CASE("CANOFF returns to the original track") {
  IntentSpec spec;
  spec.intents = {Intent::kCanoff};
  spec.offset_miles = 4;
  spec.offset_side = Side::kLeft;
  spec.pilot_delay_s = 10.0;
  InitialState init;
  init.heading = 1.2;
  init.speed = 175.0;
  SimParams p = noiseless();
  p.turn_rate = 0.55 * geo::kDegToRad;
  Rng rng(6);
  auto pts = simulate_episode(spec, init, p, test_waypoints(), rng);
  geo::LocalFrame frame{init.lon, init.lat};
  // original track: 4 NM right of the aircraft's line (it was offset left)
  double refx = std::sin(init.heading) * 4.0 * 1852.0;
  double refy = -std::cos(init.heading) * 4.0 * 1852.0;
  double before =
      cross_track_oracle(frame, refx, refy, init.heading, pts.front());
  double after =
      cross_track_oracle(frame, refx, refy, init.heading, pts.back());
  CHECK(before == Catch::Approx(4.0 * 1852.0));
  CHECK(std::abs(after) <= 60.0);
}

TEST_CASE("FLYTO turns onto the bearing of the waypoint") {
  WaypointTable wpts = test_waypoints();
  IntentSpec spec;
  spec.intents = {Intent::kFlyto};
  spec.waypoint = "MARSO";
  spec.pilot_delay_s = 0.0;
  InitialState init;
  init.lon = 101.2;
  init.lat = 25.6;  // MARSO is ~100 km north
  init.heading = 1.0;
  init.speed = 200.0;
  SimParams p = noiseless();
  Rng rng(7);
  auto pts = simulate_episode(spec, init, p, wpts, rng);
  const auto& target = wpts.at("MARSO");
  geo::LocalFrame frame{init.lon, init.lat};
  double wx, wy;
  frame.to_local(target.lon, target.lat, wx, wy);
  double x, y;
  frame.to_local(pts.back().lon, pts.back().lat, x, y);
  double bearing = std::atan2(wy - y, wx - x);
  double track = std::atan2(pts.back().vy, pts.back().vx);
  CHECK(std::abs(wrap_angle(track - bearing)) < 2.0 * geo::kDegToRad);
}

TEST_CASE("velocity fields are consistent with central position differences") {
  for (auto intents : {std::vector<Intent>{},
                       std::vector<Intent>{Intent::kAltAdj},
                       std::vector<Intent>{Intent::kHeadAdjFlyto}}) {
    WaypointTable wpts = test_waypoints();
    geo::RegionOfInterest roi;
    Rng rng = Rng::stream(42, "vel-consistency", intents.size());
    SimParams base = noiseless();
    EpisodePlan plan;
    for (int attempt = 0;; ++attempt) {
      REQUIRE(attempt < 50);
      try {
        plan = plan_episode(intents, wpts, roi, rng, base);
        break;
      } catch (const GenerationRejected&) {
      }
    }
    plan.sim.add_noise = false;
    Rng sim_rng(11);
    auto pts = simulate_episode(plan.spec, plan.init, plan.sim, wpts, sim_rng);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      double dlon = pts[k + 1].lon - pts[k].lon;
      double dlat = pts[k + 1].lat - pts[k].lat;
      double fd_vx = dlon * 111320.0 * std::cos(pts[k].lat * geo::kDegToRad) / 20.0;
      double fd_vy = dlat * 111320.0 / 20.0;
      double mid_vx = 0.5 * (pts[k].vx + pts[k + 1].vx);
      double mid_vy = 0.5 * (pts[k].vy + pts[k + 1].vy);
      CHECK(std::abs(fd_vx - mid_vx) <= 5.0);
      CHECK(std::abs(fd_vy - mid_vy) <= 5.0);
    }
  }
}

TEST_CASE("table phraseology: standard templates render the documented strings") {
  FillerParams none;
  IntentSpec alt;
  alt.intents = {Intent::kAltAdj};
  alt.target_alt_m = 12200.0;
  CHECK("air china nine three one " +
            render_clause(Intent::kAltAdj, alt, none, false, 0) ==
        "air china nine three one climb maintain one two thousand two hundred meters");

  IntentSpec off;
  off.intents = {Intent::kOffset};
  off.offset_miles = 3;
  off.offset_side = Side::kRight;
  CHECK(render_clause(Intent::kOffset, off, none, false, 0) ==
        "offset three miles right of the track due to weather");

  IntentSpec head;
  head.intents = {Intent::kHeadAdjFlyto};
  head.waypoint = "UBDID";
  head.turn_dir = TurnDir::kLeft;
  CHECK(render_clause(Intent::kHeadAdjFlyto, head, none, false, 0) ==
        "turn left direct to ubdid");

  CHECK(spell_altitude(8400.0) == "eight thousand four hundred meters");
  CHECK(spell_altitude(11000.0) == "one one thousand meters");
}

TEST_CASE("multi-intent specs concatenate clauses in class order") {
  IntentSpec spec;
  spec.intents = {Intent::kCanoff, Intent::kFlyto};
  spec.waypoint = "SUMUN";
  spec.offset_miles = 3;
  spec.offset_side = Side::kLeft;
  Rng rng(9);
  auto text = render_instruction(spec, "loulan two six one six", rng,
                                 {"SUMUN"}, 9200.0, 200.0);
  CHECK(text.rfind("loulan two six one six", 0) == 0);
  CHECK(text.find("cancel") != std::string::npos);
  CHECK(text.find("offset") != std::string::npos);
  CHECK(text.find("direct") != std::string::npos);
  CHECK(text.find("sumun") != std::string::npos);
  for (char c : text) CHECK((std::islower(static_cast<unsigned char>(c)) || c == ' '));
}

TEST_CASE("generate_datasets: counts, determinism, invariants") {
  GenConfig cfg;
  cfg.pairs = 36;
  cfg.traj_windows = 20;
  cfg.text_instructions = 60;
  auto dir1 = std::filesystem::temp_directory_path() / "siaftp_gen1";
  auto dir2 = std::filesystem::temp_directory_path() / "siaftp_gen2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  auto s1 = generate_datasets(cfg, 7, dir1);
  auto s2 = generate_datasets(cfg, 7, dir2);
  CHECK(s1.pair_count == 36);
  CHECK(s1.traj_count == 20);
  CHECK(s1.text_count == 60);

  // byte-identical reruns
  CHECK(slurp(s1.pair_path) == slurp(s2.pair_path));
  CHECK(slurp(s1.traj_path) == slurp(s2.traj_path));
  CHECK(slurp(s1.text_path) == slurp(s2.text_path));

  auto pairs = read_pair_jsonl(s1.pair_path);
  REQUIRE(pairs.size() == 36);
  geo::RegionOfInterest roi;
  for (const auto& r : pairs) {
    CHECK(r.obs.size() == 9);
    CHECK(r.future.size() == 15);
    CHECK(r.day >= 1);
    CHECK(r.day <= 9);
    // labels always equal the generating spec's intent set
    REQUIRE(r.labels.size() == r.spec.intents.size());
    for (std::size_t k = 0; k < r.labels.size(); ++k)
      CHECK(r.labels[k] == intent_name(r.spec.intents[k]));
    for (const auto& p : r.obs) CHECK(roi.contains(p.lon, p.lat, p.alt, 2500.0));
    for (const auto& p : r.future)
      CHECK(roi.contains(p.lon, p.lat, p.alt, 2500.0));
    CHECK(r.future.front().t - r.obs.back().t == Catch::Approx(20.0));
    CHECK(r.spec.maneuvering());
  }

  SplitSpec split;
  auto train = filter_split(pairs, split, Split::kTrain);
  auto valid = filter_split(pairs, split, Split::kValid);
  auto test = filter_split(pairs, split, Split::kTest);
  CHECK(train.size() + valid.size() + test.size() == pairs.size());
  CHECK(train.size() >= 24);
  CHECK(!valid.empty());
  CHECK(!test.empty());

  // text subset: some rows unlabeled
  auto texts = read_text_jsonl(s1.text_path);
  int labeled = 0;
  for (const auto& t : texts) labeled += t.labels.has_value() ? 1 : 0;
  CHECK(labeled > 10);
  CHECK(labeled < 60);
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("label histogram tracks the configured mixture within 20 percent") {
  GenConfig cfg;
  cfg.pairs = 1;
  cfg.traj_windows = 1;
  cfg.text_instructions = 10000;
  cfg.labeled_fraction = 1.0;
  auto dir = std::filesystem::temp_directory_path() / "siaftp_gen_hist";
  std::filesystem::remove_all(dir);
  auto s = generate_datasets(cfg, 11, dir);
  auto texts = read_text_jsonl(s.text_path);
  std::array<int, kNumIntentClasses> counts{};
  for (const auto& t : texts)
    for (const auto& name : *t.labels)
      counts[static_cast<std::size_t>(intent_from_name(name))]++;
  auto expected = expected_class_frequency(text_scenarios());
  for (int c = 0; c < kNumIntentClasses; ++c) {
    double got = counts[static_cast<std::size_t>(c)] / 10000.0;
    CHECK(got > 0.8 * expected[static_cast<std::size_t>(c)]);
    CHECK(got < 1.2 * expected[static_cast<std::size_t>(c)]);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("noiseless zero-delay episodes are C0/C1 continuous at the splice") {
  GenConfig cfg;
  cfg.sim.add_noise = false;
  WaypointTable wpts = test_waypoints();
  geo::RegionOfInterest roi;
  for (int i = 0; i < 10; ++i) {
    Rng rng = Rng::stream(123, "splice", static_cast<std::uint64_t>(i));
    EpisodePlan plan;
    try {
      plan = plan_episode({Intent::kAltAdj}, wpts, roi, rng, cfg.sim);
    } catch (const GenerationRejected&) {
      continue;
    }
    plan.spec.pilot_delay_s = 0.0;
    Rng sim_rng(1);
    auto pts = simulate_episode(plan.spec, plan.init, plan.sim, wpts, sim_rng);
    const auto& a = pts[kObsLen - 1];
    const auto& b = pts[kObsLen];
    geo::LocalFrame frame{plan.init.lon, plan.init.lat};
    double ax, ay, bx, by;
    frame.to_local(a.lon, a.lat, ax, ay);
    frame.to_local(b.lon, b.lat, bx, by);
    // within one step the state can change only through the channel limits
    CHECK(std::abs(bx - (ax + a.vx * 20.0)) < 80.0);
    CHECK(std::abs(by - (ay + a.vy * 20.0)) < 80.0);
    CHECK(std::abs(b.alt - a.alt) < 20.0 * 15.0);
  }
}

TEST_CASE("generation rejects unreachable targets and callers resample") {
  WaypointTable wpts;
  wpts.add("LONLY", 113.0, 36.9);  // far corner, outside the direct-to cone
  geo::RegionOfInterest roi;
  Rng rng(13);
  bool rejected_seen = false;
  for (int i = 0; i < 30 && !rejected_seen; ++i) {
    try {
      plan_episode({Intent::kFlyto}, wpts, roi, rng, SimParams{});
    } catch (const GenerationRejected&) {
      rejected_seen = true;
    }
  }
  CHECK(rejected_seen);
}
