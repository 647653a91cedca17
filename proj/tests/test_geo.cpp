#include "siaftp/geo.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "siaftp/rng.hpp"

using namespace siaftp;
using geo::GeodeticPosition;

namespace {

// Independent oracle: parametric (reduced-latitude) form of the ellipsoid
// surface plus height along the geodetic normal, evaluated in long double.
// Algebraically equivalent to the closed form but shares none of its
// arrangement (no prime-vertical radius).
void oracle_ecef(long double lat_deg, long double lon_deg, long double h,
                 long double& x, long double& y, long double& z) {
  const long double a = 6378137.0L;
  const long double f = 1.0L / 298.257223563L;
  const long double b = a * (1.0L - f);
  const long double deg = 3.14159265358979323846264338327950288L / 180.0L;
  long double lat = lat_deg * deg, lon = lon_deg * deg;
  long double u = std::atan2(b * std::sin(lat), a * std::cos(lat));  // reduced latitude
  long double sx = a * std::cos(u) * std::cos(lon);
  long double sy = a * std::cos(u) * std::sin(lon);
  long double sz = b * std::sin(u);
  x = sx + h * std::cos(lat) * std::cos(lon);
  y = sy + h * std::cos(lat) * std::sin(lon);
  z = sz + h * std::sin(lat);
}

double rel_err(double got, long double want) {
  long double denom = std::max<long double>(1.0L, std::fabs(want));
  return static_cast<double>(std::fabs(static_cast<long double>(got) - want) / denom);
}

}  // namespace

TEST_CASE("wgs84_to_ecef matches frozen high-precision values") {
  // Frozen from a 50-digit mpmath evaluation of the WGS-84 closed form.
  auto e = geo::wgs84_to_ecef({30.0, 104.0, 10000.0});
  CHECK(e.x == Catch::Approx(-1339501.430612381337).epsilon(1e-12));
  CHECK(e.y == Catch::Approx(5372446.798344126345).epsilon(1e-12));
  CHECK(e.z == Catch::Approx(3175373.735383637767).epsilon(1e-12));

  auto c1 = geo::wgs84_to_ecef({19.305, 94.616, 0.0});
  CHECK(c1.x == Catch::Approx(-484610.8963943796369).epsilon(1e-12));
  CHECK(c1.y == Catch::Approx(6002179.341942614166).epsilon(1e-12));
  CHECK(c1.z == Catch::Approx(2095242.313995095387).epsilon(1e-12));

  auto c2 = geo::wgs84_to_ecef({37.275, 113.689, 12500.0});
  CHECK(c2.x == Catch::Approx(-2045627.748896587596).epsilon(1e-12));
  CHECK(c2.y == Catch::Approx(4662501.993960399836).epsilon(1e-12));
  CHECK(c2.z == Catch::Approx(3849293.509332276425).epsilon(1e-12));
}

TEST_CASE("wgs84_to_ecef equatorial and axis symmetry points") {
  auto e0 = geo::wgs84_to_ecef({0.0, 0.0, 0.0});
  CHECK(e0.x == Catch::Approx(6378137.0));
  CHECK(std::abs(e0.y) < 1e-9);
  CHECK(std::abs(e0.z) < 1e-9);

  auto e90 = geo::wgs84_to_ecef({0.0, 90.0, 0.0});
  CHECK(std::abs(e90.x) < 1e-6);
  CHECK(e90.y == Catch::Approx(6378137.0));
  CHECK(std::abs(e90.z) < 1e-9);
}

TEST_CASE("wgs84_to_ecef agrees with the parametric oracle on an ROI grid") {
  geo::RegionOfInterest roi;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 3; ++k) {
        double lon = roi.lon_min + (roi.lon_max - roi.lon_min) * i / 9.0;
        double lat = roi.lat_min + (roi.lat_max - roi.lat_min) * j / 9.0;
        double alt = roi.alt_min + (roi.alt_max - roi.alt_min) * k / 2.0;
        auto e = geo::wgs84_to_ecef({lat, lon, alt});
        long double x, y, z;
        oracle_ecef(lat, lon, alt, x, y, z);
        CHECK(rel_err(e.x, x) < 1e-12);
        CHECK(rel_err(e.y, y) < 1e-12);
        CHECK(rel_err(e.z, z) < 1e-12);
        double norm = std::sqrt(e.x * e.x + e.y * e.y + e.z * e.z);
        CHECK(norm > 6.3e6);
        CHECK(norm < 6.5e6);
      }
    }
  }
}

TEST_CASE("wgs84_to_ecef rejects invalid input") {
  CHECK_THROWS_AS(geo::wgs84_to_ecef({std::nan(""), 100.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(geo::wgs84_to_ecef({91.0, 100.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(geo::wgs84_to_ecef({30.0, 200.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("deviation_distance identity, altitude offset, golden value") {
  GeodeticPosition p{30.0, 104.0, 9000.0};
  CHECK(geo::deviation_distance(p, p) == 0.0);

  // A pure height offset lies along the ellipsoid normal, so the ECEF
  // separation equals the altitude difference exactly.
  GeodeticPosition q{30.0, 104.0, 9000.0 + 1852.0};
  CHECK(geo::deviation_distance(p, q) == Catch::Approx(1.0).epsilon(1e-12));

  GeodeticPosition r{30.1, 104.1, 9300.0};
  CHECK(geo::deviation_distance(p, r) ==
        Catch::Approx(7.946691608985332).epsilon(1e-12));
}

TEST_CASE("deviation_distance is symmetric and satisfies the triangle inequality") {
  Rng rng(20240601);
  geo::RegionOfInterest roi;
  for (int t = 0; t < 200; ++t) {
    auto rand_pos = [&] {
      return GeodeticPosition{rng.uniform(roi.lat_min, roi.lat_max),
                              rng.uniform(roi.lon_min, roi.lon_max),
                              rng.uniform(roi.alt_min, roi.alt_max)};
    };
    auto a = rand_pos(), b = rand_pos(), c = rand_pos();
    double ab = geo::deviation_distance(a, b);
    double ba = geo::deviation_distance(b, a);
    double bc = geo::deviation_distance(b, c);
    double ac = geo::deviation_distance(a, c);
    CHECK(ab == ba);
    CHECK(ac <= ab + bc + 1e-9);
    double dalt = std::abs(a.alt - b.alt) / 1852.0;
    CHECK(ab >= dalt - 1e-9);
  }
}

TEST_CASE("normalizer minmax and zscore basics") {
  auto mm = geo::Normalizer::fit(geo::NormKind::kMinMax, "alt", {0.0, 10.0});
  CHECK(mm.apply(5.0) == Catch::Approx(0.5));
  CHECK(mm.apply(0.0) == Catch::Approx(0.0));
  CHECK(mm.apply(10.0) == Catch::Approx(1.0));

  auto zs = geo::Normalizer::fit(geo::NormKind::kZScore, "lon", {-1.0, 1.0});
  CHECK(zs.apply(0.0) == Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(
      geo::Normalizer::fit(geo::NormKind::kMinMax, "alt", {3.0, 3.0}),
      FitError);
  CHECK_THROWS_AS(
      geo::Normalizer::fit(geo::NormKind::kZScore, "alt", {3.0, 3.0}),
      FitError);
  CHECK_THROWS_AS(geo::Normalizer::fit(geo::NormKind::kMinMax, "alt", {3.0}),
                  FitError);
}

TEST_CASE("normalizer roundtrip is identity within 1e-9 relative") {
  Rng rng(77);
  geo::RegionOfInterest roi;
  std::vector<double> samples;
  for (int i = 0; i < 50; ++i)
    samples.push_back(rng.uniform(roi.lon_min, roi.lon_max));
  for (auto kind : {geo::NormKind::kMinMax, geo::NormKind::kZScore}) {
    auto n = geo::Normalizer::fit(kind, "lon", samples);
    for (int i = 0; i < 1000; ++i) {
      double x = rng.uniform(roi.lon_min, roi.lon_max);
      double back = n.invert(n.apply(x));
      CHECK(std::abs(back - x) <= 1e-9 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("local frame roundtrip") {
  geo::LocalFrame f{104.0, 30.0};
  double x, y;
  f.to_local(104.5, 30.25, x, y);
  double lon, lat;
  f.to_geodetic(x, y, lon, lat);
  CHECK(lon == Catch::Approx(104.5).epsilon(1e-12));
  CHECK(lat == Catch::Approx(30.25).epsilon(1e-12));
  CHECK(y == Catch::Approx(0.25 * geo::kMetersPerDegLat));
}
