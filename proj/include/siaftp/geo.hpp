#pragma once

#include <cmath>
#include <map>
#include <tuple>
#include <string>
#include <vector>

#include "siaftp/errors.hpp"

namespace siaftp::geo {

// WGS-84 ellipsoid.
inline constexpr double kSemiMajorM = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kEccSq = kFlattening * (2.0 - kFlattening);

inline constexpr double kMetersPerNm = 1852.0;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Meters per degree of latitude in the synthetic local-tangent world; the
// longitude factor is this times cos(latitude).
inline constexpr double kMetersPerDegLat = 111320.0;

struct GeodeticPosition {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
  double alt = 0.0;  // meters above the ellipsoid
};

struct EcefPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct RegionOfInterest {
  double lon_min = 94.616, lon_max = 113.689;
  double lat_min = 19.305, lat_max = 37.275;
  double alt_min = 0.0, alt_max = 12500.0;

  bool contains(double lon, double lat, double alt,
                double alt_headroom = 0.0) const {
    return lon >= lon_min && lon <= lon_max && lat >= lat_min &&
           lat <= lat_max && alt >= alt_min && alt <= alt_max + alt_headroom;
  }
};

inline void validate(const GeodeticPosition& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || !std::isfinite(p.alt))
    throw std::invalid_argument("geodetic position has non-finite component");
  if (p.lat < -90.0 || p.lat > 90.0)
    throw std::invalid_argument("latitude out of [-90, 90]");
  if (p.lon < -180.0 || p.lon > 180.0)
    throw std::invalid_argument("longitude out of [-180, 180]");
}

// noinline keeps a single code instance so results are bit-identical at every
// call site (per-callsite auto-vectorization of libm calls would otherwise
// perturb the last ulp).
#if defined(__GNUC__)
__attribute__((noinline))
#endif
inline EcefPosition
wgs84_to_ecef(const GeodeticPosition& p) {
  validate(p);
  double lat = p.lat * kDegToRad;
  double lon = p.lon * kDegToRad;
  double sin_lat = std::sin(lat), cos_lat = std::cos(lat);
  double n = kSemiMajorM / std::sqrt(1.0 - kEccSq * sin_lat * sin_lat);
  return {(n + p.alt) * cos_lat * std::cos(lon),
          (n + p.alt) * cos_lat * std::sin(lon),
          (n * (1.0 - kEccSq) + p.alt) * sin_lat};
}

// ECEF Euclidean separation in nautical miles. Arguments are evaluated in a
// canonical order so the result is bit-exactly symmetric.
inline double deviation_distance(const GeodeticPosition& a,
                                 const GeodeticPosition& b) {
  const GeodeticPosition* p = &a;
  const GeodeticPosition* q = &b;
  if (std::tie(q->lat, q->lon, q->alt) < std::tie(p->lat, p->lon, p->alt))
    std::swap(p, q);
  if (p->lat == q->lat && p->lon == q->lon && p->alt == q->alt) {
    validate(*p);
    return 0.0;
  }
  EcefPosition ep = wgs84_to_ecef(*p);
  EcefPosition eq = wgs84_to_ecef(*q);
  double dx = ep.x - eq.x, dy = ep.y - eq.y, dz = ep.z - eq.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz) / kMetersPerNm;
}

// Local tangent-plane mapping used by the synthetic world and the Kalman
// baseline: x east meters, y north meters relative to an anchor.
struct LocalFrame {
  double lon0 = 0.0, lat0 = 0.0;
  double m_per_deg_lon() const {
    return kMetersPerDegLat * std::cos(lat0 * kDegToRad);
  }
  void to_local(double lon, double lat, double& x, double& y) const {
    x = (lon - lon0) * m_per_deg_lon();
    y = (lat - lat0) * kMetersPerDegLat;
  }
  void to_geodetic(double x, double y, double& lon, double& lat) const {
    lon = lon0 + x / m_per_deg_lon();
    lat = lat0 + y / kMetersPerDegLat;
  }
};

enum class NormKind { kZScore, kMinMax };

// Per-attribute affine normalizer; apply/invert are exact inverses.
class Normalizer {
 public:
  Normalizer() = default;

  static Normalizer fit(NormKind kind, const std::string& attribute,
                        const std::vector<double>& samples) {
    if (samples.size() < 2)
      throw FitError("normalizer fit for '" + attribute +
                     "' needs at least 2 samples");
    Normalizer n;
    n.kind_ = kind;
    n.attribute_ = attribute;
    if (kind == NormKind::kZScore) {
      double mean = 0.0;
      for (double v : samples) mean += v;
      mean /= static_cast<double>(samples.size());
      double var = 0.0;
      for (double v : samples) var += (v - mean) * (v - mean);
      var /= static_cast<double>(samples.size());
      double sd = std::sqrt(var);
      if (sd <= 0.0)
        throw FitError("attribute '" + attribute + "' has zero variance");
      n.a_ = mean;
      n.b_ = sd;
    } else {
      double lo = samples[0], hi = samples[0];
      for (double v : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi <= lo)
        throw FitError("attribute '" + attribute + "' has max == min");
      n.a_ = lo;
      n.b_ = hi - lo;
    }
    return n;
  }

  double apply(double x) const { return (x - a_) / b_; }
  double invert(double xn) const { return xn * b_ + a_; }

  NormKind kind() const { return kind_; }
  const std::string& attribute() const { return attribute_; }
  // (offset, scale): zscore -> (mean, std); minmax -> (min, max - min).
  double offset() const { return a_; }
  double scale() const { return b_; }

  static Normalizer restore(NormKind kind, const std::string& attribute,
                            double offset, double scale) {
    Normalizer n;
    n.kind_ = kind;
    n.attribute_ = attribute;
    n.a_ = offset;
    n.b_ = scale;
    return n;
  }

 private:
  NormKind kind_ = NormKind::kMinMax;
  std::string attribute_;
  double a_ = 0.0;
  double b_ = 1.0;
};

}  // namespace siaftp::geo
