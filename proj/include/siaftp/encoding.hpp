#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "siaftp/errors.hpp"

namespace siaftp::encoding {

// Fixed-width binary quantization of one trajectory attribute. Unsigned specs
// encode offsets from `min_value`; signed specs are sign-magnitude and used
// for differentials.
struct AttributeSpec {
  std::string name;
  double min_value = 0.0;
  double resolution = 1.0;
  int bits = 1;  // magnitude bits, excluding the sign bit
  bool is_signed = false;

  int width() const { return bits + (is_signed ? 1 : 0); }
  std::int64_t max_magnitude() const { return (std::int64_t{1} << bits) - 1; }
  double max_value() const {
    return min_value + static_cast<double>(max_magnitude()) * resolution;
  }
};

using BitVector = std::vector<std::uint8_t>;  // MSB first; values 0/1

// value -> quantized grid index (unsigned specs only).
inline std::int64_t quantize(double value, const AttributeSpec& spec) {
  if (!std::isfinite(value))
    throw RangeError("attribute '" + spec.name + "': non-finite value");
  std::int64_t q =
      static_cast<std::int64_t>(std::llround((value - spec.min_value) / spec.resolution));
  if (q < 0 || q > spec.max_magnitude())
    throw RangeError("attribute '" + spec.name + "': value " +
                     std::to_string(value) + " outside representable range [" +
                     std::to_string(spec.min_value) + ", " +
                     std::to_string(spec.max_value()) + "]");
  return q;
}

inline double dequantize(std::int64_t q, const AttributeSpec& spec) {
  return spec.min_value + static_cast<double>(q) * spec.resolution;
}

// Encode a quantity on the spec's grid. For signed specs `q` is a raw signed
// integer in quantization units; for unsigned specs call with the grid index.
inline BitVector encode_quantized(std::int64_t q, const AttributeSpec& spec) {
  BitVector bits(static_cast<std::size_t>(spec.width()), 0);
  std::size_t at = 0;
  std::int64_t mag = q;
  if (spec.is_signed) {
    bits[at++] = q < 0 ? 1 : 0;
    mag = std::llabs(q);
  }
  if (mag < 0 || mag > spec.max_magnitude()) {
    if (spec.is_signed)
      throw SaturationError("attribute '" + spec.name + "': differential " +
                            std::to_string(q) + " exceeds +/-" +
                            std::to_string(spec.max_magnitude()));
    throw RangeError("attribute '" + spec.name + "': quantized value " +
                     std::to_string(q) + " exceeds " +
                     std::to_string(spec.max_magnitude()));
  }
  for (int b = spec.bits - 1; b >= 0; --b)
    bits[at++] = static_cast<std::uint8_t>((mag >> b) & 1);
  return bits;
}

inline std::int64_t decode_quantized(const BitVector& bits,
                                     const AttributeSpec& spec) {
  if (bits.size() != static_cast<std::size_t>(spec.width()))
    throw std::invalid_argument("attribute '" + spec.name +
                                "': bit length mismatch");
  std::size_t at = 0;
  bool negative = false;
  if (spec.is_signed) negative = bits[at++] != 0;
  std::int64_t mag = 0;
  for (; at < bits.size(); ++at) mag = (mag << 1) | (bits[at] & 1);
  return negative ? -mag : mag;
}

inline BitVector be_encode(double value, const AttributeSpec& spec) {
  return encode_quantized(quantize(value, spec), spec);
}

inline double be_decode(const BitVector& bits, const AttributeSpec& spec) {
  return dequantize(decode_quantized(bits, spec), spec);
}

// Consecutive differences of a quantized sequence.
inline std::vector<std::int64_t> diff_sequence(
    const std::vector<std::int64_t>& quantized) {
  if (quantized.size() < 2)
    throw std::invalid_argument("diff_sequence needs at least 2 points");
  std::vector<std::int64_t> diffs(quantized.size() - 1);
  for (std::size_t i = 1; i < quantized.size(); ++i)
    diffs[i - 1] = quantized[i] - quantized[i - 1];
  return diffs;
}

// Exact cumulative-sum inverse of diff_sequence from the anchor.
inline std::vector<std::int64_t> reconstruct(
    std::int64_t anchor, const std::vector<std::int64_t>& diffs) {
  std::vector<std::int64_t> out(diffs.size());
  std::int64_t acc = anchor;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    acc += diffs[i];
    out[i] = acc;
  }
  return out;
}

// Check a differential against the signed spec before encoding; surfaced so
// callers can reject a sample instead of silently clipping.
inline void check_saturation(std::int64_t diff, const AttributeSpec& spec) {
  if (std::llabs(diff) > spec.max_magnitude())
    throw SaturationError("attribute '" + spec.name + "': differential " +
                          std::to_string(diff) + " exceeds +/-" +
                          std::to_string(spec.max_magnitude()));
}

constexpr int kNumAttributes = 6;  // lon, lat, alt, vx, vy, vz

struct CodecSpecs {
  std::array<AttributeSpec, kNumAttributes> absolute;
  std::array<AttributeSpec, kNumAttributes> differential;

  int absolute_width() const {
    int w = 0;
    for (const auto& s : absolute) w += s.width();
    return w;
  }
  int differential_width() const {
    int w = 0;
    for (const auto& s : differential) w += s.width();
    return w;
  }
};

// Default bit layout. Absolute specs are unsigned offsets from the ROI
// minimum; differential ranges leave at least 3x headroom over the synthetic
// generator's physical maxima so that saturation always signals a bug.
inline CodecSpecs default_specs() {
  CodecSpecs s;
  s.absolute = {{{"lon", 90.0, 1e-3, 15, false},
                 {"lat", 15.0, 1e-3, 15, false},
                 {"alt", 0.0, 10.0, 11, false},
                 {"vx", -350.0, 1.0, 10, false},
                 {"vy", -350.0, 1.0, 10, false},
                 {"vz", -30.0, 0.1, 10, false}}};
  s.differential = {{{"dlon", 0.0, 1e-3, 9, true},
                     {"dlat", 0.0, 1e-3, 9, true},
                     {"dalt", 0.0, 10.0, 7, true},
                     {"dvx", 0.0, 1.0, 7, true},
                     {"dvy", 0.0, 1.0, 7, true},
                     {"dvz", 0.0, 0.1, 7, true}}};
  return s;
}

}  // namespace siaftp::encoding
