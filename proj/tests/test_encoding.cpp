#include "siaftp/encoding.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "siaftp/rng.hpp"
#include "siaftp/vocab.hpp"

using namespace siaftp;
using encoding::AttributeSpec;
using encoding::BitVector;

namespace {

std::string bit_string(const BitVector& b) {
  std::string s;
  for (auto v : b) s += v ? '1' : '0';
  return s;
}

}  // namespace

TEST_CASE("be_encode produces the documented bit patterns") {
  AttributeSpec lon{"lon", 90.0, 1e-3, 15, false};
  CHECK(bit_string(encoding::be_encode(94.616, lon)) == "001001000001000");

  AttributeSpec alt{"alt", 0.0, 10.0, 11, false};
  CHECK(bit_string(encoding::be_encode(0.0, alt)) == "00000000000");
}

TEST_CASE("be_encode rejects out-of-range values naming the attribute") {
  AttributeSpec alt{"alt", 0.0, 10.0, 11, false};
  try {
    encoding::be_encode(30000.0, alt);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("alt") != std::string::npos);
  }
  CHECK_THROWS_AS(encoding::be_encode(-5.1, alt), RangeError);
}

TEST_CASE("roundtrip over the full quantized grid of every default spec") {
  auto specs = encoding::default_specs();
  for (const auto& spec : specs.absolute) {
    for (std::int64_t q = 0; q <= spec.max_magnitude(); ++q) {
      double v = encoding::dequantize(q, spec);
      auto bits = encoding::be_encode(v, spec);
      CHECK(bits.size() == static_cast<std::size_t>(spec.width()));
      if (encoding::be_decode(bits, spec) != v) {
        FAIL("roundtrip mismatch for " << spec.name << " at q=" << q);
      }
    }
  }
  for (const auto& spec : specs.differential) {
    for (std::int64_t q = -spec.max_magnitude(); q <= spec.max_magnitude(); ++q) {
      auto bits = encoding::encode_quantized(q, spec);
      CHECK(bits.size() == static_cast<std::size_t>(spec.width()));
      if (encoding::decode_quantized(bits, spec) != q) {
        FAIL("signed roundtrip mismatch for " << spec.name << " at q=" << q);
      }
    }
  }
}

TEST_CASE("encoding is monotone in the value for unsigned specs") {
  AttributeSpec lon{"lon", 90.0, 1e-3, 15, false};
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    double v1 = rng.uniform(90.0, 122.0);
    double v2 = rng.uniform(90.0, 122.0);
    if (v1 > v2) std::swap(v1, v2);
    CHECK(bit_string(encoding::be_encode(v1, lon)) <=
          bit_string(encoding::be_encode(v2, lon)));
  }
}

TEST_CASE("diff_sequence and reconstruct") {
  CHECK(encoding::diff_sequence({3, 5, 9}) == std::vector<std::int64_t>{2, 4});
  CHECK(encoding::diff_sequence({7, 7, 7, 7}) ==
        std::vector<std::int64_t>{0, 0, 0});

  Rng rng(99);
  for (int episode = 0; episode < 1000; ++episode) {
    std::vector<std::int64_t> q(24);
    q[0] = rng.uniform_int(0, 30000);
    for (int i = 1; i < 24; ++i) q[i] = q[i - 1] + rng.uniform_int(-400, 400);
    auto diffs = encoding::diff_sequence(q);
    auto back = encoding::reconstruct(q[0], diffs);
    std::vector<std::int64_t> want(q.begin() + 1, q.end());
    REQUIRE(back == want);
  }
}

TEST_CASE("saturation is surfaced, never clipped") {
  AttributeSpec dalt{"dalt", 0.0, 10.0, 7, true};
  CHECK_NOTHROW(encoding::encode_quantized(127, dalt));
  CHECK_NOTHROW(encoding::encode_quantized(-127, dalt));
  CHECK_THROWS_AS(encoding::encode_quantized(128, dalt), SaturationError);
  CHECK_THROWS_AS(encoding::check_saturation(-128, dalt), SaturationError);
}

TEST_CASE("tokenizer pads, truncates, and maps unknowns") {
  Vocabulary v = Vocabulary::build({"climb maintain eight thousand"});
  auto empty = v.tokenize("");
  REQUIRE(empty.size() == 32);
  for (int id : empty) CHECK(id == Vocabulary::kPad);

  auto two = v.tokenize("climb climb");
  CHECK(two[0] == two[1]);
  CHECK(two[0] >= Vocabulary::kNumReserved);
  CHECK(two[2] == Vocabulary::kPad);

  auto unk = v.tokenize("descend");
  CHECK(unk[0] == Vocabulary::kUnk);

  std::string longtext;
  for (int i = 0; i < 40; ++i) longtext += "climb ";
  CHECK(v.tokenize(longtext).size() == 32);
}

TEST_CASE("corpus roundtrip excluding PAD") {
  std::vector<std::string> corpus = {
      "air china nine three one climb maintain one two thousand two hundred meters",
      "qatari eight four seven four offset three miles right of the track due to weather",
      "sichuan eight seven four five turn left direct to ubdid"};
  Vocabulary v = Vocabulary::build(corpus);
  for (const auto& s : corpus) CHECK(v.detokenize(v.tokenize(s)) == s);
}

TEST_CASE("vocabulary ids are stable and serialization restores them") {
  std::vector<std::string> corpus = {"alpha bravo", "charlie alpha delta"};
  Vocabulary a = Vocabulary::build(corpus);
  Vocabulary b = Vocabulary::build(corpus);
  CHECK(a.tokens() == b.tokens());

  Vocabulary c = Vocabulary::restore(a.tokens());
  CHECK(c.tokens() == a.tokens());
  CHECK(c.id("charlie") == a.id("charlie"));
}
