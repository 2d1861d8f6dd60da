#include <doctest.h>

#include <cmath>

#include "cxltier/bench.hpp"
#include "cxltier/corpus.hpp"
#include "cxltier/errors.hpp"

using namespace cxltier;

TEST_SUITE("host_emulator") {

TEST_CASE("profile names round-trip") {
  for (ContentProfile p : kAllProfiles) CHECK(profile_from_name(profile_name(p)) == p);
  CHECK(profile_from_name("zero_heavy") == ContentProfile::ZeroHeavy);
  CHECK_THROWS_AS(profile_from_name("SPARSE"), ArgumentError);
}

TEST_CASE("corpus generation is deterministic and sized") {
  const auto a = generate_corpus(ContentProfile::Integer, 8, 5);
  CHECK(a.size() == 8 * kPageBytes);
  CHECK(a == generate_corpus(ContentProfile::Integer, 8, 5));
  CHECK(a != generate_corpus(ContentProfile::Integer, 8, 6));
}

TEST_CASE("profile compression ratios") {
  auto ratio = [](ContentProfile p) {
    const auto data = generate_corpus(p, 128, 42);
    return measure("x", data, StorageMode::Cacheline, 4096).ratio;
  };
  CHECK(ratio(ContentProfile::ZeroHeavy) >= 2.0);
  CHECK(ratio(ContentProfile::Integer) >= 2.0);
  CHECK(ratio(ContentProfile::Textlike) >= 2.0);
  CHECK(ratio(ContentProfile::Random) < 1.0);
  CHECK(ratio(ContentProfile::Random) == doctest::Approx(64.0 / 66.0));
}

TEST_CASE("textlike lines are zero, one repeated byte, or printable") {
  Xoshiro256 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const CacheLine l = generate_line(ContentProfile::Textlike, rng);
    for (std::uint8_t b : l) CHECK((b == 0 || (b >= 0x20 && b < 0x7f)));
  }
}

}
