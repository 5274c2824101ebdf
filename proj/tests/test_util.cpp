#include <doctest.h>

#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "sitaware/csv.hpp"
#include "sitaware/errors.hpp"
#include "sitaware/numeric.hpp"
#include "sitaware/rng.hpp"

using namespace sitaware;

TEST_CASE("csv parser") {
  SUBCASE("CRLF and LF records both work") {
    const auto records = parse_csv("a,b\r\n1,2\r\n3,4\n");
    REQUIRE(records.size() == 3);
    CHECK(records[1].fields == std::vector<std::string>{"1", "2"});
    CHECK(records[2].line == 3);
  }
  SUBCASE("quoted fields keep commas, quotes and newlines") {
    const auto records = parse_csv("\"a,b\",\"say \"\"hi\"\"\",\"two\nlines\"\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].fields[0] == "a,b");
    CHECK(records[0].fields[1] == "say \"hi\"");
    CHECK(records[0].fields[2] == "two\nlines");
  }
  SUBCASE("blank lines are skipped, trailing newline optional") {
    CHECK(parse_csv("a,b\n\n\n1,2").size() == 2);
    CHECK(parse_csv("").empty());
  }
  SUBCASE("line numbers survive embedded newlines") {
    try {
      parse_csv("a\n\"x\ny\"\n\"broken\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }
  SUBCASE("quoting round trip") {
    for (const std::string field :
         {"plain", "with,comma", "with \"quotes\"", "multi\nline", "", " padded "}) {
      const auto records = parse_csv(csv_row(std::vector<std::string>{field, "tail"}));
      REQUIRE(records.size() == 1);
      CHECK(records[0].fields[0] == field);
    }
  }
}

TEST_CASE("format_double round-trips exactly") {
  SeededRng rng(606);
  for (int trial = 0; trial < 500; ++trial) {
    double value = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform() * 12 - 6);
    if (trial % 7 == 0) value = 1.0 / 3.0 * value;
    const std::string text = format_double(value);
    double back = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), back);
    REQUIRE(result.ec == std::errc{});
    CHECK(back == value);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(2.0 / 7.0) == "0.2857142857142857");
}

TEST_CASE("seeded rng") {
  SUBCASE("streams are reproducible and seed-sensitive") {
    SeededRng a(12345), b(12345), c(54321);
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
      const double ua = a.uniform();
      CHECK(ua == b.uniform());
      CHECK(ua >= 0.0);
      CHECK(ua < 1.0);
      if (ua != c.uniform()) any_diff = true;
    }
    CHECK(any_diff);
  }
  SUBCASE("normal draws have the right first two moments") {
    SeededRng rng(31);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      sum += z;
      sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
  }
  SUBCASE("mix_seed separates nearby indices") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t base : {0ULL, 1ULL, 42ULL})
      for (std::uint64_t i = 0; i < 50; ++i)
        for (std::uint64_t j = 0; j < 5; ++j) seen.insert(mix_seed(base, i, j));
    CHECK(seen.size() == 3 * 50 * 5);
  }
  SUBCASE("fingerprint is stable and content-sensitive") {
    CHECK(fingerprint("") == "fnv1a:cbf29ce484222325");
    CHECK(fingerprint("abc") == fingerprint("abc"));
    CHECK(fingerprint("abc") != fingerprint("abd"));
    CHECK(fingerprint("abc").size() == 6 + 16);
  }
}
