#include "doiclean/doi.hpp"

#include <doctest.h>

#include <random>

using namespace doiclean;

TEST_CASE("parse keeps case and trims edges only") {
  Doi a = parse_doi("10.14778/1920841.1920954");
  CHECK(a.normalized() == "10.14778/1920841.1920954");

  Doi b = parse_doi("  10.1016/j.aca.2006.07.086 ");
  CHECK(b.normalized() == "10.1016/j.aca.2006.07.086");
  CHECK(b.raw() == "  10.1016/j.aca.2006.07.086 ");

  // Interior whitespace is an error pattern, not noise; leave it alone.
  Doi c = parse_doi("10.1016/j. aca");
  CHECK(c.normalized() == "10.1016/j. aca");

  CHECK_THROWS_AS(parse_doi(""), ParseError);
  CHECK_THROWS_AS(parse_doi("   "), ParseError);
}

TEST_CASE("parse is idempotent") {
  Doi a = parse_doi(" 10.1016/J.AMEPRE.2015.07.017 ");
  Doi b = parse_doi(a.normalized());
  CHECK(a == b);
  CHECK(b.normalized() == a.normalized());
}

TEST_CASE("prefix extraction") {
  CHECK(extract_prefix(parse_doi("10.1016/j.aca.2006.07.086")).value() == "10.1016");
  CHECK(extract_prefix(parse_doi("10.5555/646836.708343")).value() == "10.5555");

  CHECK(!try_extract_prefix(parse_doi("not-a-doi")));
  CHECK(!try_extract_prefix(parse_doi("10.1016")));        // no slash
  CHECK(!try_extract_prefix(parse_doi("x10.1016/j.aca"))); // does not begin with 10.
  CHECK_THROWS_AS(extract_prefix(parse_doi("not-a-doi")), NoPrefixError);
}

TEST_CASE("prefix + remainder round-trips") {
  const char* samples[] = {
      "10.1016/j.aca.2006.07.086",
      "10.14778/1920841.1920954",
      "10.1111/J.1536-7150.2006.00482.X/FULL",
      "10.1073/PNAS.1319051111/-/DCSUPPLEMENTAL",
  };
  for (const char* s : samples) {
    Doi doi = parse_doi(s);
    DoiPrefix prefix = extract_prefix(doi);
    std::string remainder = doi.normalized().substr(prefix.value().size() + 1);
    CHECK(prefix.value() + "/" + remainder == doi.normalized());
  }
}

TEST_CASE("equality is case-insensitive") {
  CHECK(doi_equals(parse_doi("10.1016/J.AMEPRE.2015.07.017"),
                   parse_doi("10.1016/j.amepre.2015.07.017")));
  CHECK(!doi_equals(parse_doi("10.1016/a"), parse_doi("10.1016/b")));
  CHECK(!doi_equals(parse_doi("10.1021/BI3013565"), parse_doi("10.1021/BI3013565(2012)")));
}

TEST_CASE("equality is an equivalence relation") {
  std::mt19937_64 rng(7);
  auto random_doi = [&] {
    static const char alphabet[] = "abcdefgXYZ0123456789._-/";
    std::string s = "10." + std::to_string(1000 + rng() % 9000) + "/";
    size_t len = 4 + rng() % 12;
    for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % (sizeof(alphabet) - 1)]);
    return s;
  };
  auto case_jitter = [&](std::string s) {
    for (auto& c : s) {
      if (rng() % 2 == 0) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return s;
  };

  for (int i = 0; i < 200; ++i) {
    std::string base = random_doi();
    Doi a = parse_doi(base);
    Doi b = parse_doi(case_jitter(base));
    Doi c = parse_doi(" " + case_jitter(base) + " ");
    Doi other = parse_doi(random_doi() + "x");

    CHECK(doi_equals(a, a));                      // reflexive
    CHECK(doi_equals(a, b) == doi_equals(b, a));  // symmetric
    CHECK(doi_equals(a, b));
    CHECK(doi_equals(b, c));
    CHECK(doi_equals(a, c));                      // transitive over the chain
    if (doi_equals(a, other)) {
      CHECK(doi_equals(other, a));
    }
  }
}
