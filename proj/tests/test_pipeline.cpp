#include "doiclean/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doiclean/config.hpp"

using namespace doiclean;

namespace {

const RuleSet& extended() {
  static RuleSet rs = load_bundled_ruleset("extended");
  return rs;
}

const RuleSet& baseline() {
  static RuleSet rs = load_bundled_ruleset("baseline");
  return rs;
}

CitationRecord rec(const std::string& citing, const std::string& cited) {
  return {parse_doi(citing), cited};
}

// Fixture + corpus covering all four statuses, deterministic per seed.
struct GeneratedCorpus {
  FixtureResolver fixture;
  std::vector<CitationRecord> records;
};

void generate(GeneratedCorpus& out, size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto corpus = example_corpus(extended());
  for (const auto& entry : corpus) {
    out.fixture.add_doi(entry.expected, Validity::valid, "Crossref");
  }
  for (size_t i = 0; i < n; ++i) {
    std::string citing = "10." + std::to_string(1000 + i % 37) + "/citing." + std::to_string(i);
    switch (rng() % 4) {
      case 0: {  // already valid
        std::string cited = "10.2000/ok." + std::to_string(i);
        out.fixture.add_doi(cited, Validity::valid, "Crossref");
        out.records.push_back(rec(citing, cited));
        break;
      }
      case 1: {  // cleanable via a random rule
        const auto& entry = corpus[rng() % corpus.size()];
        out.records.push_back(rec(citing, entry.invalid));
        break;
      }
      case 2: {  // well-formed but nonexistent
        out.records.push_back(rec(citing, "10.4000/missing." + std::to_string(i)));
        break;
      }
      default: {  // resolver cannot say
        std::string cited = "10.5000/flaky." + std::to_string(i);
        out.fixture.add_doi(cited, Validity::unknown);
        out.records.push_back(rec(citing, cited));
        break;
      }
    }
  }
}

std::multiset<std::string> result_keys(const std::vector<PipelineResult>& results) {
  std::multiset<std::string> keys;
  for (const auto& r : results) {
    std::string k = r.record.citing.normalized() + "|" + r.record.cited_raw + "|" +
                    to_string(r.status) + "|" +
                    (r.cleaned ? r.cleaned->normalized() : "-");
    for (int id : r.fired_rules) k += "," + std::to_string(id);
    keys.insert(std::move(k));
  }
  return keys;
}

}  // namespace

TEST_CASE("step 1 short-circuits DOIs that resolve as read") {
  FixtureResolver fx;
  fx.add_doi("10.3748/wjg.v10.i5.707.", Validity::valid);
  auto result = process_citation(extended(), fx,
                                 rec("10.1177/1179546820918903", "10.3748/wjg.v10.i5.707."));
  CHECK(result.status == CitationStatus::already_valid);
  CHECK(result.fired_rules.empty());
  CHECK(!result.cleaned.has_value());
  CHECK(fx.resolve_calls_total() == 1);
}

TEST_CASE("cleaning happens only after a failed first resolution") {
  FixtureResolver fx;
  fx.add_doi("10.1016/J.AMEPRE.2015.07.017", Validity::valid);
  auto result = process_citation(extended(), fx,
                                 rec("10.9707/2307-0919.1116", "10.1016/J.AMEPRE.2015.07.017."));
  CHECK(result.status == CitationStatus::valid_after_cleaning);
  REQUIRE(result.cleaned.has_value());
  CHECK(result.cleaned->normalized() == "10.1016/J.AMEPRE.2015.07.017");
  CHECK(result.fired_rules == std::vector<int>{1});
  CHECK(result.citing_prefix.value() == "10.9707");
  REQUIRE(result.cited_prefix.has_value());
  CHECK(result.cited_prefix->value() == "10.1016");
}

TEST_CASE("a well-formed unknown DOI stays invalid without a second lookup") {
  FixtureResolver fx;
  auto result = process_citation(extended(), fx,
                                 rec("10.14778/1920841.1920954", "10.5555/646836.708343"));
  CHECK(result.status == CitationStatus::still_invalid);
  CHECK(result.fired_rules.empty());
  CHECK(!result.cleaned.has_value());
  // No rule matched, so the string was never re-resolved.
  CHECK(fx.resolve_calls_total() == 1);
}

TEST_CASE("unknown verdicts make the record indeterminate, not invalid") {
  FixtureResolver fx;
  fx.set_unlisted_policy(FixtureResolver::UnlistedPolicy::unknown);
  auto result = process_citation(extended(), fx, rec("10.1/a", "10.2/x"));
  CHECK(result.status == CitationStatus::indeterminate);
  CHECK(!result.diagnostic.empty());

  // Unknown at step 3 as well: first lookup invalid, cleaned lookup unknown.
  FixtureResolver fx2;
  fx2.set_unlisted_policy(FixtureResolver::UnlistedPolicy::unknown);
  fx2.add_doi("10.1021/BI3013565(2012)", Validity::invalid);
  auto r2 = process_citation(extended(), fx2, rec("10.1/a", "10.1021/BI3013565(2012)"));
  CHECK(r2.status == CitationStatus::indeterminate);
}

TEST_CASE("cleaning pure garbage down to nothing is still_invalid") {
  FixtureResolver fx;
  auto result = process_citation(extended(), fx, rec("10.1/a", "http://dx.doi.org/"));
  CHECK(result.status == CitationStatus::still_invalid);
  CHECK(!result.cleaned.has_value());
  CHECK(!result.cited_prefix.has_value());
}

TEST_CASE("empty stream yields an all-zero summary") {
  FixtureResolver fx;
  std::vector<PipelineResult> results;
  auto summary = process_corpus(extended(), fx, {}, results);
  CHECK(results.empty());
  CHECK(summary.total == 0);
  CHECK(summary.already_valid + summary.valid_after_cleaning + summary.still_invalid +
            summary.indeterminate ==
        0);
}

TEST_CASE("duplicate cited strings hit the resolver once per run") {
  FixtureResolver fx;
  std::vector<CitationRecord> records{
      rec("10.1/a", "10.5555/646836.708343"),
      rec("10.1/b", "10.5555/646836.708343"),
      rec("10.1/c", "10.5555/646836.708343"),
  };
  std::vector<PipelineResult> results;
  process_corpus(extended(), fx, records, results);
  CHECK(results.size() == 3);
  CHECK(fx.resolve_calls("10.5555/646836.708343") == 1);
}

TEST_CASE("lookup economy is bounded by distinct cited plus cleaned strings") {
  GeneratedCorpus corpus;
  generate(corpus, 400, 99);
  // Duplicate a slice of the corpus to force repeats.
  for (size_t i = 0; i < 100; ++i) corpus.records.push_back(corpus.records[i]);

  std::set<std::string> distinct_cited;
  std::set<std::string> distinct_cleaned;
  for (const auto& r : corpus.records) {
    std::string folded = fold_ascii(trim(r.cited_raw));
    distinct_cited.insert(folded);
    auto trace = clean_string(extended(), trim(r.cited_raw));
    if (trace.changed) distinct_cleaned.insert(fold_ascii(trace.output));
  }

  std::vector<PipelineResult> results;
  process_corpus(extended(), corpus.fixture, corpus.records, results, 4);
  CHECK(corpus.fixture.resolve_calls_total() <=
        distinct_cited.size() + distinct_cleaned.size());
}

TEST_CASE("statuses partition the corpus and workers do not change results") {
  GeneratedCorpus corpus;
  generate(corpus, 1000, 12345);

  std::vector<PipelineResult> reference;
  auto ref_summary = process_corpus(extended(), corpus.fixture, corpus.records, reference, 1);
  CHECK(ref_summary.total == 1000);
  CHECK(ref_summary.already_valid + ref_summary.valid_after_cleaning +
            ref_summary.still_invalid + ref_summary.indeterminate ==
        1000);
  CHECK(ref_summary.indeterminate > 0);  // the generator plants unknowns

  for (unsigned workers : {2u, 8u}) {
    CAPTURE(workers);
    std::vector<PipelineResult> results;
    auto summary = process_corpus(extended(), corpus.fixture, corpus.records, results, workers);
    CHECK(summary.total == 1000);
    CHECK(summary.already_valid == ref_summary.already_valid);
    CHECK(summary.valid_after_cleaning == ref_summary.valid_after_cleaning);
    CHECK(summary.still_invalid == ref_summary.still_invalid);
    CHECK(summary.indeterminate == ref_summary.indeterminate);
    CHECK(result_keys(results) == result_keys(reference));

    // Output order equals input order whatever the scheduling.
    REQUIRE(results.size() == corpus.records.size());
    for (size_t i = 0; i < results.size(); ++i) {
      CHECK(results[i].record.cited_raw == corpus.records[i].cited_raw);
    }
  }
}

TEST_CASE("step-1 screen: already_valid results never carry fired rules") {
  GeneratedCorpus corpus;
  generate(corpus, 500, 7);
  std::vector<PipelineResult> results;
  process_corpus(extended(), corpus.fixture, corpus.records, results, 4);
  for (const auto& r : results) {
    if (r.status == CitationStatus::already_valid) {
      CHECK(r.fired_rules.empty());
    }
    if (r.status == CitationStatus::valid_after_cleaning) {
      CHECK(!r.fired_rules.empty());
      CHECK(r.cleaned.has_value());
    }
  }
}

TEST_CASE("re-fed cleaned DOIs come back already_valid") {
  GeneratedCorpus corpus;
  generate(corpus, 600, 31);
  std::vector<PipelineResult> results;
  process_corpus(extended(), corpus.fixture, corpus.records, results, 4);

  std::vector<CitationRecord> refeed;
  for (const auto& r : results) {
    if (r.status == CitationStatus::valid_after_cleaning) {
      refeed.push_back(rec(r.record.citing.normalized(), r.cleaned->normalized()));
    }
  }
  REQUIRE(!refeed.empty());

  std::vector<PipelineResult> second;
  process_corpus(extended(), corpus.fixture, refeed, second, 4);
  for (const auto& r : second) {
    CHECK(r.status == CitationStatus::already_valid);
    CHECK(r.fired_rules.empty());
  }
}

TEST_CASE("comparing identical rulesets yields no disagreements") {
  GeneratedCorpus corpus;
  generate(corpus, 200, 5);
  auto report =
      compare_rulesets(corpus.records, {&extended(), &extended()}, corpus.fixture);
  CHECK(report.disagreements.empty());
  CHECK(report.per_ruleset[0].summary.valid_after_cleaning ==
        report.per_ruleset[1].summary.valid_after_cleaning);
}

TEST_CASE("an all-valid corpus is untouched by either ruleset") {
  FixtureResolver fx;
  std::vector<CitationRecord> records;
  for (int i = 0; i < 20; ++i) {
    std::string cited = "10.3000/fine." + std::to_string(i);
    fx.add_doi(cited, Validity::valid);
    records.push_back(rec("10.1/c" + std::to_string(i), cited));
  }
  auto report = compare_rulesets(records, {&extended(), &baseline()}, fx);
  for (const auto& stats : report.per_ruleset) {
    CHECK(stats.summary.already_valid == 20);
    CHECK(stats.summary.valid_after_cleaning == 0);
  }
  CHECK(report.disagreements.empty());
}

TEST_CASE("extended dominates baseline on the bundled corpus") {
  FixtureResolver fx;
  std::vector<CitationRecord> records;
  for (const auto& entry : example_corpus(extended())) {
    fx.add_doi(entry.expected, Validity::valid);
    records.push_back(rec("10.1/citing" + std::to_string(entry.rule_id), entry.invalid));
  }

  auto report = compare_rulesets(records, {&extended(), &baseline()}, fx);
  const auto& ext = report.per_ruleset[0];
  const auto& base = report.per_ruleset[1];
  CHECK(ext.summary.valid_after_cleaning == 23);
  CHECK(base.summary.valid_after_cleaning < 23);
  CHECK(ext.summary.valid_after_cleaning >= base.summary.valid_after_cleaning);
  CHECK(ext.summary.already_valid == base.summary.already_valid);

  // The row-8 record is among the disagreements, fixed only by extended.
  bool found_row8 = false;
  for (const auto& d : report.disagreements) {
    if (d.record.cited_raw == "10.1111/J.1536-7150.2006.00482.X/FULL>ACCESSED4") {
      found_row8 = true;
      CHECK(d.statuses[0] == CitationStatus::valid_after_cleaning);
      CHECK(d.statuses[1] == CitationStatus::still_invalid);
    }
  }
  CHECK(found_row8);

  // Per-class split: prefix, suffix and other rules all contributed.
  CHECK(ext.vac_prefix > 0);
  CHECK(ext.vac_suffix > 0);
  CHECK(ext.vac_other > 0);
  CHECK(base.vac_prefix == 0);  // the prior method's prefix rules are start-anchored
}

TEST_CASE("quarantinable citing DOIs raise instead of being processed") {
  FixtureResolver fx;
  CHECK_THROWS_AS(
      process_citation(extended(), fx, rec("not-a-doi", "10.1/x")),
      NoPrefixError);
}
