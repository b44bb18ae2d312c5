#ifndef DOICLEAN_PIPELINE_HPP
#define DOICLEAN_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "doiclean/doi.hpp"
#include "doiclean/resolver.hpp"
#include "doiclean/rules.hpp"

namespace doiclean {

// One citing→cited pair as read from the input. The citing DOI is taken
// to be correct; only the cited side is checked and cleaned.
struct CitationRecord {
  Doi citing;
  std::string cited_raw;
};

enum class CitationStatus {
  already_valid,         // resolved before any cleaning (temporarily invalid upstream)
  valid_after_cleaning,  // cleaning changed the string and the result resolves
  still_invalid,         // not resolvable, cleaned or not
  indeterminate          // a resolver lookup came back unknown; retryable
};

const char* to_string(CitationStatus s);

struct PipelineResult {
  CitationRecord record;
  CitationStatus status = CitationStatus::indeterminate;
  std::optional<Doi> cleaned;   // present when cleaning changed the string
  std::vector<int> fired_rules;
  DoiPrefix citing_prefix;
  std::optional<DoiPrefix> cited_prefix;  // from the raw cited string; absent when unextractable
  std::string diagnostic;                 // set for indeterminate results
};

struct CorpusSummary {
  std::uint64_t total = 0;
  std::uint64_t already_valid = 0;
  std::uint64_t valid_after_cleaning = 0;
  std::uint64_t still_invalid = 0;
  std::uint64_t indeterminate = 0;

  void count(CitationStatus s);
};

// Step 1: resolve the cited DOI as read; valid means already_valid and no
// cleaning happens. Step 2: clean. Step 3: resolve the cleaned form when
// cleaning changed it (an unchanged string was already checked in step 1).
// An unknown resolver verdict at either step makes the record
// indeterminate, never invalid.
PipelineResult process_citation(const RuleSet& ruleset, Resolver& resolver,
                                const CitationRecord& record);

using RecordSource = std::function<std::optional<CitationRecord>()>;
// Invoked in input order from a single thread.
using ResultSink = std::function<void(PipelineResult)>;

// Fans records out over `workers` threads; emission is re-ordered back to
// input order, and distinct cited strings reach the resolver at most once
// per run. `workers == 1` is the reference mode for equivalence tests.
CorpusSummary process_corpus(const RuleSet& ruleset, Resolver& resolver,
                             RecordSource source, const ResultSink& sink,
                             unsigned workers = 1);

CorpusSummary process_corpus(const RuleSet& ruleset, Resolver& resolver,
                             const std::vector<CitationRecord>& records,
                             std::vector<PipelineResult>& results, unsigned workers = 1);

struct RulesetStats {
  std::string ruleset;
  CorpusSummary summary;
  // A record counts under every class whose rules fired on it, so a
  // two-error fix increments two buckets.
  std::uint64_t vac_prefix = 0;
  std::uint64_t vac_suffix = 0;
  std::uint64_t vac_other = 0;
};

struct Disagreement {
  CitationRecord record;
  std::vector<CitationStatus> statuses;  // aligned with the ruleset list
  std::vector<std::string> cleaned;
};

struct ComparisonReport {
  std::uint64_t corpus_size = 0;
  std::vector<RulesetStats> per_ruleset;
  std::vector<Disagreement> disagreements;
};

// Runs the corpus once per ruleset against one shared resolver cache, so
// step-1 verdicts (and their counts) are identical across rulesets.
ComparisonReport compare_rulesets(const std::vector<CitationRecord>& records,
                                  const std::vector<const RuleSet*>& rulesets,
                                  Resolver& resolver, unsigned workers = 1);

}  // namespace doiclean

#endif
