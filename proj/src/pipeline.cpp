#include "doiclean/pipeline.hpp"

#include <atomic>
#include <cassert>
#include <stdexcept>
#include <thread>

#include "doiclean/cache.hpp"

namespace doiclean {

const char* to_string(CitationStatus s) {
  switch (s) {
    case CitationStatus::already_valid: return "already_valid";
    case CitationStatus::valid_after_cleaning: return "valid_after_cleaning";
    case CitationStatus::still_invalid: return "still_invalid";
    case CitationStatus::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

void CorpusSummary::count(CitationStatus s) {
  ++total;
  switch (s) {
    case CitationStatus::already_valid: ++already_valid; break;
    case CitationStatus::valid_after_cleaning: ++valid_after_cleaning; break;
    case CitationStatus::still_invalid: ++still_invalid; break;
    case CitationStatus::indeterminate: ++indeterminate; break;
  }
}

PipelineResult process_citation(const RuleSet& ruleset, Resolver& resolver,
                                const CitationRecord& record) {
  PipelineResult result{record,
                        CitationStatus::indeterminate,
                        std::nullopt,
                        {},
                        extract_prefix(record.citing),
                        std::nullopt,
                        {}};

  Doi cited = parse_doi(record.cited_raw);
  result.cited_prefix = try_extract_prefix(cited);

  ResolutionOutcome first = resolver.resolve(cited);
  if (first.status == Validity::valid) {
    result.status = CitationStatus::already_valid;
    return result;
  }
  if (first.status == Validity::unknown) {
    result.status = CitationStatus::indeterminate;
    result.diagnostic = first.diagnostic;
    return result;
  }

  CleaningTrace trace = clean_string(ruleset, cited.normalized());
  result.fired_rules = trace.fired;
  if (!trace.changed) {
    result.status = CitationStatus::still_invalid;
    return result;
  }

  auto cleaned = Doi::try_parse(trace.output);
  if (!cleaned) {
    // Cleaning can reduce pure garbage to nothing; there is no DOI left to check.
    result.status = CitationStatus::still_invalid;
    return result;
  }
  result.cleaned = *cleaned;

  ResolutionOutcome second = resolver.resolve(*cleaned);
  switch (second.status) {
    case Validity::valid:
      result.status = CitationStatus::valid_after_cleaning;
      break;
    case Validity::invalid:
      result.status = CitationStatus::still_invalid;
      break;
    case Validity::unknown:
      result.status = CitationStatus::indeterminate;
      result.diagnostic = second.diagnostic;
      break;
  }
  return result;
}

namespace {

CorpusSummary run_corpus(const RuleSet& ruleset, Resolver& resolver, RecordSource& source,
                         const ResultSink& sink, unsigned workers) {
  constexpr size_t kChunk = 512;
  CorpusSummary summary;

  std::vector<CitationRecord> chunk;
  chunk.reserve(kChunk);
  for (;;) {
    chunk.clear();
    while (chunk.size() < kChunk) {
      auto rec = source();
      if (!rec) break;
      chunk.push_back(std::move(*rec));
    }
    if (chunk.empty()) break;

    std::vector<std::optional<PipelineResult>> out(chunk.size());
    if (workers <= 1) {
      for (size_t i = 0; i < chunk.size(); ++i) {
        out[i] = process_citation(ruleset, resolver, chunk[i]);
      }
    } else {
      std::atomic<size_t> next{0};
      unsigned n = static_cast<unsigned>(std::min<size_t>(workers, chunk.size()));
      std::vector<std::exception_ptr> errors(n);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (size_t i = next.fetch_add(1); i < chunk.size(); i = next.fetch_add(1)) {
              out[i] = process_citation(ruleset, resolver, chunk[i]);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    for (auto& r : out) {
      summary.count(r->status);
      sink(std::move(*r));
    }
  }
  return summary;
}

}  // namespace

CorpusSummary process_corpus(const RuleSet& ruleset, Resolver& resolver,
                             RecordSource source, const ResultSink& sink,
                             unsigned workers) {
  // Per-run dedup: every distinct cited (and cleaned) string reaches the
  // underlying resolver at most once, whatever the worker count.
  CachingResolver memo(resolver, nullptr, CacheTtl(), nullptr,
                       CachingResolver::Mode::per_run);
  return run_corpus(ruleset, memo, source, sink, workers);
}

CorpusSummary process_corpus(const RuleSet& ruleset, Resolver& resolver,
                             const std::vector<CitationRecord>& records,
                             std::vector<PipelineResult>& results, unsigned workers) {
  results.clear();
  results.reserve(records.size());
  size_t i = 0;
  RecordSource source = [&]() -> std::optional<CitationRecord> {
    if (i >= records.size()) return std::nullopt;
    return records[i++];
  };
  return process_corpus(
      ruleset, resolver, std::move(source),
      [&](PipelineResult r) { results.push_back(std::move(r)); }, workers);
}

ComparisonReport compare_rulesets(const std::vector<CitationRecord>& records,
                                  const std::vector<const RuleSet*>& rulesets,
                                  Resolver& resolver, unsigned workers) {
  if (rulesets.size() < 2) {
    throw std::invalid_argument("compare_rulesets needs at least two rulesets");
  }

  // One shared cache across all runs keeps step-1 verdicts identical.
  CachingResolver shared(resolver, nullptr, CacheTtl(), nullptr,
                         CachingResolver::Mode::per_run);

  ComparisonReport report;
  report.corpus_size = records.size();
  std::vector<std::vector<PipelineResult>> all_results;
  for (const RuleSet* rs : rulesets) {
    std::vector<PipelineResult> results;
    CorpusSummary summary = process_corpus(*rs, shared, records, results, workers);

    RulesetStats stats;
    stats.ruleset = rs->name();
    stats.summary = summary;
    for (const auto& r : results) {
      if (r.status != CitationStatus::valid_after_cleaning) continue;
      bool prefix = false, suffix = false, other = false;
      for (int id : r.fired_rules) {
        if (const Rule* rule = rs->find(id)) {
          switch (rule->cls) {
            case ErrorClass::prefix: prefix = true; break;
            case ErrorClass::suffix: suffix = true; break;
            case ErrorClass::other: other = true; break;
          }
        }
      }
      stats.vac_prefix += prefix ? 1 : 0;
      stats.vac_suffix += suffix ? 1 : 0;
      stats.vac_other += other ? 1 : 0;
    }
    report.per_ruleset.push_back(std::move(stats));
    all_results.push_back(std::move(results));
  }

  // Step 1 precedes cleaning, so this cannot differ between rulesets.
  for (const auto& stats : report.per_ruleset) {
    assert(stats.summary.already_valid == report.per_ruleset.front().summary.already_valid);
    (void)stats;
  }

  for (size_t i = 0; i < records.size(); ++i) {
    bool differs = false;
    for (size_t k = 1; k < all_results.size(); ++k) {
      if (all_results[k][i].status != all_results[0][i].status) {
        differs = true;
        break;
      }
    }
    if (!differs) continue;
    Disagreement d{records[i], {}, {}};
    for (const auto& results : all_results) {
      d.statuses.push_back(results[i].status);
      d.cleaned.push_back(results[i].cleaned ? results[i].cleaned->normalized() : "");
    }
    report.disagreements.push_back(std::move(d));
  }
  return report;
}

}  // namespace doiclean
