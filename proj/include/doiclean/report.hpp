#ifndef DOICLEAN_REPORT_HPP
#define DOICLEAN_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "doiclean/attribution.hpp"
#include "doiclean/csv.hpp"
#include "doiclean/pipeline.hpp"

namespace doiclean {

struct QuarantinedRow {
  std::uint64_t line = 0;
  std::string content;
  std::string reason;
};

/// Streams citing,cited pairs out of a two-column CSV (header optional).
/// Malformed rows are quarantined with their line numbers instead of
/// aborting the run; rows that make it through are guaranteed to have a
/// parseable citing DOI with an extractable prefix.
class CitationReader {
public:
  explicit CitationReader(std::istream& in);

  std::optional<CitationRecord> next();
  const std::vector<QuarantinedRow>& quarantined() const { return quarantined_; }
  std::uint64_t rows_read() const { return rows_read_; }

private:
  CsvReader csv_;
  bool first_row_ = true;
  std::uint64_t rows_read_ = 0;
  std::vector<QuarantinedRow> quarantined_;
};

// Which results count as "became valid" in the publisher split. The
// figures this feeds were collected before any cleaning upstream, so the
// default counts only step-1 revalidations; post_cleaning folds in the
// records the rules fixed.
enum class MatrixMode { pre_cleaning, post_cleaning };

const char* to_string(MatrixMode m);

struct PublisherTally {
  std::uint64_t became_valid = 0;
  std::uint64_t still_invalid = 0;
};

struct PublisherMatrix {
  MatrixMode mode = MatrixMode::pre_cleaning;
  std::map<std::string, PublisherTally> outgoing;  // keyed by citing publisher
  std::map<std::string, PublisherTally> incoming;  // keyed by cited publisher
  std::map<std::pair<std::string, std::string>, std::uint64_t> flows;
  std::uint64_t attributed_total = 0;
  std::uint64_t indeterminate_excluded = 0;
};

/// Accumulates the outgoing/incoming/flow aggregates. Single-writer: feed
/// it from the ordered result stream. Fallback-sourced publisher names
/// stay out of these aggregates; the cited side of such records counts as
/// "unidentified" here and the name goes to the fallback report.
class MatrixBuilder {
public:
  explicit MatrixBuilder(MatrixMode mode) { matrix_.mode = mode; }

  void add(const PipelineResult& result, const PublisherAttribution& attribution);
  PublisherMatrix finish() { return std::move(matrix_); }

private:
  PublisherMatrix matrix_;
};

PublisherMatrix build_publisher_matrix(const std::vector<PipelineResult>& results,
                                       const std::vector<PublisherAttribution>& attributions,
                                       MatrixMode mode = MatrixMode::pre_cleaning);

struct SankeyFlow {
  std::string source;
  std::string target;
  std::uint64_t count = 0;
};

// Keeps the top_n citing publishers by outgoing count and the top_n cited
// publishers by incoming count; everything else collapses into "other".
// Total flow is conserved.
std::vector<SankeyFlow> sankey_export(const PublisherMatrix& matrix, unsigned top_n);

struct RuleHistogram {
  std::map<int, std::uint64_t> counts;  // one entry per rule id in the ruleset
};

/// Per-rule firing counts over citations that proved valid after cleaning.
/// A citation fixed by several rules increments each of them.
class HistogramBuilder {
public:
  explicit HistogramBuilder(const RuleSet& ruleset);
  void add(const PipelineResult& result);
  RuleHistogram finish() { return std::move(histogram_); }

private:
  RuleHistogram histogram_;
};

RuleHistogram rule_histogram(const std::vector<PipelineResult>& results,
                             const RuleSet& ruleset);

struct AuditTriple {
  std::string citing;
  std::string cited_raw;
  std::string cleaned;
};

struct AuditSample {
  std::uint64_t seed = 0;
  unsigned per_rule = 0;
  std::map<int, std::vector<AuditTriple>> by_rule;
};

/// Uniform per-rule sample of corrected citations for manual audit, a
/// fixed quantity per rule rather than proportional to rule popularity.
/// Selection keys on a seeded hash of the citation identity, so the draw
/// is deterministic and independent of input order, and needs only
/// bounded memory.
class AuditSampler {
public:
  AuditSampler(const RuleSet& ruleset, unsigned per_rule, std::uint64_t seed);
  void add(const PipelineResult& result);
  AuditSample finish() const;

private:
  struct Entry {
    std::uint64_t tag;
    AuditTriple triple;
    bool operator<(const Entry& o) const;
  };

  unsigned per_rule_;
  std::uint64_t seed_;
  std::map<int, std::multiset<Entry>> pools_;
};

AuditSample stratified_sample(const std::vector<PipelineResult>& results,
                              const RuleSet& ruleset, unsigned per_rule,
                              std::uint64_t seed);

struct RunMeta {
  std::vector<std::pair<std::string, std::string>> rulesets;  // name, content hash
  std::string resolver_mode;
  std::uint64_t seed = 0;
  unsigned per_rule = 10;
  unsigned top_n = 10;
  MatrixMode matrix_mode = MatrixMode::pre_cleaning;
  unsigned workers = 1;
  CorpusSummary summary;
  std::uint64_t rows_read = 0;
  std::vector<QuarantinedRow> quarantined;
  std::vector<std::string> notes;
};

// Writes publisher_matrix.csv, sankey.csv, rule_histogram.csv,
// audit_sample.csv, fallback_publishers.csv and run_meta.json into `dir`
// (plus comparison.csv when a comparison ran). Returns the paths written.
// Output is a pure function of its inputs: reruns are byte-identical.
std::vector<std::filesystem::path> write_reports(
    const std::filesystem::path& dir, const PublisherMatrix& matrix,
    const std::vector<SankeyFlow>& sankey, const RuleHistogram& histogram,
    const AuditSample& sample, const std::vector<PublisherRecord>& fallback_publishers,
    const RunMeta& meta, const ComparisonReport* comparison = nullptr);

}  // namespace doiclean

#endif
