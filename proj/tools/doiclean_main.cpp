#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "doiclean/attribution.hpp"
#include "doiclean/config.hpp"
#include "doiclean/pipeline.hpp"
#include "doiclean/report.hpp"
#include "doiclean/version.hpp"

using namespace doiclean;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;       // validate: DOI does not resolve
constexpr int kExitInputError = 2;    // unreadable/missing input
constexpr int kExitConfigError = 3;   // bad flags, rulesets, fixtures
constexpr int kExitIoError = 4;       // cannot write outputs
constexpr int kExitUnknown = 5;       // validate: verdict unavailable

void add_common_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--fixture", config.fixture,
                  "fixture file; selects hermetic offline resolution");
  cmd->add_option("--fixture-unlisted", config.fixture_unlisted,
                  "fixture verdict for unlisted DOIs: invalid|unknown");
  cmd->add_option("--cache", config.cache_path, "persistent resolution cache file");
  cmd->add_option("--rate", config.rate_per_second, "outbound requests per second");
  cmd->add_option("--mailto", config.mailto, "contact address sent with API requests");
  cmd->add_option("--doi-api-base", config.endpoints.doi_api_base);
  cmd->add_option("--crossref-api-base", config.endpoints.crossref_api_base);
  cmd->add_option("--datacite-api-base", config.endpoints.datacite_api_base);
  cmd->add_option("--medra-api-base", config.endpoints.medra_api_base);
}

json trace_to_json(const CleaningTrace& trace) {
  return json{{"input", trace.input},
              {"output", trace.output},
              {"changed", trace.changed},
              {"fired", trace.fired}};
}

struct RunAggregates {
  MatrixBuilder matrix;
  HistogramBuilder histogram;
  AuditSampler sampler;
  std::vector<PublisherRecord> fallback_publishers;
  std::uint64_t attribution_deferred = 0;

  RunAggregates(const RuleSet& ruleset, const RunConfig& config)
      : matrix(matrix_mode_from(config)),
        histogram(ruleset),
        sampler(ruleset, config.per_rule_sample, config.seed) {}

  void add(const PipelineResult& result, Resolver& resolver) {
    AttributionResult att = attribute(result, resolver);
    if (att.deferred) ++attribution_deferred;
    if (att.attribution.fallback_used) {
      fallback_publishers.push_back(att.attribution.cited_publisher);
    }
    matrix.add(result, att.attribution);
    histogram.add(result);
    sampler.add(result);
  }
};

int cmd_clean(const RunConfig& config, const std::vector<std::string>& inputs,
              bool from_stdin) {
  RuleSet ruleset = [&] {
    try {
      return load_ruleset(ruleset_path(config.ruleset));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      std::exit(kExitInputError);
    }
  }();

  auto emit = [&](const std::string& s) {
    std::cout << trace_to_json(clean_string(ruleset, trim(s))).dump() << "\n";
  };
  for (const auto& s : inputs) emit(s);
  if (from_stdin) {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (!trim(line).empty()) emit(line);
    }
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& config, const std::string& doi_text) {
  auto doi = Doi::try_parse(doi_text);
  if (!doi) {
    std::cerr << "error: empty DOI\n";
    return kExitConfigError;
  }
  ResolverHandle handle(config);
  ResolutionOutcome outcome = handle.get().resolve(*doi);
  json j{{"doi", doi->normalized()}, {"status", to_string(outcome.status)}};
  if (!outcome.agency.empty()) j["agency"] = outcome.agency;
  if (!outcome.diagnostic.empty()) j["diagnostic"] = outcome.diagnostic;
  std::cout << j.dump() << "\n";
  switch (outcome.status) {
    case Validity::valid: return kExitOk;
    case Validity::invalid: return kExitInvalid;
    case Validity::unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

int cmd_attribute(const RunConfig& config, const std::string& citing,
                  const std::string& cited) {
  RuleSet ruleset = load_ruleset(ruleset_path(config.ruleset));
  ResolverHandle handle(config);
  auto citing_doi = Doi::try_parse(citing);
  if (!citing_doi || !try_extract_prefix(*citing_doi)) {
    std::cerr << "error: citing DOI needs a 10.* prefix\n";
    return kExitInputError;
  }
  PipelineResult result =
      process_citation(ruleset, handle.get(), CitationRecord{*citing_doi, cited});
  AttributionResult att = attribute(result, handle.get());
  json j{{"citing", citing_doi->normalized()},
         {"cited", cited},
         {"status", to_string(result.status)},
         {"citing_publisher",
          {{"prefix", att.attribution.citing_publisher.prefix},
           {"name", att.attribution.citing_publisher.name},
           {"source", to_string(att.attribution.citing_publisher.source)}}},
         {"cited_publisher",
          {{"prefix", att.attribution.cited_publisher.prefix},
           {"name", att.attribution.cited_publisher.name},
           {"source", to_string(att.attribution.cited_publisher.source)}}},
         {"fallback_used", att.attribution.fallback_used},
         {"attribution_deferred", att.deferred}};
  std::cout << j.dump() << "\n";
  return kExitOk;
}

// run/compare/sample share the ingest → pipeline → attribution → report
// sequence; `emit` controls which files are written.
enum class RunKind { full, compare_only, sample_only };

int cmd_run(RunConfig config, const std::string& input_path, RunKind kind) {
  if (kind == RunKind::compare_only) config.compare = true;

  RuleSet ruleset = [&] {
    try {
      return load_ruleset(ruleset_path(config.ruleset));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      std::exit(kExitConfigError);
    }
  }();
  std::optional<RuleSet> baseline;
  if (config.compare) {
    try {
      baseline = load_ruleset(ruleset_path(config.baseline_ruleset));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      std::exit(kExitConfigError);
    }
  }

  std::ifstream in(input_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open input file " << input_path << "\n";
    return kExitInputError;
  }

  std::unique_ptr<ResolverHandle> handle;
  try {
    handle = std::make_unique<ResolverHandle>(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  unsigned workers = effective_workers(config);
  CitationReader reader(in);
  RunAggregates agg(ruleset, config);

  std::uint64_t progress = 0;
  auto tick = [&] {
    if (++progress % 1000 == 0) std::cerr << "processed " << progress << " records\r";
  };

  CorpusSummary summary;
  ComparisonReport comparison;
  if (config.compare) {
    // Multi-pass over the same records; keep them.
    std::vector<CitationRecord> records;
    while (auto rec = reader.next()) records.push_back(std::move(*rec));
    std::vector<PipelineResult> results;
    summary = process_corpus(ruleset, handle->get(), records, results, workers);
    for (const auto& r : results) {
      agg.add(r, handle->get());
      tick();
    }
    comparison =
        compare_rulesets(records, {&ruleset, &*baseline}, handle->get(), workers);
  } else {
    summary = process_corpus(
        ruleset, handle->get(), [&] { return reader.next(); },
        [&](PipelineResult result) {
          agg.add(result, handle->get());
          tick();
        },
        workers);
  }
  if (progress >= 1000) std::cerr << "\n";

  RunMeta meta;
  meta.rulesets.push_back({ruleset.name(), std::to_string(ruleset.source_hash())});
  if (baseline) {
    meta.rulesets.push_back({baseline->name(), std::to_string(baseline->source_hash())});
  }
  meta.resolver_mode = handle->mode();
  meta.seed = config.seed;
  meta.per_rule = config.per_rule_sample;
  meta.top_n = config.top_n;
  meta.matrix_mode = matrix_mode_from(config);
  meta.workers = workers;
  meta.summary = summary;
  meta.rows_read = reader.rows_read();
  meta.quarantined = reader.quarantined();
  meta.notes = {
      "matrix 'became valid' split: " + std::string(to_string(meta.matrix_mode)),
      "counts are pair-level: every input row is processed, duplicates are not collapsed",
      "agency fallback applies when the cited DOI is handle-valid but unknown to Crossref",
      "fallback-sourced names appear only in fallback_publishers.csv"};
  if (agg.attribution_deferred > 0) {
    meta.notes.push_back("attribution deferred (retryable) for " +
                         std::to_string(agg.attribution_deferred) + " records");
  }

  PublisherMatrix matrix = agg.matrix.finish();
  std::vector<std::filesystem::path> written;
  try {
    if (kind == RunKind::sample_only) {
      std::filesystem::create_directories(config.out_dir);
      AuditSample sample = agg.sampler.finish();
      std::string body = "rule_id,citing,cited_raw,cleaned\n";
      for (const auto& [id, triples] : sample.by_rule) {
        for (const auto& t : triples) {
          body += csv_row({std::to_string(id), t.citing, t.cited_raw, t.cleaned});
        }
      }
      auto path = std::filesystem::path(config.out_dir) / "audit_sample.csv";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      out << body;
      written.push_back(path);
    } else {
      written = write_reports(config.out_dir, matrix,
                              sankey_export(matrix, config.top_n), agg.histogram.finish(),
                              agg.sampler.finish(), agg.fallback_publishers, meta,
                              config.compare ? &comparison : nullptr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }

  json out{{"rows_read", meta.rows_read},
           {"quarantined", meta.quarantined.size()},
           {"processed", summary.total},
           {"already_valid", summary.already_valid},
           {"valid_after_cleaning", summary.valid_after_cleaning},
           {"still_invalid", summary.still_invalid},
           {"indeterminate", summary.indeterminate},
           {"out_dir", config.out_dir}};
  if (config.compare) {
    json per;
    for (const auto& stats : comparison.per_ruleset) {
      per[stats.ruleset] = stats.summary.valid_after_cleaning;
    }
    out["valid_after_cleaning_by_ruleset"] = per;
    out["disagreements"] = comparison.disagreements.size();
  }
  json files = json::array();
  for (const auto& p : written) files.push_back(p.string());
  out["files"] = files;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               " - detect, classify and repair malformed DOIs in citation corpora"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig config;
  try {
    config = load_base_config();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  // clean
  std::vector<std::string> clean_inputs;
  bool clean_stdin = false;
  auto* clean = app.add_subcommand("clean", "apply the cleaning rules, no network");
  clean->add_option("doi", clean_inputs, "DOI strings to clean");
  clean->add_flag("--stdin", clean_stdin, "read one DOI per line from stdin");
  clean->add_option("--ruleset", config.ruleset, "ruleset name or path");

  // validate
  std::string validate_doi;
  auto* validate = app.add_subcommand("validate", "one resolver lookup for one DOI");
  validate->add_option("doi", validate_doi)->required();
  add_common_flags(validate, config);

  // attribute
  std::string att_citing, att_cited;
  auto* attr = app.add_subcommand("attribute", "publisher attribution for one citation");
  attr->add_option("citing", att_citing)->required();
  attr->add_option("cited", att_cited)->required();
  attr->add_option("--ruleset", config.ruleset);
  add_common_flags(attr, config);

  // run / compare / sample share flags
  std::string input_path;
  auto add_run_flags = [&](CLI::App* cmd, bool with_compare) {
    cmd->add_option("input", input_path, "two-column CSV of citing,cited DOIs")
        ->required();
    cmd->add_option("--ruleset", config.ruleset);
    cmd->add_option("--baseline-ruleset", config.baseline_ruleset);
    if (with_compare) {
      cmd->add_flag("--compare", config.compare,
                    "also run the baseline ruleset and emit comparison.csv");
    }
    cmd->add_option("--workers", config.workers, "0 = one per processor");
    cmd->add_option("--seed", config.seed);
    cmd->add_option("--top-n", config.top_n);
    cmd->add_option("--per-rule", config.per_rule_sample);
    cmd->add_option("--out", config.out_dir);
    cmd->add_option("--matrix-mode", config.matrix_mode, "pre_cleaning|post_cleaning");
    add_common_flags(cmd, config);
  };
  auto* run = app.add_subcommand("run", "full pipeline: ingest, clean, attribute, report");
  add_run_flags(run, true);
  auto* compare =
      app.add_subcommand("compare", "run two rulesets and report the differences");
  add_run_flags(compare, false);
  auto* sample = app.add_subcommand("sample", "draw the per-rule audit sample only");
  add_run_flags(sample, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (clean->parsed()) return cmd_clean(config, clean_inputs, clean_stdin);
    if (validate->parsed()) return cmd_validate(config, validate_doi);
    if (attr->parsed()) return cmd_attribute(config, att_citing, att_cited);
    if (run->parsed()) return cmd_run(config, input_path, RunKind::full);
    if (compare->parsed()) return cmd_run(config, input_path, RunKind::compare_only);
    if (sample->parsed()) return cmd_run(config, input_path, RunKind::sample_only);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitConfigError;
}
