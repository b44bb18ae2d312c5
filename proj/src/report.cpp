#include "doiclean/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "doiclean/version.hpp"

namespace doiclean {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out.push_back(',');
    out += fields[i];
  }
  return out;
}

}  // namespace

CitationReader::CitationReader(std::istream& in) : csv_(in) {}

std::optional<CitationRecord> CitationReader::next() {
  for (;;) {
    auto line_no_before = csv_.line();
    auto row = csv_.next_row();
    if (!row) return std::nullopt;
    std::uint64_t line_no = line_no_before + 1;

    if (first_row_) {
      first_row_ = false;
      // A header row is one where neither column looks like a DOI.
      bool col0_doi = row->size() >= 1 && fold_ascii(trim((*row)[0])).rfind("10.", 0) == 0;
      bool col1_doi = row->size() >= 2 && fold_ascii(trim((*row)[1])).rfind("10.", 0) == 0;
      if (!col0_doi && !col1_doi) continue;
    }

    ++rows_read_;
    if (row->size() != 2) {
      quarantined_.push_back({line_no, join_row(*row),
                              "expected 2 columns, got " + std::to_string(row->size())});
      continue;
    }
    auto citing = Doi::try_parse((*row)[0]);
    if (!citing) {
      quarantined_.push_back({line_no, join_row(*row), "empty citing DOI"});
      continue;
    }
    if (!try_extract_prefix(*citing)) {
      quarantined_.push_back(
          {line_no, join_row(*row), "citing DOI has no extractable prefix"});
      continue;
    }
    if (trim((*row)[1]).empty()) {
      quarantined_.push_back({line_no, join_row(*row), "empty cited DOI"});
      continue;
    }
    return CitationRecord{*citing, (*row)[1]};
  }
}

const char* to_string(MatrixMode m) {
  return m == MatrixMode::pre_cleaning ? "pre_cleaning" : "post_cleaning";
}

void MatrixBuilder::add(const PipelineResult& result,
                        const PublisherAttribution& attribution) {
  if (result.status == CitationStatus::indeterminate) {
    ++matrix_.indeterminate_excluded;
    return;
  }
  bool became_valid = result.status == CitationStatus::already_valid ||
                      (matrix_.mode == MatrixMode::post_cleaning &&
                       result.status == CitationStatus::valid_after_cleaning);

  const std::string& citing_name = attribution.citing_publisher.name;
  // Main aggregates never carry fallback-sourced names.
  const std::string cited_name =
      attribution.fallback_used ? "unidentified" : attribution.cited_publisher.name;

  auto& out = matrix_.outgoing[citing_name];
  auto& in = matrix_.incoming[cited_name];
  if (became_valid) {
    ++out.became_valid;
    ++in.became_valid;
  } else {
    ++out.still_invalid;
    ++in.still_invalid;
  }
  ++matrix_.flows[{citing_name, cited_name}];
  ++matrix_.attributed_total;
}

PublisherMatrix build_publisher_matrix(const std::vector<PipelineResult>& results,
                                       const std::vector<PublisherAttribution>& attributions,
                                       MatrixMode mode) {
  MatrixBuilder builder(mode);
  for (size_t i = 0; i < results.size() && i < attributions.size(); ++i) {
    builder.add(results[i], attributions[i]);
  }
  return builder.finish();
}

std::vector<SankeyFlow> sankey_export(const PublisherMatrix& matrix, unsigned top_n) {
  auto top_names = [top_n](const std::map<std::string, PublisherTally>& side) {
    std::vector<std::pair<std::string, std::uint64_t>> ranked;
    for (const auto& [name, tally] : side) {
      ranked.emplace_back(name, tally.became_valid + tally.still_invalid);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::set<std::string> keep;
    for (size_t i = 0; i < ranked.size() && i < top_n; ++i) {
      keep.insert(ranked[i].first);
    }
    return keep;
  };

  std::set<std::string> sources = top_names(matrix.outgoing);
  std::set<std::string> targets = top_names(matrix.incoming);

  std::map<std::pair<std::string, std::string>, std::uint64_t> folded;
  for (const auto& [pair, count] : matrix.flows) {
    std::string s = sources.count(pair.first) ? pair.first : "other";
    std::string t = targets.count(pair.second) ? pair.second : "other";
    folded[{s, t}] += count;
  }

  std::vector<SankeyFlow> out;
  for (const auto& [pair, count] : folded) {
    out.push_back({pair.first, pair.second, count});
  }
  std::sort(out.begin(), out.end(), [](const SankeyFlow& a, const SankeyFlow& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  });
  return out;
}

HistogramBuilder::HistogramBuilder(const RuleSet& ruleset) {
  for (const auto& rule : ruleset.rules()) {
    histogram_.counts[rule.id] = 0;
  }
}

void HistogramBuilder::add(const PipelineResult& result) {
  if (result.status != CitationStatus::valid_after_cleaning) return;
  for (int id : result.fired_rules) {
    ++histogram_.counts[id];
  }
}

RuleHistogram rule_histogram(const std::vector<PipelineResult>& results,
                             const RuleSet& ruleset) {
  HistogramBuilder builder(ruleset);
  for (const auto& r : results) builder.add(r);
  return builder.finish();
}

bool AuditSampler::Entry::operator<(const Entry& o) const {
  if (tag != o.tag) return tag < o.tag;
  if (triple.citing != o.triple.citing) return triple.citing < o.triple.citing;
  if (triple.cited_raw != o.triple.cited_raw) return triple.cited_raw < o.triple.cited_raw;
  return triple.cleaned < o.triple.cleaned;
}

AuditSampler::AuditSampler(const RuleSet& ruleset, unsigned per_rule, std::uint64_t seed)
    : per_rule_(per_rule), seed_(seed) {
  for (const auto& rule : ruleset.rules()) {
    pools_[rule.id];
  }
}

void AuditSampler::add(const PipelineResult& result) {
  if (result.status != CitationStatus::valid_after_cleaning) return;
  AuditTriple triple{result.record.citing.normalized(), result.record.cited_raw,
                     result.cleaned ? result.cleaned->normalized() : ""};
  for (int id : result.fired_rules) {
    std::string key = result.record.citing.folded();
    key.push_back('\x1f');
    key += result.record.cited_raw;
    std::uint64_t tag =
        splitmix64(fnv1a64(key) ^ splitmix64(seed_ * 0x9e3779b97f4a7c15ULL +
                                             static_cast<std::uint64_t>(id)));
    auto& pool = pools_[id];
    pool.insert({tag, triple});
    if (pool.size() > per_rule_) {
      pool.erase(std::prev(pool.end()));
    }
  }
}

AuditSample AuditSampler::finish() const {
  AuditSample sample;
  sample.seed = seed_;
  sample.per_rule = per_rule_;
  for (const auto& [id, pool] : pools_) {
    auto& triples = sample.by_rule[id];
    for (const auto& entry : pool) {
      triples.push_back(entry.triple);
    }
    std::sort(triples.begin(), triples.end(), [](const AuditTriple& a, const AuditTriple& b) {
      if (a.citing != b.citing) return a.citing < b.citing;
      return a.cited_raw < b.cited_raw;
    });
  }
  return sample;
}

AuditSample stratified_sample(const std::vector<PipelineResult>& results,
                              const RuleSet& ruleset, unsigned per_rule,
                              std::uint64_t seed) {
  AuditSampler sampler(ruleset, per_rule, seed);
  for (const auto& r : results) sampler.add(r);
  return sampler.finish();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw std::runtime_error("write to " + path.string() + " failed");
  }
}

}  // namespace

std::vector<std::filesystem::path> write_reports(
    const std::filesystem::path& dir, const PublisherMatrix& matrix,
    const std::vector<SankeyFlow>& sankey, const RuleHistogram& histogram,
    const AuditSample& sample, const std::vector<PublisherRecord>& fallback_publishers,
    const RunMeta& meta, const ComparisonReport* comparison) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  {
    std::string body = "publisher,outgoing_valid,outgoing_invalid,incoming_valid,incoming_invalid\n";
    std::set<std::string> names;
    for (const auto& [name, _] : matrix.outgoing) names.insert(name);
    for (const auto& [name, _] : matrix.incoming) names.insert(name);
    for (const auto& name : names) {
      PublisherTally out{};
      PublisherTally in{};
      if (auto it = matrix.outgoing.find(name); it != matrix.outgoing.end()) out = it->second;
      if (auto it = matrix.incoming.find(name); it != matrix.incoming.end()) in = it->second;
      body += csv_row({name, std::to_string(out.became_valid),
                       std::to_string(out.still_invalid), std::to_string(in.became_valid),
                       std::to_string(in.still_invalid)});
    }
    auto path = dir / "publisher_matrix.csv";
    write_file(path, body);
    written.push_back(path);
  }

  {
    std::string body = "source,target,count\n";
    for (const auto& flow : sankey) {
      body += csv_row({flow.source, flow.target, std::to_string(flow.count)});
    }
    auto path = dir / "sankey.csv";
    write_file(path, body);
    written.push_back(path);
  }

  {
    std::string body = "rule_id,count\n";
    for (const auto& [id, count] : histogram.counts) {
      body += csv_row({std::to_string(id), std::to_string(count)});
    }
    auto path = dir / "rule_histogram.csv";
    write_file(path, body);
    written.push_back(path);
  }

  {
    std::string body = "rule_id,citing,cited_raw,cleaned\n";
    for (const auto& [id, triples] : sample.by_rule) {
      for (const auto& t : triples) {
        body += csv_row({std::to_string(id), t.citing, t.cited_raw, t.cleaned});
      }
    }
    auto path = dir / "audit_sample.csv";
    write_file(path, body);
    written.push_back(path);
  }

  {
    std::string body = "prefix,name,source\n";
    std::map<std::string, PublisherRecord> dedup;
    for (const auto& rec : fallback_publishers) {
      dedup.emplace(rec.prefix, rec);
    }
    for (const auto& [prefix, rec] : dedup) {
      body += csv_row({prefix, rec.name, to_string(rec.source)});
    }
    auto path = dir / "fallback_publishers.csv";
    write_file(path, body);
    written.push_back(path);
  }

  if (comparison != nullptr) {
    std::string body =
        "ruleset,corpus_size,already_valid,valid_after_cleaning,vac_prefix,vac_suffix,"
        "vac_other,still_invalid,indeterminate\n";
    for (const auto& stats : comparison->per_ruleset) {
      body += csv_row({stats.ruleset, std::to_string(comparison->corpus_size),
                       std::to_string(stats.summary.already_valid),
                       std::to_string(stats.summary.valid_after_cleaning),
                       std::to_string(stats.vac_prefix), std::to_string(stats.vac_suffix),
                       std::to_string(stats.vac_other),
                       std::to_string(stats.summary.still_invalid),
                       std::to_string(stats.summary.indeterminate)});
    }
    auto path = dir / "comparison.csv";
    write_file(path, body);
    written.push_back(path);
  }

  {
    json j;
    j["tool"] = std::string(kToolName) + " " + std::string(kVersion);
    j["rulesets"] = json::array();
    for (const auto& [name, hash] : meta.rulesets) {
      j["rulesets"].push_back({{"name", name}, {"hash", hash}});
    }
    j["resolver_mode"] = meta.resolver_mode;
    j["seed"] = meta.seed;
    j["per_rule_sample"] = meta.per_rule;
    j["top_n"] = meta.top_n;
    j["matrix_mode"] = to_string(meta.matrix_mode);
    j["workers"] = meta.workers;
    j["counts"] = {{"rows_read", meta.rows_read},
                   {"processed", meta.summary.total},
                   {"already_valid", meta.summary.already_valid},
                   {"valid_after_cleaning", meta.summary.valid_after_cleaning},
                   {"still_invalid", meta.summary.still_invalid},
                   {"indeterminate", meta.summary.indeterminate},
                   {"quarantined", meta.quarantined.size()},
                   {"attributed", matrix.attributed_total}};
    j["quarantined"] = json::array();
    size_t qshown = 0;
    for (const auto& q : meta.quarantined) {
      if (++qshown > 100) break;
      j["quarantined"].push_back(
          {{"line", q.line}, {"content", q.content}, {"reason", q.reason}});
    }
    if (comparison != nullptr) {
      j["disagreements_total"] = comparison->disagreements.size();
      j["disagreements"] = json::array();
      size_t shown = 0;
      for (const auto& d : comparison->disagreements) {
        if (++shown > 1000) break;
        json entry;
        entry["citing"] = d.record.citing.normalized();
        entry["cited"] = d.record.cited_raw;
        json verdicts = json::object();
        for (size_t i = 0; i < d.statuses.size() && i < comparison->per_ruleset.size();
             ++i) {
          verdicts[comparison->per_ruleset[i].ruleset] = to_string(d.statuses[i]);
        }
        entry["verdicts"] = verdicts;
        j["disagreements"].push_back(entry);
      }
    }
    j["notes"] = meta.notes;
    auto path = dir / "run_meta.json";
    write_file(path, j.dump(2) + "\n");
    written.push_back(path);
  }

  return written;
}

}  // namespace doiclean
