#include "doiclean/resolver.hpp"

#include <fstream>

#include <json.hpp>

namespace doiclean {

using nlohmann::json;

const char* to_string(PublisherSource s) {
  switch (s) {
    case PublisherSource::crossref: return "crossref";
    case PublisherSource::datacite: return "datacite";
    case PublisherSource::medra: return "medra";
    case PublisherSource::cnki: return "cnki";
    case PublisherSource::unidentified: return "unidentified";
    case PublisherSource::test_account: return "test_account";
  }
  return "unidentified";
}

std::optional<PublisherSource> publisher_source_from_string(std::string_view s) {
  if (s == "crossref") return PublisherSource::crossref;
  if (s == "datacite") return PublisherSource::datacite;
  if (s == "medra") return PublisherSource::medra;
  if (s == "cnki") return PublisherSource::cnki;
  if (s == "unidentified") return PublisherSource::unidentified;
  if (s == "test_account") return PublisherSource::test_account;
  return std::nullopt;
}

PublisherRecord unidentified_record(const DoiPrefix& prefix) {
  return {prefix.value(), "unidentified", PublisherSource::unidentified};
}

PublisherRecord test_account_record() {
  return {std::string(kTestAccountPrefix), "Test accounts",
          PublisherSource::test_account};
}

PublisherLookup Resolver::crossref_publisher(const DoiPrefix& prefix) {
  if (prefix.folded() == kTestAccountPrefix) {
    return {LookupState::hit, test_account_record(), {}};
  }
  return do_crossref_publisher(prefix);
}

bool is_cnki_url(std::string_view url) {
  auto scheme_end = url.find("://");
  std::string_view rest = scheme_end == std::string_view::npos
                              ? url
                              : url.substr(scheme_end + 3);
  auto host_end = rest.find_first_of("/:?");
  std::string host = fold_ascii(rest.substr(0, host_end));
  if (host == "cnki.net") return true;
  return host.size() > 9 && host.ends_with(".cnki.net");
}

PublisherLookup lookup_agency_fallback(Resolver& resolver, const DoiPrefix& prefix,
                                       const Doi& sample) {
  PublisherLookup dc = resolver.datacite_publisher(prefix);
  if (dc.state != LookupState::miss) return dc;

  PublisherLookup me = resolver.medra_publisher(prefix);
  if (me.state != LookupState::miss) return me;

  ResolutionOutcome handle = resolver.resolve(sample);
  if (handle.status == Validity::unknown) {
    return {LookupState::deferred, unidentified_record(prefix), handle.diagnostic};
  }
  if (!handle.url.empty() && is_cnki_url(handle.url)) {
    return {LookupState::hit, {prefix.value(), "CNKI", PublisherSource::cnki}, {}};
  }
  return {LookupState::miss, unidentified_record(prefix), {}};
}

void FixtureResolver::load_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open fixture file " + file.string());
  }
  FixtureResolver& fx = *this;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("fixture " + file.string() + " line " +
                               std::to_string(lineno) + ": " + e.what());
    }
    const std::string kind = rec.value("kind", "");
    const std::string key = rec.value("key", "");
    if (key.empty()) {
      throw std::runtime_error("fixture line " + std::to_string(lineno) + ": no key");
    }
    if (kind == "doi") {
      auto status = validity_from_string(rec.value("status", ""));
      if (!status) {
        throw std::runtime_error("fixture line " + std::to_string(lineno) +
                                 ": bad status");
      }
      fx.add_doi(key, *status, rec.value("agency", ""), rec.value("url", ""));
    } else if (kind == "prefix") {
      auto source = publisher_source_from_string(rec.value("source", ""));
      if (!source) {
        throw std::runtime_error("fixture line " + std::to_string(lineno) +
                                 ": bad source");
      }
      fx.add_prefix(key, rec.value("name", ""), *source);
    } else {
      throw std::runtime_error("fixture line " + std::to_string(lineno) +
                               ": unknown kind \"" + kind + "\"");
    }
  }
}

void FixtureResolver::add_doi(const std::string& doi, Validity status, std::string agency,
                              std::string url) {
  std::lock_guard lock(mu_);
  dois_[fold_ascii(trim(doi))] = {status, std::move(agency), std::move(url)};
}

void FixtureResolver::add_prefix(const std::string& prefix, std::string name,
                                 PublisherSource source) {
  std::lock_guard lock(mu_);
  prefixes_.insert_or_assign(fold_ascii(prefix),
                             PublisherRecord{prefix, std::move(name), source});
}

ResolutionOutcome FixtureResolver::do_resolve(const Doi& doi) {
  std::lock_guard lock(mu_);
  std::string key = doi.folded();
  ++resolve_counts_[key];
  ++resolve_total_;
  ResolutionOutcome out;
  out.checked_at = std::chrono::system_clock::now();
  auto it = dois_.find(key);
  if (it == dois_.end()) {
    if (unlisted_ == UnlistedPolicy::invalid) {
      out.status = Validity::invalid;
    } else {
      out.status = Validity::unknown;
      out.diagnostic = "not listed in fixture";
    }
    return out;
  }
  out.status = it->second.status;
  out.url = it->second.url;
  if (out.status == Validity::valid) {
    out.agency = it->second.agency;
  } else if (out.status == Validity::unknown) {
    out.diagnostic = "fixture marks this DOI unknown";
  }
  return out;
}

PublisherLookup FixtureResolver::do_crossref_publisher(const DoiPrefix& prefix) {
  std::lock_guard lock(mu_);
  std::string key = prefix.folded();
  ++crossref_counts_[key];
  ++crossref_total_;
  auto it = prefixes_.find(key);
  if (it != prefixes_.end() && it->second.source == PublisherSource::crossref) {
    return {LookupState::hit, it->second, {}};
  }
  return {LookupState::miss, unidentified_record(prefix), {}};
}

PublisherLookup FixtureResolver::agency_lookup(const DoiPrefix& prefix,
                                               PublisherSource wanted,
                                               std::uint64_t& counter) {
  std::lock_guard lock(mu_);
  ++counter;
  auto it = prefixes_.find(prefix.folded());
  if (it != prefixes_.end() && it->second.source == wanted) {
    return {LookupState::hit, it->second, {}};
  }
  return {LookupState::miss, unidentified_record(prefix), {}};
}

PublisherLookup FixtureResolver::do_datacite_publisher(const DoiPrefix& prefix) {
  return agency_lookup(prefix, PublisherSource::datacite, datacite_total_);
}

PublisherLookup FixtureResolver::do_medra_publisher(const DoiPrefix& prefix) {
  return agency_lookup(prefix, PublisherSource::medra, medra_total_);
}

std::uint64_t FixtureResolver::resolve_calls_total() const {
  std::lock_guard lock(mu_);
  return resolve_total_;
}

std::uint64_t FixtureResolver::resolve_calls(const std::string& doi) const {
  std::lock_guard lock(mu_);
  auto it = resolve_counts_.find(fold_ascii(trim(doi)));
  return it == resolve_counts_.end() ? 0 : it->second;
}

std::uint64_t FixtureResolver::crossref_calls_total() const {
  std::lock_guard lock(mu_);
  return crossref_total_;
}

std::uint64_t FixtureResolver::crossref_calls(const std::string& prefix) const {
  std::lock_guard lock(mu_);
  auto it = crossref_counts_.find(fold_ascii(prefix));
  return it == crossref_counts_.end() ? 0 : it->second;
}

std::uint64_t FixtureResolver::datacite_calls_total() const {
  std::lock_guard lock(mu_);
  return datacite_total_;
}

std::uint64_t FixtureResolver::medra_calls_total() const {
  std::lock_guard lock(mu_);
  return medra_total_;
}

}  // namespace doiclean
