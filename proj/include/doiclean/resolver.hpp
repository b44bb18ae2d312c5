#ifndef DOICLEAN_RESOLVER_HPP
#define DOICLEAN_RESOLVER_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "doiclean/doi.hpp"

namespace doiclean {

struct ResolutionOutcome {
  Validity status = Validity::unknown;
  std::string agency;      // registration agency; only set when valid
  std::string url;         // handle resolution target when known
  std::string diagnostic;  // reason for an unknown verdict
  std::chrono::system_clock::time_point checked_at{};
};

enum class PublisherSource { crossref, datacite, medra, cnki, unidentified, test_account };

const char* to_string(PublisherSource s);
std::optional<PublisherSource> publisher_source_from_string(std::string_view s);

struct PublisherRecord {
  std::string prefix;  // empty when the cited string had no extractable prefix
  std::string name;
  PublisherSource source = PublisherSource::unidentified;
};

PublisherRecord unidentified_record(const DoiPrefix& prefix);
PublisherRecord test_account_record();

// Crossref's reserved test prefix; attribution never asks the network for it.
inline constexpr std::string_view kTestAccountPrefix = "10.5555";

enum class LookupState { hit, miss, deferred };

struct PublisherLookup {
  LookupState state = LookupState::miss;
  PublisherRecord record;
  std::string diagnostic;
};

/// Resolution backend: DOI validity through the handle system plus
/// publisher lookups at the registration agencies. Implementations must be
/// callable from many workers at once.
class Resolver {
public:
  virtual ~Resolver() = default;

  ResolutionOutcome resolve(const Doi& doi) { return do_resolve(doi); }

  // Publisher of a prefix per Crossref. The 10.5555 test prefix
  // short-circuits here and never reaches the backend.
  PublisherLookup crossref_publisher(const DoiPrefix& prefix);

  PublisherLookup datacite_publisher(const DoiPrefix& prefix) {
    return do_datacite_publisher(prefix);
  }
  PublisherLookup medra_publisher(const DoiPrefix& prefix) {
    return do_medra_publisher(prefix);
  }

protected:
  virtual ResolutionOutcome do_resolve(const Doi& doi) = 0;
  virtual PublisherLookup do_crossref_publisher(const DoiPrefix& prefix) = 0;
  virtual PublisherLookup do_datacite_publisher(const DoiPrefix& prefix) = 0;
  virtual PublisherLookup do_medra_publisher(const DoiPrefix& prefix) = 0;
};

// Agency fallback for prefixes Crossref does not know: DataCite, then
// mEDRA, then CNKI by inspecting the handle resolution URL of a sample
// DOI. Callers apply it only when the sample DOI is handle-valid but its
// publisher could not be identified in Crossref.
PublisherLookup lookup_agency_fallback(Resolver& resolver, const DoiPrefix& prefix,
                                       const Doi& sample);

bool is_cnki_url(std::string_view url);

/// Deterministic offline resolver driven by lookup tables, for tests and
/// hermetic runs. Counts backend calls per key so tests can assert lookup
/// economy and ordering.
class FixtureResolver : public Resolver {
public:
  enum class UnlistedPolicy { invalid, unknown };

  FixtureResolver() = default;
  void load_file(const std::filesystem::path& file);

  void add_doi(const std::string& doi, Validity status, std::string agency = "",
               std::string url = "");
  void add_prefix(const std::string& prefix, std::string name, PublisherSource source);
  void set_unlisted_policy(UnlistedPolicy p) { unlisted_ = p; }

  std::uint64_t resolve_calls_total() const;
  std::uint64_t resolve_calls(const std::string& doi) const;
  std::uint64_t crossref_calls_total() const;
  std::uint64_t crossref_calls(const std::string& prefix) const;
  std::uint64_t datacite_calls_total() const;
  std::uint64_t medra_calls_total() const;

protected:
  ResolutionOutcome do_resolve(const Doi& doi) override;
  PublisherLookup do_crossref_publisher(const DoiPrefix& prefix) override;
  PublisherLookup do_datacite_publisher(const DoiPrefix& prefix) override;
  PublisherLookup do_medra_publisher(const DoiPrefix& prefix) override;

private:
  struct DoiEntry {
    Validity status;
    std::string agency;
    std::string url;
  };

  PublisherLookup agency_lookup(const DoiPrefix& prefix, PublisherSource wanted,
                                std::uint64_t& counter);

  mutable std::mutex mu_;
  std::unordered_map<std::string, DoiEntry> dois_;
  std::unordered_map<std::string, PublisherRecord> prefixes_;
  UnlistedPolicy unlisted_ = UnlistedPolicy::invalid;
  std::unordered_map<std::string, std::uint64_t> resolve_counts_;
  std::unordered_map<std::string, std::uint64_t> crossref_counts_;
  std::uint64_t resolve_total_ = 0;
  std::uint64_t crossref_total_ = 0;
  std::uint64_t datacite_total_ = 0;
  std::uint64_t medra_total_ = 0;
};

}  // namespace doiclean

#endif
