#ifndef DOICLEAN_CACHE_HPP
#define DOICLEAN_CACHE_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "doiclean/resolver.hpp"

namespace doiclean {

struct CacheRecord {
  enum class Kind { doi, prefix };
  std::string key;  // case-folded DOI or prefix
  Kind kind = Kind::doi;
  // doi records
  Validity status = Validity::unknown;
  std::string agency;
  std::string url;
  // prefix records
  std::string name;
  PublisherSource source = PublisherSource::unidentified;
  std::chrono::system_clock::time_point ts{};
};

/// Append-friendly on-disk key-value store, one JSON record per line,
/// loaded fully at startup. Later lines for the same key win. A store that
/// fails to open or write flips to unhealthy and callers degrade to
/// pass-through resolution.
class CacheStore {
public:
  explicit CacheStore(std::filesystem::path file);

  std::optional<CacheRecord> get(CacheRecord::Kind kind, const std::string& folded_key);
  void put(const CacheRecord& rec);
  bool healthy() const { return healthy_; }
  size_t size() const;

private:
  static std::string map_key(CacheRecord::Kind kind, const std::string& folded_key);
  void load();

  std::filesystem::path file_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, CacheRecord> entries_;
  std::ofstream out_;
  bool healthy_ = true;
};

/// Wraps a resolver with (a) per-run in-memory memoization with
/// single-flight semantics, so a key in demand by many workers still
/// reaches the backend once, and (b) optionally a persistent CacheStore.
/// Valid and invalid outcomes are cached; unknown outcomes never are, so a
/// retry can heal them. Cached invalid verdicts expire (invalid DOIs can
/// become valid over time); valid ones do not, by default.
// zero duration = never expires
struct CacheTtl {
  std::chrono::seconds valid{0};
  std::chrono::seconds invalid{std::chrono::hours(24 * 30)};
};

class CachingResolver : public Resolver {
public:
  using Ttl = CacheTtl;
  using ClockFn = std::function<std::chrono::system_clock::time_point()>;

  // per_run memoizes every verdict, unknown included, for the lifetime of
  // the wrapper: a record is looked up at most once per corpus run and a
  // retry belongs to the next run. persistent keeps unknown/deferred
  // verdicts uncached so they can heal on the next lookup.
  enum class Mode { persistent, per_run };

  explicit CachingResolver(Resolver& inner, CacheStore* store = nullptr,
                           Ttl ttl = CacheTtl(), ClockFn clock = nullptr,
                           Mode mode = Mode::persistent);

protected:
  ResolutionOutcome do_resolve(const Doi& doi) override;
  PublisherLookup do_crossref_publisher(const DoiPrefix& prefix) override;
  PublisherLookup do_datacite_publisher(const DoiPrefix& prefix) override;
  PublisherLookup do_medra_publisher(const DoiPrefix& prefix) override;

private:
  bool fresh(const CacheRecord& rec, Validity status) const;
  PublisherLookup cached_publisher(const DoiPrefix& prefix, const std::string& ns,
                                   PublisherSource cache_source,
                                   const std::function<PublisherLookup()>& fetch);

  Resolver& inner_;
  CacheStore* store_;
  Ttl ttl_;
  ClockFn clock_;
  Mode mode_;

  std::mutex mu_;
  std::unordered_map<std::string, std::shared_future<ResolutionOutcome>> doi_flights_;
  std::unordered_map<std::string, std::shared_future<PublisherLookup>> prefix_flights_;
  std::unordered_map<std::string, ResolutionOutcome> doi_memo_;
  std::unordered_map<std::string, PublisherLookup> prefix_memo_;
};

// Spec-facing convenience: a resolver that consults `store` before
// delegating to `inner`.
std::unique_ptr<Resolver> cached(Resolver& inner, CacheStore& store);

}  // namespace doiclean

#endif
