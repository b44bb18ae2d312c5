#include "doiclean/cache.hpp"

#include <iostream>

#include <json.hpp>

namespace doiclean {

using nlohmann::json;

namespace {

std::int64_t to_epoch_seconds(std::chrono::system_clock::time_point tp) {
  return std::chrono::duration_cast<std::chrono::seconds>(tp.time_since_epoch()).count();
}

std::chrono::system_clock::time_point from_epoch_seconds(std::int64_t s) {
  return std::chrono::system_clock::time_point(std::chrono::seconds(s));
}

json to_json(const CacheRecord& rec) {
  json j;
  j["key"] = rec.key;
  j["kind"] = rec.kind == CacheRecord::Kind::doi ? "doi" : "prefix";
  if (rec.kind == CacheRecord::Kind::doi) {
    j["status"] = to_string(rec.status);
    if (!rec.agency.empty()) j["agency"] = rec.agency;
    if (!rec.url.empty()) j["url"] = rec.url;
  } else {
    j["name"] = rec.name;
    j["source"] = to_string(rec.source);
  }
  j["ts"] = to_epoch_seconds(rec.ts);
  return j;
}

std::optional<CacheRecord> from_json(const json& j) {
  CacheRecord rec;
  rec.key = j.value("key", "");
  if (rec.key.empty()) return std::nullopt;
  std::string kind = j.value("kind", "");
  if (kind == "doi") {
    rec.kind = CacheRecord::Kind::doi;
    auto status = validity_from_string(j.value("status", ""));
    if (!status) return std::nullopt;
    rec.status = *status;
    rec.agency = j.value("agency", "");
    rec.url = j.value("url", "");
  } else if (kind == "prefix") {
    rec.kind = CacheRecord::Kind::prefix;
    rec.name = j.value("name", "");
    auto source = publisher_source_from_string(j.value("source", ""));
    if (!source) return std::nullopt;
    rec.source = *source;
  } else {
    return std::nullopt;
  }
  rec.ts = from_epoch_seconds(j.value("ts", std::int64_t{0}));
  return rec;
}

}  // namespace

CacheStore::CacheStore(std::filesystem::path file) : file_(std::move(file)) {
  load();
  if (healthy_) {
    out_.open(file_, std::ios::app);
    if (!out_) {
      std::cerr << "warning: cache file " << file_
                << " is not writable; continuing without persistence\n";
      healthy_ = false;
    }
  }
}

std::string CacheStore::map_key(CacheRecord::Kind kind, const std::string& folded_key) {
  return (kind == CacheRecord::Kind::doi ? "d:" : "p:") + folded_key;
}

void CacheStore::load() {
  std::ifstream in(file_);
  if (!in) {
    // A missing file is a fresh cache; anything else unreadable is not.
    if (std::filesystem::exists(file_)) {
      std::cerr << "warning: cannot read cache file " << file_
                << "; continuing without persistence\n";
      healthy_ = false;
    }
    return;
  }
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // skip torn/corrupt lines
    if (auto rec = from_json(j)) {
      entries_[map_key(rec->kind, rec->key)] = *rec;
    }
  }
}

std::optional<CacheRecord> CacheStore::get(CacheRecord::Kind kind,
                                           const std::string& folded_key) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(map_key(kind, folded_key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CacheStore::put(const CacheRecord& rec) {
  std::lock_guard lock(mu_);
  entries_[map_key(rec.kind, rec.key)] = rec;
  if (!healthy_) return;
  out_ << to_json(rec).dump() << '\n';
  out_.flush();
  if (!out_) {
    std::cerr << "warning: write to cache file " << file_
              << " failed; continuing without persistence\n";
    healthy_ = false;
  }
}

size_t CacheStore::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

CachingResolver::CachingResolver(Resolver& inner, CacheStore* store, Ttl ttl, ClockFn clock,
                                 Mode mode)
    : inner_(inner),
      store_(store),
      ttl_(ttl),
      clock_(clock ? std::move(clock) : [] { return std::chrono::system_clock::now(); }),
      mode_(mode) {}

bool CachingResolver::fresh(const CacheRecord& rec, Validity status) const {
  std::chrono::seconds ttl =
      status == Validity::valid ? ttl_.valid : ttl_.invalid;
  if (ttl.count() == 0) return true;
  return clock_() - rec.ts < ttl;
}

ResolutionOutcome CachingResolver::do_resolve(const Doi& doi) {
  const std::string key = doi.folded();

  std::shared_future<ResolutionOutcome> flight;
  std::promise<ResolutionOutcome> promise;
  bool leader = false;
  {
    std::lock_guard lock(mu_);
    if (auto it = doi_memo_.find(key); it != doi_memo_.end()) {
      return it->second;
    }
    if (store_ != nullptr) {
      if (auto rec = store_->get(CacheRecord::Kind::doi, key);
          rec && rec->status != Validity::unknown && fresh(*rec, rec->status)) {
        ResolutionOutcome out;
        out.status = rec->status;
        out.agency = rec->agency;
        out.url = rec->url;
        out.checked_at = rec->ts;
        doi_memo_[key] = out;
        return out;
      }
    }
    auto it = doi_flights_.find(key);
    if (it != doi_flights_.end()) {
      flight = it->second;
    } else {
      flight = promise.get_future().share();
      doi_flights_[key] = flight;
      leader = true;
    }
  }

  if (!leader) return flight.get();

  ResolutionOutcome out = inner_.resolve(doi);
  {
    std::lock_guard lock(mu_);
    if (out.status != Validity::unknown || mode_ == Mode::per_run) {
      doi_memo_[key] = out;
    }
    if (out.status != Validity::unknown) {
      if (store_ != nullptr) {
        CacheRecord rec;
        rec.key = key;
        rec.kind = CacheRecord::Kind::doi;
        rec.status = out.status;
        rec.agency = out.agency;
        rec.url = out.url;
        rec.ts = clock_();
        store_->put(rec);
      }
    }
    doi_flights_.erase(key);
  }
  promise.set_value(out);
  return out;
}

PublisherLookup CachingResolver::cached_publisher(
    const DoiPrefix& prefix, const std::string& ns, PublisherSource cache_source,
    const std::function<PublisherLookup()>& fetch) {
  const std::string key = ns + prefix.folded();

  std::shared_future<PublisherLookup> flight;
  std::promise<PublisherLookup> promise;
  bool leader = false;
  {
    std::lock_guard lock(mu_);
    if (auto it = prefix_memo_.find(key); it != prefix_memo_.end()) {
      return it->second;
    }
    // Only the Crossref namespace is persisted; agency fallbacks are rare
    // enough that the per-run memo carries them.
    if (store_ != nullptr && ns == "cr:") {
      if (auto rec = store_->get(CacheRecord::Kind::prefix, prefix.folded());
          rec && fresh(*rec, Validity::valid)) {
        PublisherLookup out;
        out.state = rec->source == PublisherSource::unidentified ? LookupState::miss
                                                                 : LookupState::hit;
        out.record = {prefix.value(), rec->name, rec->source};
        prefix_memo_[key] = out;
        return out;
      }
    }
    auto it = prefix_flights_.find(key);
    if (it != prefix_flights_.end()) {
      flight = it->second;
    } else {
      flight = promise.get_future().share();
      prefix_flights_[key] = flight;
      leader = true;
    }
  }

  if (!leader) return flight.get();

  PublisherLookup out = fetch();
  {
    std::lock_guard lock(mu_);
    if (out.state != LookupState::deferred || mode_ == Mode::per_run) {
      prefix_memo_[key] = out;
    }
    if (out.state != LookupState::deferred) {
      if (store_ != nullptr && ns == "cr:") {
        CacheRecord rec;
        rec.key = prefix.folded();
        rec.kind = CacheRecord::Kind::prefix;
        rec.name = out.record.name;
        rec.source = out.state == LookupState::hit ? out.record.source : cache_source;
        rec.ts = clock_();
        store_->put(rec);
      }
    }
    prefix_flights_.erase(key);
  }
  promise.set_value(out);
  return out;
}

PublisherLookup CachingResolver::do_crossref_publisher(const DoiPrefix& prefix) {
  return cached_publisher(prefix, "cr:", PublisherSource::unidentified,
                          [&] { return inner_.crossref_publisher(prefix); });
}

PublisherLookup CachingResolver::do_datacite_publisher(const DoiPrefix& prefix) {
  return cached_publisher(prefix, "dc:", PublisherSource::unidentified,
                          [&] { return inner_.datacite_publisher(prefix); });
}

PublisherLookup CachingResolver::do_medra_publisher(const DoiPrefix& prefix) {
  return cached_publisher(prefix, "me:", PublisherSource::unidentified,
                          [&] { return inner_.medra_publisher(prefix); });
}

std::unique_ptr<Resolver> cached(Resolver& inner, CacheStore& store) {
  return std::make_unique<CachingResolver>(inner, &store);
}

}  // namespace doiclean
