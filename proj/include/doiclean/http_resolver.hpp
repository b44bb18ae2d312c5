#ifndef DOICLEAN_HTTP_RESOLVER_HPP
#define DOICLEAN_HTTP_RESOLVER_HPP

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "doiclean/rate_limiter.hpp"
#include "doiclean/resolver.hpp"

namespace doiclean {

struct HttpEndpoints {
  std::string doi_api_base = "https://doi.org";
  std::string crossref_api_base = "https://api.crossref.org";
  std::string datacite_api_base = "https://api.datacite.org";
  std::string medra_api_base = "https://api.medra.org";
};

struct HttpOptions {
  std::string mailto;  // contact address sent with every request
  unsigned rate_per_second = 10;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{250};
  std::chrono::seconds timeout{30};
};

std::string percent_encode_path(std::string_view s);

/// Live resolution clients: handle API for validity, Crossref prefix
/// endpoint for publisher names, DataCite/mEDRA for the agency fallback.
/// Transport failures and 5xx responses are retried with exponential
/// backoff; what still fails surfaces as unknown/deferred, never as a
/// fabricated verdict.
class HttpResolver : public Resolver {
public:
  explicit HttpResolver(HttpEndpoints endpoints = {}, HttpOptions options = {});
  ~HttpResolver() override;

protected:
  ResolutionOutcome do_resolve(const Doi& doi) override;
  PublisherLookup do_crossref_publisher(const DoiPrefix& prefix) override;
  PublisherLookup do_datacite_publisher(const DoiPrefix& prefix) override;
  PublisherLookup do_medra_publisher(const DoiPrefix& prefix) override;

private:
  struct Response {
    int status = 0;
    std::string body;
  };

  std::optional<Response> get(const std::string& base, const std::string& path,
                              std::string* error);
  std::string registration_agency(const DoiPrefix& prefix);

  HttpEndpoints endpoints_;
  HttpOptions options_;
  RateLimiter limiter_;
  std::mutex ra_mu_;
  std::unordered_map<std::string, std::string> ra_cache_;
};

}  // namespace doiclean

#endif
