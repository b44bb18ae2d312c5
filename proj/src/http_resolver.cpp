#include "doiclean/http_resolver.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "doiclean/version.hpp"

namespace doiclean {

using nlohmann::json;

std::string percent_encode_path(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    bool keep = std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' ||
                c == '/';
    if (keep) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

HttpResolver::HttpResolver(HttpEndpoints endpoints, HttpOptions options)
    : endpoints_(std::move(endpoints)),
      options_(std::move(options)),
      limiter_(options_.rate_per_second) {}

HttpResolver::~HttpResolver() = default;

std::optional<HttpResolver::Response> HttpResolver::get(const std::string& base,
                                                        const std::string& path,
                                                        std::string* error) {
  std::string ua = std::string(kToolName) + "/" + std::string(kVersion);
  if (!options_.mailto.empty()) {
    ua += " (mailto:" + options_.mailto + ")";
  }
  httplib::Headers headers{{"User-Agent", ua}, {"Accept", "application/json"}};

  auto backoff = options_.backoff_base;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    limiter_.acquire();
    httplib::Client cli(base);
    cli.set_connection_timeout(options_.timeout);
    cli.set_read_timeout(options_.timeout);
    cli.set_follow_location(true);
    auto res = cli.Get(path, headers);
    if (res && res->status < 500) {
      return Response{res->status, res->body};
    }
    if (error != nullptr) {
      *error = res ? "HTTP " + std::to_string(res->status)
                   : "transport: " + httplib::to_string(res.error());
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  return std::nullopt;
}

ResolutionOutcome HttpResolver::do_resolve(const Doi& doi) {
  ResolutionOutcome out;
  out.checked_at = std::chrono::system_clock::now();
  std::string error;
  auto res = get(endpoints_.doi_api_base,
                 "/api/handles/" + percent_encode_path(doi.normalized()), &error);
  if (!res) {
    out.diagnostic = error;
    return out;
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.contains("responseCode") ||
      !body["responseCode"].is_number_integer()) {
    out.diagnostic = "non-conforming handle payload (HTTP " +
                     std::to_string(res->status) + ")";
    return out;
  }
  int code = body["responseCode"].get<int>();
  if (code == 1) {
    out.status = Validity::valid;
    if (body.contains("values") && body["values"].is_array()) {
      for (const auto& v : body["values"]) {
        if (v.value("type", "") == "URL" && v.contains("data")) {
          const auto& data = v["data"];
          if (data.is_object() && data.contains("value") && data["value"].is_string()) {
            out.url = data["value"].get<std::string>();
            break;
          }
        }
      }
    }
    if (auto prefix = try_extract_prefix(doi)) {
      out.agency = registration_agency(*prefix);
    }
  } else if (code == 100 || code == 200) {
    // 100: handle not found; 200: values not found
    out.status = Validity::invalid;
  } else {
    out.diagnostic = "unexpected handle responseCode " + std::to_string(code);
  }
  return out;
}

std::string HttpResolver::registration_agency(const DoiPrefix& prefix) {
  {
    std::lock_guard lock(ra_mu_);
    if (auto it = ra_cache_.find(prefix.folded()); it != ra_cache_.end()) {
      return it->second;
    }
  }
  std::string agency;
  auto res = get(endpoints_.doi_api_base, "/ra/" + percent_encode_path(prefix.value()),
                 nullptr);
  if (res && res->status == 200) {
    json body = json::parse(res->body, nullptr, false);
    if (body.is_array() && !body.empty() && body[0].is_object()) {
      agency = body[0].value("RA", "");
    }
  }
  std::lock_guard lock(ra_mu_);
  ra_cache_[prefix.folded()] = agency;
  return agency;
}

PublisherLookup HttpResolver::do_crossref_publisher(const DoiPrefix& prefix) {
  std::string error;
  auto res = get(endpoints_.crossref_api_base,
                 "/prefixes/" + percent_encode_path(prefix.value()), &error);
  if (!res) {
    return {LookupState::deferred, unidentified_record(prefix), error};
  }
  if (res->status == 404) {
    return {LookupState::miss, unidentified_record(prefix), {}};
  }
  json body = json::parse(res->body, nullptr, false);
  if (res->status == 200 && body.is_object() && body.contains("message") &&
      body["message"].is_object() && body["message"].contains("name") &&
      body["message"]["name"].is_string()) {
    return {LookupState::hit,
            {prefix.value(), body["message"]["name"].get<std::string>(),
             PublisherSource::crossref},
            {}};
  }
  return {LookupState::deferred, unidentified_record(prefix),
          "non-conforming Crossref payload (HTTP " + std::to_string(res->status) + ")"};
}

PublisherLookup HttpResolver::do_datacite_publisher(const DoiPrefix& prefix) {
  std::string error;
  auto res = get(endpoints_.datacite_api_base,
                 "/prefixes/" + percent_encode_path(prefix.value()), &error);
  if (!res) {
    return {LookupState::deferred, unidentified_record(prefix), error};
  }
  if (res->status == 404) {
    return {LookupState::miss, unidentified_record(prefix), {}};
  }
  json body = json::parse(res->body, nullptr, false);
  if (res->status == 200 && body.is_object() && body.contains("data")) {
    const auto& data = body["data"];
    if (data.is_object() && data.contains("attributes") &&
        data["attributes"].is_object() && data["attributes"].contains("name") &&
        data["attributes"]["name"].is_string()) {
      return {LookupState::hit,
              {prefix.value(), data["attributes"]["name"].get<std::string>(),
               PublisherSource::datacite},
              {}};
    }
  }
  return {LookupState::deferred, unidentified_record(prefix),
          "non-conforming DataCite payload (HTTP " + std::to_string(res->status) + ")"};
}

PublisherLookup HttpResolver::do_medra_publisher(const DoiPrefix& prefix) {
  std::string error;
  auto res = get(endpoints_.medra_api_base,
                 "/prefix/" + percent_encode_path(prefix.value()), &error);
  if (!res) {
    return {LookupState::deferred, unidentified_record(prefix), error};
  }
  if (res->status == 404) {
    return {LookupState::miss, unidentified_record(prefix), {}};
  }
  json body = json::parse(res->body, nullptr, false);
  if (res->status == 200 && body.is_object() && body.contains("name") &&
      body["name"].is_string()) {
    return {LookupState::hit,
            {prefix.value(), body["name"].get<std::string>(), PublisherSource::medra},
            {}};
  }
  return {LookupState::deferred, unidentified_record(prefix),
          "non-conforming mEDRA payload (HTTP " + std::to_string(res->status) + ")"};
}

}  // namespace doiclean
