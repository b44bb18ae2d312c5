#include "doiclean/doi.hpp"

#include <algorithm>
#include <cctype>

namespace doiclean {

std::string fold_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return std::string(s.substr(begin, end - begin));
}

Doi Doi::parse(const std::string& raw) {
  std::string normalized = trim(raw);
  if (normalized.empty()) {
    throw ParseError("empty DOI string");
  }
  return Doi(raw, std::move(normalized));
}

std::optional<Doi> Doi::try_parse(const std::string& raw) {
  std::string normalized = trim(raw);
  if (normalized.empty()) return std::nullopt;
  return Doi(raw, std::move(normalized));
}

DoiPrefix DoiPrefix::of(std::string value) {
  if (value.rfind("10.", 0) != 0 || value.find('/') != std::string::npos) {
    throw NoPrefixError("not a DOI prefix: \"" + value + "\"");
  }
  return DoiPrefix(std::move(value));
}

const char* to_string(Validity v) {
  switch (v) {
    case Validity::valid: return "valid";
    case Validity::invalid: return "invalid";
    case Validity::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Validity> validity_from_string(std::string_view s) {
  if (s == "valid") return Validity::valid;
  if (s == "invalid") return Validity::invalid;
  if (s == "unknown") return Validity::unknown;
  return std::nullopt;
}

Doi parse_doi(const std::string& raw) { return Doi::parse(raw); }

DoiPrefix extract_prefix(const Doi& doi) {
  auto p = try_extract_prefix(doi);
  if (!p) {
    throw NoPrefixError("no extractable prefix in \"" + doi.normalized() + "\"");
  }
  return *p;
}

std::optional<DoiPrefix> try_extract_prefix(const Doi& doi) {
  const std::string& s = doi.normalized();
  if (s.rfind("10.", 0) != 0) return std::nullopt;
  size_t slash = s.find('/');
  if (slash == std::string::npos) return std::nullopt;
  return DoiPrefix::of(s.substr(0, slash));
}

bool doi_equals(const Doi& a, const Doi& b) { return a == b; }

}  // namespace doiclean
