#ifndef DOICLEAN_DOI_HPP
#define DOICLEAN_DOI_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace doiclean {

// Raised when an input string cannot be turned into a usable identifier.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NoPrefixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string fold_ascii(std::string_view s);
std::string trim(std::string_view s);

/// A DOI as read from the source data. `raw` keeps the original bytes,
/// `normalized` is the same string with surrounding whitespace removed.
/// Equality is case-insensitive (handle-system semantics); storage is not.
class Doi {
public:
  static Doi parse(const std::string& raw);
  static std::optional<Doi> try_parse(const std::string& raw);

  const std::string& raw() const { return raw_; }
  const std::string& normalized() const { return normalized_; }

  // Case-folded normalized form, used as cache and map key.
  std::string folded() const { return fold_ascii(normalized_); }

  friend bool operator==(const Doi& a, const Doi& b) {
    return fold_ascii(a.normalized_) == fold_ascii(b.normalized_);
  }

private:
  Doi(std::string raw, std::string normalized)
      : raw_(std::move(raw)), normalized_(std::move(normalized)) {}

  std::string raw_;
  std::string normalized_;
};

/// The registrant segment of a DOI: starts with "10." and ends before the
/// first "/". Identifies the depositing publisher or agency member.
class DoiPrefix {
public:
  static DoiPrefix of(std::string value);

  const std::string& value() const { return value_; }
  std::string folded() const { return fold_ascii(value_); }

  friend bool operator==(const DoiPrefix& a, const DoiPrefix& b) {
    return a.folded() == b.folded();
  }
  friend bool operator<(const DoiPrefix& a, const DoiPrefix& b) {
    return a.folded() < b.folded();
  }

private:
  explicit DoiPrefix(std::string value) : value_(std::move(value)) {}
  std::string value_;
};

// Verdict a resolver can hand back for one DOI. `unknown` marks a lookup
// that could not be completed (transport failure, malformed response) and
// is never coerced to valid or invalid.
enum class Validity { valid, invalid, unknown };

const char* to_string(Validity v);
std::optional<Validity> validity_from_string(std::string_view s);

Doi parse_doi(const std::string& raw);
DoiPrefix extract_prefix(const Doi& doi);
std::optional<DoiPrefix> try_extract_prefix(const Doi& doi);
bool doi_equals(const Doi& a, const Doi& b);

}  // namespace doiclean

#endif
