#ifndef DOICLEAN_RULES_HPP
#define DOICLEAN_RULES_HPP

#include <cstdint>
#include <filesystem>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace doiclean {

// Where the extra characters sit relative to the DOI the rule recovers.
enum class ErrorClass { prefix, suffix, other };

// keep_captured rules retain the captured portion(s) of the match (the
// longest one when several captured); substitute rules rewrite every
// occurrence of the pattern with a fixed replacement.
enum class RuleAction { keep_captured, substitute };

// Provenance of a rule relative to the prior cleaning method: newly
// devised, a modified form of an existing rule, or taken over unchanged.
enum class RuleOrigin { new_rule, modified, xu };

const char* to_string(ErrorClass c);
const char* to_string(RuleAction a);
const char* to_string(RuleOrigin o);

struct RuleExample {
  std::string invalid;
  std::string expected;
};

struct Rule {
  int id = 0;
  ErrorClass cls = ErrorClass::other;
  RuleAction action = RuleAction::keep_captured;
  RuleOrigin origin = RuleOrigin::new_rule;
  std::string pattern_text;
  std::string replacement;  // substitute rules only
  std::vector<RuleExample> examples;
  std::regex pattern;  // compiled from pattern_text, case-insensitive
};

class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A rule whose pattern does not reproduce its own embedded examples is
// rejected at load time, never at processing time.
class SelfTestFailure : public std::runtime_error {
public:
  SelfTestFailure(int rule_id, RuleExample example, const std::string& got);
  int rule_id;
  RuleExample example;
  std::string got;
};

/// An ordered, named collection of rules. Cleaning always walks the
/// classes in the fixed order prefix, suffix, other; within a class,
/// rules apply sequentially in ascending id order.
class RuleSet {
public:
  RuleSet(std::string name, std::vector<Rule> rules, std::uint64_t source_hash);

  const std::string& name() const { return name_; }
  const std::vector<Rule>& rules() const { return rules_; }
  std::uint64_t source_hash() const { return source_hash_; }

  const Rule* find(int id) const;
  std::vector<const Rule*> rules_of(ErrorClass cls) const;
  static constexpr ErrorClass group_order[3] = {ErrorClass::prefix,
                                                ErrorClass::suffix,
                                                ErrorClass::other};

private:
  std::string name_;
  std::vector<Rule> rules_;  // sorted by id
  std::uint64_t source_hash_;
};

struct ApplyResult {
  bool matched = false;
  std::string out;
  // For keep_captured matches: every captured candidate, in group order.
  std::vector<std::string> candidates;
};

struct CleaningTrace {
  std::string input;
  std::string output;
  std::vector<int> fired;  // ids of rules that matched and changed the string
  bool changed = false;
};

RuleSet load_ruleset(const std::filesystem::path& file);
RuleSet load_ruleset_from_string(const std::string& json_text);

ApplyResult apply_rule(const Rule& rule, const std::string& s);
CleaningTrace clean_string(const RuleSet& ruleset, const std::string& s);

struct CorpusEntry {
  std::string invalid;
  std::string expected;
  int rule_id = 0;
};

// The per-rule example pairs of a loaded ruleset, flattened in id order.
// For the bundled "extended" set this is the 23-row acceptance corpus.
std::vector<CorpusEntry> example_corpus(const RuleSet& ruleset);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace doiclean

#endif
