#include "doiclean/rules.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace doiclean {

namespace {

using nlohmann::json;

ErrorClass class_from_string(const std::string& s) {
  if (s == "prefix") return ErrorClass::prefix;
  if (s == "suffix") return ErrorClass::suffix;
  if (s == "other") return ErrorClass::other;
  throw SchemaError("unknown rule class \"" + s + "\"");
}

RuleAction action_from_string(const std::string& s) {
  if (s == "keep_captured") return RuleAction::keep_captured;
  if (s == "substitute") return RuleAction::substitute;
  throw SchemaError("unknown rule action \"" + s + "\"");
}

RuleOrigin origin_from_string(const std::string& s) {
  if (s == "new") return RuleOrigin::new_rule;
  if (s == "modified") return RuleOrigin::modified;
  if (s == "xu") return RuleOrigin::xu;
  throw SchemaError("unknown rule origin \"" + s + "\"");
}

std::string require_string(const json& obj, const char* key, int rule_id) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw SchemaError("rule " + std::to_string(rule_id) + ": missing string field \"" +
                      key + "\"");
  }
  return obj[key].get<std::string>();
}

Rule parse_rule(const json& obj) {
  if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_number_integer()) {
    throw SchemaError("rule entry without integer id");
  }
  Rule rule;
  rule.id = obj["id"].get<int>();
  if (rule.id < 1) {
    throw SchemaError("rule id must be positive, got " + std::to_string(rule.id));
  }
  rule.cls = class_from_string(require_string(obj, "class", rule.id));
  rule.action = action_from_string(require_string(obj, "action", rule.id));
  rule.origin = origin_from_string(require_string(obj, "origin", rule.id));
  rule.pattern_text = require_string(obj, "pattern", rule.id);

  if (rule.action == RuleAction::substitute) {
    rule.replacement = require_string(obj, "replacement", rule.id);
  } else if (obj.contains("replacement")) {
    throw SchemaError("rule " + std::to_string(rule.id) +
                      ": keep_captured rules take no replacement");
  }

  try {
    rule.pattern =
        std::regex(rule.pattern_text, std::regex::ECMAScript | std::regex::icase |
                                          std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw SchemaError("rule " + std::to_string(rule.id) + ": bad pattern: " + e.what());
  }
  if (rule.action == RuleAction::keep_captured && rule.pattern.mark_count() == 0) {
    throw SchemaError("rule " + std::to_string(rule.id) +
                      ": keep_captured pattern has no capture group");
  }

  if (!obj.contains("examples") || !obj["examples"].is_array() ||
      obj["examples"].empty()) {
    throw SchemaError("rule " + std::to_string(rule.id) + ": needs at least one example");
  }
  for (const auto& ex : obj["examples"]) {
    RuleExample pair;
    pair.invalid = require_string(ex, "invalid", rule.id);
    pair.expected = require_string(ex, "expected", rule.id);
    if (pair.invalid.empty()) {
      throw SchemaError("rule " + std::to_string(rule.id) + ": empty invalid example");
    }
    rule.examples.push_back(std::move(pair));
  }
  return rule;
}

void self_test(const Rule& rule) {
  for (const auto& ex : rule.examples) {
    ApplyResult r = apply_rule(rule, ex.invalid);
    if (!r.matched || r.out != ex.expected) {
      throw SelfTestFailure(rule.id, ex, r.matched ? r.out : "<no match>");
    }
  }
}

}  // namespace

SelfTestFailure::SelfTestFailure(int rule_id_in, RuleExample example_in,
                                 const std::string& got_in)
    : std::runtime_error("rule " + std::to_string(rule_id_in) + " failed its self-test: \"" +
                         example_in.invalid + "\" -> \"" + got_in + "\", expected \"" +
                         example_in.expected + "\""),
      rule_id(rule_id_in),
      example(std::move(example_in)),
      got(got_in) {}

const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::prefix: return "prefix";
    case ErrorClass::suffix: return "suffix";
    case ErrorClass::other: return "other";
  }
  return "other";
}

const char* to_string(RuleAction a) {
  return a == RuleAction::keep_captured ? "keep_captured" : "substitute";
}

const char* to_string(RuleOrigin o) {
  switch (o) {
    case RuleOrigin::new_rule: return "new";
    case RuleOrigin::modified: return "modified";
    case RuleOrigin::xu: return "xu";
  }
  return "new";
}

RuleSet::RuleSet(std::string name, std::vector<Rule> rules, std::uint64_t source_hash)
    : name_(std::move(name)), rules_(std::move(rules)), source_hash_(source_hash) {
  std::sort(rules_.begin(), rules_.end(),
            [](const Rule& a, const Rule& b) { return a.id < b.id; });
}

const Rule* RuleSet::find(int id) const {
  for (const auto& r : rules_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::vector<const Rule*> RuleSet::rules_of(ErrorClass cls) const {
  std::vector<const Rule*> out;
  for (const auto& r : rules_) {
    if (r.cls == cls) out.push_back(&r);
  }
  return out;
}

RuleSet load_ruleset_from_string(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("rule file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string()) {
    throw SchemaError("rule file needs a string \"name\"");
  }
  if (!doc.contains("rules") || !doc["rules"].is_array() || doc["rules"].empty()) {
    throw SchemaError("rule file needs a non-empty \"rules\" array");
  }

  std::vector<Rule> rules;
  std::set<int> seen;
  for (const auto& entry : doc["rules"]) {
    Rule rule = parse_rule(entry);
    if (!seen.insert(rule.id).second) {
      throw SchemaError("duplicate rule id " + std::to_string(rule.id));
    }
    rules.push_back(std::move(rule));
  }
  for (const auto& rule : rules) {
    self_test(rule);
  }
  return RuleSet(doc["name"].get<std::string>(), std::move(rules), fnv1a64(json_text));
}

RuleSet load_ruleset(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw SchemaError("cannot open rule file " + file.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_ruleset_from_string(buf.str());
}

ApplyResult apply_rule(const Rule& rule, const std::string& s) {
  if (rule.action == RuleAction::substitute) {
    if (!std::regex_search(s, rule.pattern)) {
      return {false, s, {}};
    }
    return {true, std::regex_replace(s, rule.pattern, rule.replacement), {}};
  }

  std::smatch m;
  if (!std::regex_search(s, m, rule.pattern)) {
    return {false, s, {}};
  }
  ApplyResult result;
  result.matched = true;
  // Retain the longest captured candidate; ties go to the earliest position.
  long best_pos = 0;
  for (size_t i = 1; i < m.size(); ++i) {
    if (!m[i].matched) continue;
    std::string cand = m[i].str();
    long pos = m.position(i);
    bool better = result.candidates.empty()
                      ? true
                      : (cand.size() > result.out.size() ||
                         (cand.size() == result.out.size() && pos < best_pos));
    result.candidates.push_back(cand);
    if (better) {
      result.out = std::move(cand);
      best_pos = pos;
    }
  }
  if (result.candidates.empty()) {
    result.out = s;  // pattern without participating groups retains the input
  }
  return result;
}

CleaningTrace clean_string(const RuleSet& ruleset, const std::string& s) {
  CleaningTrace trace;
  trace.input = s;
  std::string current = s;
  for (ErrorClass cls : RuleSet::group_order) {
    for (const Rule* rule : ruleset.rules_of(cls)) {
      ApplyResult r = apply_rule(*rule, current);
      if (r.matched && r.out != current) {
        current = std::move(r.out);
        trace.fired.push_back(rule->id);
      }
    }
  }
  trace.output = std::move(current);
  trace.changed = trace.output != trace.input;
  return trace;
}

std::vector<CorpusEntry> example_corpus(const RuleSet& ruleset) {
  std::vector<CorpusEntry> out;
  for (const auto& rule : ruleset.rules()) {
    for (const auto& ex : rule.examples) {
      out.push_back({ex.invalid, ex.expected, rule.id});
    }
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace doiclean
