#include "doiclean/config.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#ifndef DOICLEAN_DEFAULT_DATA_DIR
#define DOICLEAN_DEFAULT_DATA_DIR "data"
#endif

namespace doiclean {

using nlohmann::json;

RunConfig load_base_config() {
  RunConfig config;
  if (const char* env = std::getenv("DOI_TOOL_CONFIG"); env != nullptr && *env != '\0') {
    overlay_config_file(config, env);
  }
  return config;
}

void overlay_config_file(RunConfig& config, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open config file " + file.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config file " + file.string() + " is not a JSON object");
  }

  auto str = [&](const char* key, std::string& target) {
    if (doc.contains(key)) {
      if (!doc[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
      target = doc[key].get<std::string>();
    }
  };
  auto uns = [&](const char* key, unsigned& target) {
    if (doc.contains(key)) {
      if (!doc[key].is_number_unsigned()) {
        throw ConfigError(std::string(key) + " must be a non-negative integer");
      }
      target = doc[key].get<unsigned>();
    }
  };

  str("ruleset", config.ruleset);
  str("baseline_ruleset", config.baseline_ruleset);
  if (doc.contains("compare")) {
    if (!doc["compare"].is_boolean()) throw ConfigError("compare must be a boolean");
    config.compare = doc["compare"].get<bool>();
  }
  str("fixture", config.fixture);
  str("fixture_unlisted", config.fixture_unlisted);
  str("cache", config.cache_path);
  uns("rate", config.rate_per_second);
  uns("workers", config.workers);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  uns("top_n", config.top_n);
  uns("per_rule_sample", config.per_rule_sample);
  str("out", config.out_dir);
  str("mailto", config.mailto);
  str("matrix_mode", config.matrix_mode);
  str("doi_api_base", config.endpoints.doi_api_base);
  str("crossref_api_base", config.endpoints.crossref_api_base);
  str("datacite_api_base", config.endpoints.datacite_api_base);
  str("medra_api_base", config.endpoints.medra_api_base);
}

unsigned effective_workers(const RunConfig& config) {
  if (config.workers > 0) return config.workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

MatrixMode matrix_mode_from(const RunConfig& config) {
  if (config.matrix_mode == "pre_cleaning") return MatrixMode::pre_cleaning;
  if (config.matrix_mode == "post_cleaning") return MatrixMode::post_cleaning;
  throw ConfigError("matrix_mode must be pre_cleaning or post_cleaning, got \"" +
                    config.matrix_mode + "\"");
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("DOI_TOOL_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return DOICLEAN_DEFAULT_DATA_DIR;
}

std::filesystem::path ruleset_path(const std::string& name_or_path) {
  std::filesystem::path direct(name_or_path);
  if (direct.has_extension() || std::filesystem::exists(direct)) {
    return direct;
  }
  return data_dir() / "rulesets" / (name_or_path + ".json");
}

RuleSet load_bundled_ruleset(const std::string& name) {
  return load_ruleset(ruleset_path(name));
}

std::vector<CorpusEntry> table2_corpus() {
  return example_corpus(load_bundled_ruleset("extended"));
}

ResolverHandle::ResolverHandle(const RunConfig& config) {
  if (!config.fixture.empty()) {
    fixture_ = std::make_unique<FixtureResolver>();
    fixture_->load_file(config.fixture);
    if (config.fixture_unlisted == "unknown") {
      fixture_->set_unlisted_policy(FixtureResolver::UnlistedPolicy::unknown);
    } else if (config.fixture_unlisted != "invalid") {
      throw ConfigError("fixture_unlisted must be invalid or unknown");
    }
    top_ = fixture_.get();
    mode_ = "fixture:" + config.fixture;
  } else {
    HttpOptions options;
    options.mailto = config.mailto;
    options.rate_per_second = config.rate_per_second;
    http_ = std::make_unique<HttpResolver>(config.endpoints, options);
    top_ = http_.get();
    mode_ = "live";
  }

  if (!config.cache_path.empty()) {
    store_ = std::make_unique<CacheStore>(config.cache_path);
    caching_ = std::make_unique<CachingResolver>(*top_, store_.get());
    top_ = caching_.get();
  }
}

}  // namespace doiclean
