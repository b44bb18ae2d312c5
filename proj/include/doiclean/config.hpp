#ifndef DOICLEAN_CONFIG_HPP
#define DOICLEAN_CONFIG_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "doiclean/cache.hpp"
#include "doiclean/http_resolver.hpp"
#include "doiclean/report.hpp"
#include "doiclean/resolver.hpp"
#include "doiclean/rules.hpp"

namespace doiclean {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string ruleset = "extended";           // name or path
  std::string baseline_ruleset = "baseline";  // name or path
  bool compare = false;
  std::string fixture;     // path to a fixture file; empty selects live mode
  std::string fixture_unlisted = "invalid";  // or "unknown"
  std::string cache_path;  // empty = no persistent cache
  unsigned rate_per_second = 10;
  unsigned workers = 0;  // 0 = one per processor
  std::uint64_t seed = 42;
  unsigned top_n = 10;
  unsigned per_rule_sample = 10;
  std::string out_dir = "reports";
  std::string mailto;
  std::string matrix_mode = "pre_cleaning";  // or "post_cleaning"
  HttpEndpoints endpoints;
};

// Defaults overlaid with the config file named by DOI_TOOL_CONFIG, when
// set. Command-line flags are applied on top by the CLI, so the effective
// precedence is flags > environment-designated file > defaults.
RunConfig load_base_config();
void overlay_config_file(RunConfig& config, const std::filesystem::path& file);

unsigned effective_workers(const RunConfig& config);
MatrixMode matrix_mode_from(const RunConfig& config);

// Bundled data files (rulesets, fixtures). DOI_TOOL_DATA_DIR overrides
// the build-time default.
std::filesystem::path data_dir();
std::filesystem::path ruleset_path(const std::string& name_or_path);
RuleSet load_bundled_ruleset(const std::string& name);

// The bundled acceptance corpus: one (invalid, expected, rule id) entry
// per rule of the extended set.
std::vector<CorpusEntry> table2_corpus();

/// Owns whichever resolver stack the config selects. Fixture mode builds
/// only the offline table resolver; no HTTP client exists in that mode.
class ResolverHandle {
public:
  explicit ResolverHandle(const RunConfig& config);

  Resolver& get() { return *top_; }
  FixtureResolver* fixture() { return fixture_.get(); }
  bool hermetic() const { return fixture_ != nullptr; }
  std::string mode() const { return mode_; }

private:
  std::unique_ptr<FixtureResolver> fixture_;
  std::unique_ptr<HttpResolver> http_;
  std::unique_ptr<CacheStore> store_;
  std::unique_ptr<CachingResolver> caching_;
  Resolver* top_ = nullptr;
  std::string mode_;
};

}  // namespace doiclean

#endif
