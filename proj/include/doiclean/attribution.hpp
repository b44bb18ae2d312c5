#ifndef DOICLEAN_ATTRIBUTION_HPP
#define DOICLEAN_ATTRIBUTION_HPP

#include <string>

#include "doiclean/pipeline.hpp"
#include "doiclean/resolver.hpp"

namespace doiclean {

struct PublisherAttribution {
  PublisherRecord citing_publisher;  // responsible side
  PublisherRecord cited_publisher;   // affected side
  bool fallback_used = false;        // cited publisher came from DataCite/mEDRA/CNKI
};

struct AttributionResult {
  bool deferred = false;  // a lookup came back unknown; retry later
  std::string diagnostic;
  PublisherAttribution attribution;
};

// Citing side goes through Crossref only (the input corpus is
// Crossref-deposited by construction). Cited side also starts at Crossref;
// when Crossref misses AND the cited DOI is handle-valid, the agency
// fallback runs. A handle-invalid miss stays "unidentified" with no
// fallback. Fallback-sourced names are kept out of the main aggregates by
// the report layer.
AttributionResult attribute(const PipelineResult& result, Resolver& resolver);

}  // namespace doiclean

#endif
