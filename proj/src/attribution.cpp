#include "doiclean/attribution.hpp"

namespace doiclean {

AttributionResult attribute(const PipelineResult& result, Resolver& resolver) {
  PublisherLookup citing = resolver.crossref_publisher(result.citing_prefix);
  if (citing.state == LookupState::deferred) {
    return {true, citing.diagnostic, {citing.record, {}, false}};
  }

  if (!result.cited_prefix) {
    return {false, {}, {citing.record, {"", "unidentified", PublisherSource::unidentified},
                        false}};
  }

  PublisherLookup cited = resolver.crossref_publisher(*result.cited_prefix);
  if (cited.state == LookupState::deferred) {
    return {true, cited.diagnostic, {citing.record, cited.record, false}};
  }
  if (cited.state == LookupState::hit) {
    return {false, {}, {citing.record, cited.record, false}};
  }

  // Crossref miss. The fallback agencies are only consulted when the cited
  // DOI actually resolves, i.e. the miss looks like a non-Crossref
  // registration rather than a broken identifier.
  bool handle_valid = result.status == CitationStatus::already_valid ||
                      result.status == CitationStatus::valid_after_cleaning;
  if (!handle_valid) {
    return {false, {}, {citing.record, cited.record, false}};
  }

  Doi sample = result.cleaned ? *result.cleaned : parse_doi(result.record.cited_raw);
  PublisherLookup fallback = lookup_agency_fallback(resolver, *result.cited_prefix, sample);
  if (fallback.state == LookupState::deferred) {
    return {true, fallback.diagnostic, {citing.record, cited.record, false}};
  }
  if (fallback.state == LookupState::hit) {
    return {false, {}, {citing.record, fallback.record, true}};
  }
  return {false, {}, {citing.record, cited.record, false}};
}

}  // namespace doiclean
