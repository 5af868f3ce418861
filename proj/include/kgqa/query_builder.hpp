#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgqa/annotation.hpp"
#include "kgqa/bgp.hpp"
#include "kgqa/kb_index.hpp"

namespace kgqa {

// Direction keyword tables: lowercased word -> '>' / '<' for comparatives,
// DESC / ASC for superlatives. Loaded from TSV data files.
struct KeywordTables {
    std::map<std::string, CompareOp> comparative_direction;
    std::map<std::string, SortOrder> superlative_direction;

    static KeywordTables from_files(const std::string& comparatives_tsv,
                                    const std::string& superlatives_tsv);
};

struct ModifierSet {
    bool count = false;
    std::optional<CompareOp> comparative;
    std::optional<SortOrder> superlative;
    bool ask = false;  // excludes count and superlative
};

ModifierSet detect_modifiers(const AnnotatedQuestion& q, const KeywordTables& tables);

// One placeholder assignment. Implicit rdf:type bindings carry no source
// n-gram and do not contribute to the rating.
struct BoundValue {
    std::string iri;
    bool has_source = false;
    LinkCandidate source;  // valid when has_source
};

using Binding = std::map<std::string, BoundValue>;  // placeholder -> value

struct FillOptions {
    std::size_t max_bindings = 64;
};

// Fill a template's placeholders from linked candidates, honoring the
// connectivity gate p in S(e), the span-overlap constraints, and the
// domain/range consistency check. Class candidates may fill an entity
// slot in object position, implying an rdf:type predicate. Templates with
// variable-free triples yield no bindings.
std::vector<Binding> fill_template(const QueryTemplate& t,
                                   const std::vector<LinkCandidate>& entity_candidates,
                                   const std::vector<LinkCandidate>& relation_candidates,
                                   const IndexBundle& bundle, const FillOptions& options = {});

enum class QueryVariant { Plain, Count, Filtered, OrderAsc, OrderDesc, Ask };

std::string variant_name(QueryVariant v);

struct CandidateQuery {
    int class_id = -1;
    std::string canonical_key;
    std::string sparql;
    QueryVariant variant = QueryVariant::Plain;
    Binding binding;
    double classifier_score = 0.0;
    // Detected superlative direction, recorded so ranking can prefer the
    // matching ORDER BY variant among otherwise tied candidates.
    std::optional<SortOrder> detected_superlative;
};

// One query per (binding, applicable variant): plain SELECT always, COUNT
// when asked for a number, FILTER when a comparative fits the template,
// both ORDER BY LIMIT 1 directions for superlatives, ASK for decision
// questions. Deterministic order: bindings, then variants.
std::vector<CandidateQuery> generate_queries(const QueryTemplate& t,
                                             const std::vector<Binding>& bindings,
                                             const ModifierSet& mods,
                                             double classifier_score = 0.0);

}  // namespace kgqa
