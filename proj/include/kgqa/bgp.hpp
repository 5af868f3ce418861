#pragma once

#include <map>
#include <string>
#include <vector>

#include "kgqa/sparql.hpp"

namespace kgqa {

// Node labels of the abstracted basic graph pattern. The projected
// variable is distinguished from helper variables; concrete IRIs and
// literals in subject/object position collapse to ENTITY.
enum class NodeLabel { AnswerVar, OtherVar, Entity };

struct BgpEdge {
    int from = 0;
    int to = 0;  // every edge carries the single label PRED
    bool operator==(const BgpEdge&) const = default;
    auto operator<=>(const BgpEdge&) const = default;
};

// A directed labeled multigraph abstracted from one basic graph pattern.
struct BgpGraph {
    std::vector<NodeLabel> nodes;
    std::vector<BgpEdge> edges;
};

// Node count cap bounding the factorial canonicalization search.
inline constexpr int kDefaultNodeCap = 10;

// A canonicalized template: the class identity of a BGP. Placeholder
// numbering is derived from the canonical node order, so re-canonicalizing
// an instantiated template reproduces the same key.
struct QueryTemplate {
    std::string canonical_key;  // versioned ASCII serialization, equal iff isomorphic
    BgpGraph graph;             // nodes in canonical order
    int class_id = -1;

    int entity_placeholders() const;    // number of <ent_i> slots
    int predicate_placeholders() const; // number of <pred_i> slots (== edge count)
    int other_var_count() const;
    bool has_answer_var() const;

    // Triple patterns with placeholder terms: entities as <ent_i>, predicates
    // as <pred_i>, the answer variable as ?uri, helpers as ?x0, ?x1, ...
    std::vector<TriplePattern> placeholder_patterns() const;
};

// Abstract a parsed query into its labeled graph. Modifiers and the query
// form are deliberately not encoded; the first projected variable becomes
// the ANSWER_VAR node, every other variable an OTHER_VAR node, and every
// concrete subject/object an ENTITY node. Duplicate patterns collapse.
BgpGraph to_bgp_graph(const ParsedQuery& q);

// Exact canonical form by exhaustive search over label-preserving node
// orderings. Throws SizeLimitError when the graph exceeds `node_cap`.
QueryTemplate canonicalize(const BgpGraph& g, int node_cap = kDefaultNodeCap);

// Brute-force label- and direction-preserving bijection search. This is
// the independent oracle for canonical-key equality.
bool is_isomorphic(const BgpGraph& g1, const BgpGraph& g2, int node_cap = kDefaultNodeCap);

// Fill a template's placeholders and render an executable query.
// `binding` maps "ent_0", "pred_1", ... to IRIs. Throws MissingBindingError
// if a placeholder is not covered.
std::string instantiate(const QueryTemplate& t, const std::map<std::string, std::string>& binding,
                        QueryForm form, const std::vector<Modifier>& mods = {});

}  // namespace kgqa
