#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kgqa/errors.hpp"

namespace kgqa {

enum class TermKind { Iri, Literal, Variable };

// One RDF term as it appears in a triple pattern. Literals keep their
// lexical form plus an optional datatype IRI or language tag.
struct Term {
    TermKind kind = TermKind::Iri;
    std::string value;     // IRI text, literal lexical form, or variable name (no '?')
    std::string datatype;  // literal datatype IRI, may be empty
    std::string lang;      // literal language tag, may be empty

    static Term iri(std::string v) { return {TermKind::Iri, std::move(v), "", ""}; }
    static Term literal(std::string v, std::string dt = "", std::string lang = "") {
        return {TermKind::Literal, std::move(v), std::move(dt), std::move(lang)};
    }
    static Term variable(std::string name) { return {TermKind::Variable, std::move(name), "", ""}; }

    bool is_iri() const { return kind == TermKind::Iri; }
    bool is_literal() const { return kind == TermKind::Literal; }
    bool is_variable() const { return kind == TermKind::Variable; }

    bool operator==(const Term&) const = default;
    auto operator<=>(const Term&) const = default;
};

// Serialize a term the way the emitter writes queries: <iri>, ?var, or a
// quoted literal with optional ^^<datatype> / @lang.
std::string term_to_sparql(const Term& t);

struct TriplePattern {
    Term subject, predicate, object;
    bool operator==(const TriplePattern&) const = default;
    auto operator<=>(const TriplePattern&) const = default;
};

enum class CompareOp { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

std::string compare_op_text(CompareOp op);

enum class SortOrder { Asc, Desc };

struct FilterModifier {
    Term lhs;  // variable or literal
    CompareOp op = CompareOp::Less;
    Term rhs;
    bool operator==(const FilterModifier&) const = default;
};

struct OrderLimitModifier {
    std::string variable;
    SortOrder order = SortOrder::Asc;
    std::optional<long> limit;
    bool operator==(const OrderLimitModifier&) const = default;
};

struct CountModifier {
    bool operator==(const CountModifier&) const = default;
};

using Modifier = std::variant<CountModifier, FilterModifier, OrderLimitModifier>;

enum class QueryForm { Select, Ask };

// A query in the supported subset: one basic graph pattern plus modifiers.
// For COUNT queries the projection holds the counted variable, and a
// CountModifier records the aggregation.
struct ParsedQuery {
    QueryForm form = QueryForm::Select;
    std::vector<std::string> projection;  // variable names, empty for ASK
    std::vector<TriplePattern> patterns;
    std::vector<Modifier> modifiers;

    bool has_count() const;
    std::optional<FilterModifier> filter() const;
    std::optional<OrderLimitModifier> order_limit() const;
};

// Parse a SPARQL string in the supported subset (SELECT/ASK, one BGP,
// PREFIX declarations, COUNT, FILTER comparison, ORDER BY + LIMIT).
// Prefixed names are expanded to full IRIs. Throws ParseError with the
// byte offset of the offending token for anything outside the subset
// (UNION, OPTIONAL, subqueries, property paths, ...).
ParsedQuery parse_query(const std::string& text);

// Render a ParsedQuery back to SPARQL text; parse_query(render_query(q))
// yields an equivalent query.
std::string render_query(const ParsedQuery& q);

}  // namespace kgqa
