#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kgqa/sparql.hpp"

namespace kgqa {

struct Triple {
    Term subject, predicate, object;
    bool operator==(const Triple&) const = default;
    auto operator<=>(const Triple&) const = default;
};

enum class AnswerKind { Resources, Literals, Boolean, Count };

// Typed result of executing a query. COUNT carries exactly one
// non-negative integer in `count`; BOOLEAN exactly one flag.
struct AnswerSet {
    AnswerKind kind = AnswerKind::Resources;
    std::vector<Term> values;  // IRIs or literals, deduplicated
    bool boolean = false;
    long count = 0;

    bool empty() const;
    std::size_t result_count() const;  // number of rows the query produced
    // Values as comparable strings: IRI text, literal lexical form,
    // "true"/"false", or the count in decimal.
    std::vector<std::string> value_strings() const;
};

struct LoadReport {
    std::size_t triples_loaded = 0;
    std::size_t malformed_lines = 0;
};

// In-memory triple set with by-subject / by-predicate / by-object access
// maps. Immutable once loaded; evaluation is a pure function of it.
class TripleStore {
  public:
    void add(Term subject, Term predicate, Term object);

    // Line-oriented N-Triples; malformed lines are skipped and counted.
    LoadReport load_ntriples(std::istream& in);
    LoadReport load_ntriples_file(const std::string& path);

    const std::vector<Triple>& triples() const { return triples_; }
    std::size_t size() const { return triples_.size(); }

    const std::vector<std::size_t>& by_subject(const Term& t) const;
    const std::vector<std::size_t>& by_predicate(const Term& t) const;
    const std::vector<std::size_t>& by_object(const Term& t) const;

  private:
    std::vector<Triple> triples_;
    std::map<std::string, std::vector<std::size_t>> subject_index_;
    std::map<std::string, std::vector<std::size_t>> predicate_index_;
    std::map<std::string, std::vector<std::size_t>> object_index_;
};

// Evaluate a query of the supported subset: backtracking join over the
// access maps (most selective pattern first), FILTER comparison, ORDER
// BY + LIMIT, COUNT, ASK. Results are always deduplicated and, absent
// ORDER BY, sorted lexicographically. Throws UnsupportedFeatureError for
// constructs outside the subset.
AnswerSet evaluate(const TripleStore& store, const ParsedQuery& q);

}  // namespace kgqa
