#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgqa/annotation.hpp"
#include "kgqa/triple_store.hpp"

namespace kgqa {

struct EntityRecord {
    std::string iri;
    std::vector<std::string> labels;  // never empty: falls back to the local name
    std::set<std::string> connected_relations;  // S(e)
    std::set<std::string> connected_types;
};

struct RelationRecord {
    std::string iri;
    std::vector<std::string> labels;
    std::vector<std::string> expansions;  // synonym/hypernym strings, searched like labels
    std::string domain, range;            // rdfs:domain / rdfs:range where declared
};

struct ClassRecord {
    std::string iri;
    std::vector<std::string> labels;
    std::vector<std::string> expansions;
};

struct LinkCandidate {
    std::string iri;
    std::string matched_label;  // the label or expansion that matched
    NGram source_ngram;
    double similarity = 0.0;  // highest token-window ratio, >= the threshold
};

struct IndexBuildReport {
    std::size_t triples_seen = 0;
};

// Synonym lexicon: canonical <TAB> synonym pairs, applied in both
// directions when generating expansions.
using SynonymLexicon = std::vector<std::pair<std::string, std::string>>;

SynonymLexicon load_synonym_lexicon(const std::string& path);

// The three indexes of the KB plus the adjacency needed for template
// filling. Immutable after build; reads are unrestricted.
class IndexBundle {
  public:
    static constexpr double kDefaultThreshold = 0.8;

    // Single pass over the triples. `label_predicates` defaults to
    // rdfs:label when empty.
    static IndexBundle build(const TripleStore& store,
                             const std::set<std::string>& label_predicates,
                             const SynonymLexicon& lexicon, IndexBuildReport* report = nullptr);

    std::vector<LinkCandidate> search_entities(const NGram& ngram,
                                               double threshold = kDefaultThreshold) const;
    std::vector<LinkCandidate> search_relations(const NGram& ngram,
                                                double threshold = kDefaultThreshold) const;
    std::vector<LinkCandidate> search_classes(const NGram& ngram,
                                              double threshold = kDefaultThreshold) const;

    // All o with (e,p,o) or (o,p,e), IRIs only. Throws UnknownEntityError
    // when e is not indexed.
    std::set<std::string> connected_objects(const std::string& entity,
                                            const std::string& predicate) const;

    // S(iri) for entities and classes alike (classes connect via rdf:type).
    const std::set<std::string>* connected_relations(const std::string& iri) const;

    bool is_entity(const std::string& iri) const { return entity_pos_.count(iri) > 0; }
    bool is_class(const std::string& iri) const { return class_pos_.count(iri) > 0; }
    const RelationRecord* relation(const std::string& iri) const;

    const std::vector<EntityRecord>& entities() const { return entities_; }
    const std::vector<RelationRecord>& relations() const { return relations_; }
    const std::vector<ClassRecord>& classes() const { return classes_; }

    // Versioned directory layout with a manifest; see README.
    void save(const std::string& directory) const;
    static IndexBundle load(const std::string& directory);

  private:
    std::vector<EntityRecord> entities_;
    std::vector<RelationRecord> relations_;
    std::vector<ClassRecord> classes_;
    std::map<std::string, std::size_t> entity_pos_, relation_pos_, class_pos_;

    // Token -> record positions, per index.
    std::map<std::string, std::vector<std::size_t>> entity_tokens_, relation_tokens_,
        class_tokens_;
    // (entity or class) -> relation -> neighbor IRIs, both directions.
    std::map<std::string, std::map<std::string, std::set<std::string>>> adjacency_;
    std::map<std::string, std::set<std::string>> connectivity_;

    void rebuild_search_structures();
};

}  // namespace kgqa
