#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgqa/query_builder.hpp"
#include "kgqa/triple_store.hpp"

using namespace kgqa;

namespace {

const char* kFranklin = "http://dbpedia.org/resource/Benjamin_Franklin";
const char* kEinstein = "http://dbpedia.org/resource/Albert_Einstein";
const char* kAdvisor = "http://dbpedia.org/ontology/doctoralAdvisor";
const char* kChild = "http://dbpedia.org/ontology/child";

const TripleStore& toy_store() {
    static TripleStore store = [] {
        TripleStore s;
        s.load_ntriples_file(KGQA_DATA_DIR "/toy/kg.nt");
        // extra generation for the chain-template fixture
        s.add(Term::iri("http://dbpedia.org/resource/William_Franklin"), Term::iri(kChild),
              Term::iri("http://dbpedia.org/resource/William_Temple_Franklin"));
        s.add(Term::iri("http://dbpedia.org/resource/William_Temple_Franklin"),
              Term::iri("http://www.w3.org/2000/01/rdf-schema#label"),
              Term::literal("William Temple Franklin"));
        return s;
    }();
    return store;
}

const IndexBundle& toy_bundle() {
    static IndexBundle bundle = IndexBundle::build(
        toy_store(), {}, load_synonym_lexicon(KGQA_DATA_DIR "/synonyms.tsv"));
    return bundle;
}

const KeywordTables& tables() {
    static KeywordTables t = KeywordTables::from_files(KGQA_DATA_DIR "/comparatives.tsv",
                                                       KGQA_DATA_DIR "/superlatives.tsv");
    return t;
}

const AnnotationContext& ctx() {
    static AnnotationContext c = AnnotationContext::from_files(
        KGQA_DATA_DIR "/pos_lexicon.tsv", KGQA_DATA_DIR "/first_names.txt",
        KGQA_DATA_DIR "/stopwords.txt", KGQA_DATA_DIR "/topics.tsv");
    return c;
}

QueryTemplate canon_of(const std::string& sparql) {
    return canonicalize(to_bgp_graph(parse_query(sparql)));
}

LinkCandidate cand(const std::string& iri, const std::string& label, std::size_t start,
                   std::size_t len) {
    std::string surface = label;  // good enough for tests
    return LinkCandidate{iri, label, NGram{start, len, surface}, 1.0};
}

}  // namespace

TEST_CASE("case 1 fills the running example") {
    auto t = canon_of("SELECT ?uri WHERE { <http://e/1> <http://p/1> ?uri }");
    std::vector<LinkCandidate> ents = {cand(kEinstein, "Albert Einstein", 6, 2)};
    std::vector<LinkCandidate> rels = {cand(kAdvisor, "doctoral advisor", 3, 2)};
    auto bindings = fill_template(t, ents, rels, toy_bundle());
    REQUIRE(bindings.size() == 1);
    CHECK(bindings[0].at("ent_0").iri == kEinstein);
    CHECK(bindings[0].at("pred_0").iri == kAdvisor);

    auto queries = generate_queries(t, bindings, ModifierSet{});
    REQUIRE(queries.size() == 1);
    auto q = parse_query(queries[0].sparql);
    CHECK(q.patterns.size() == 1);
    CHECK(q.patterns[0].subject.value == kEinstein);
    CHECK(q.patterns[0].predicate.value == kAdvisor);
}

TEST_CASE("connectivity gate rejects unconnected relations") {
    auto t = canon_of("SELECT ?uri WHERE { <http://e/1> <http://p/1> ?uri }");
    std::vector<LinkCandidate> ents = {cand(kEinstein, "Albert Einstein", 6, 2)};
    std::vector<LinkCandidate> rels = {cand(kChild, "child", 3, 1)};  // child not in S(Einstein)
    CHECK(fill_template(t, ents, rels, toy_bundle()).empty());
}

TEST_CASE("overlapping source spans cannot bind one triple") {
    auto t = canon_of("SELECT ?uri WHERE { <http://e/1> <http://p/1> ?uri }");
    // entity and relation linked from the same tokens
    std::vector<LinkCandidate> ents = {cand(kEinstein, "Albert Einstein", 2, 2)};
    std::vector<LinkCandidate> rels = {cand(kAdvisor, "doctoral advisor", 1, 2)};
    CHECK(fill_template(t, ents, rels, toy_bundle()).empty());
}

TEST_CASE("case 2 on the chain template agrees with brute force") {
    // <ent> -pred-> ?child -pred2-> ?uri, the child-of-child shape
    auto t = canon_of("SELECT ?uri WHERE { <http://e/1> <http://p/1> ?c . ?c <http://p/2> ?uri }");
    std::vector<LinkCandidate> ents = {cand(kFranklin, "Benjamin Franklin", 5, 2)};
    std::vector<LinkCandidate> rels = {cand(kChild, "children", 2, 1),
                                       cand(kChild, "children", 8, 1)};
    auto bindings = fill_template(t, ents, rels, toy_bundle());
    REQUIRE_FALSE(bindings.empty());
    for (const auto& b : bindings) {
        CHECK(b.at("ent_0").iri == kFranklin);
        CHECK(b.at("pred_0").iri == kChild);
        CHECK(b.at("pred_1").iri == kChild);  // the case-2 slot got the second relation
    }

    // Brute-force oracle: enumerate all relation pairs and keep those whose
    // instantiated chain has a solution in the store.
    std::set<std::pair<std::string, std::string>> oracle;
    for (const auto& p1 : rels) {
        for (const auto& p2 : rels) {
            auto sparql = instantiate(
                t, {{"ent_0", kFranklin}, {"pred_0", p1.iri}, {"pred_1", p2.iri}},
                QueryForm::Select);
            if (!evaluate(toy_store(), parse_query(sparql)).values.empty())
                oracle.insert({p1.iri, p2.iri});
        }
    }
    std::set<std::pair<std::string, std::string>> filled;
    for (const auto& b : bindings) filled.insert({b.at("pred_0").iri, b.at("pred_1").iri});
    CHECK(filled == oracle);
}

TEST_CASE("case 2 without any case-1 triple yields nothing") {
    auto t = canon_of("SELECT ?uri WHERE { ?a <http://p/1> ?uri }");
    std::vector<LinkCandidate> rels = {cand(kChild, "child", 0, 1)};
    CHECK(fill_template(t, {}, rels, toy_bundle()).empty());
}

TEST_CASE("variable-free templates are not filled") {
    auto t = canon_of("ASK WHERE { <http://e/1> <http://p/1> <http://e/2> }");
    std::vector<LinkCandidate> ents = {cand(kEinstein, "Albert Einstein", 0, 2),
                                       cand(kFranklin, "Benjamin Franklin", 3, 2)};
    std::vector<LinkCandidate> rels = {cand(kAdvisor, "doctoral advisor", 6, 2)};
    CHECK(fill_template(t, ents, rels, toy_bundle()).empty());
}

TEST_CASE("class candidates imply an rdf:type predicate") {
    auto t = canon_of(
        "PREFIX dbo: <http://dbpedia.org/ontology/> "
        "SELECT ?uri WHERE { ?uri a dbo:Mountain . ?uri dbo:elevation ?x }");
    std::vector<LinkCandidate> ents = {
        cand("http://dbpedia.org/ontology/Mountain", "mountains", 1, 1)};
    std::vector<LinkCandidate> rels = {
        cand("http://dbpedia.org/ontology/elevation", "highest", 3, 1)};
    auto bindings = fill_template(t, ents, rels, toy_bundle());
    REQUIRE(bindings.size() == 1);
    CHECK(bindings[0].at("pred_0").iri == "http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
    CHECK_FALSE(bindings[0].at("pred_0").has_source);
    CHECK(bindings[0].at("pred_1").iri == "http://dbpedia.org/ontology/elevation");
}

TEST_CASE("domain declarations veto inconsistent bindings") {
    TripleStore store;
    auto iri = [](const std::string& s) { return Term::iri(s); };
    store.add(iri("http://x/rome"), iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
              iri("http://x/City"));
    store.add(iri("http://x/rome"), iri("http://x/mayor"), iri("http://x/someone"));
    store.add(iri("http://x/mayor"), iri("http://www.w3.org/2000/01/rdf-schema#domain"),
              iri("http://x/Country"));  // declared domain disagrees with City
    auto bundle = IndexBundle::build(store, {}, {});

    auto t = canon_of(
        "SELECT ?uri WHERE { ?uri a <http://x/City> . ?uri <http://x/mayor> ?m }");
    std::vector<LinkCandidate> ents = {cand("http://x/City", "city", 1, 1)};
    std::vector<LinkCandidate> rels = {cand("http://x/mayor", "mayor", 3, 1)};
    CHECK(fill_template(t, ents, rels, bundle).empty());
}

TEST_CASE("modifier detection fixtures") {
    auto count_q = annotate("How many children did Benjamin Franklin have?", ctx());
    auto m1 = detect_modifiers(count_q, tables());
    CHECK(m1.count);
    CHECK_FALSE(m1.ask);

    auto ask_q = annotate("Did Socrates influence Aristotle?", ctx());
    auto m2 = detect_modifiers(ask_q, tables());
    CHECK(m2.ask);
    CHECK_FALSE(m2.count);

    auto sup_q = annotate("Who is the tallest player?", ctx());
    auto m3 = detect_modifiers(sup_q, tables());
    REQUIRE(m3.superlative.has_value());
    CHECK(*m3.superlative == SortOrder::Desc);

    auto asc_q = annotate("Who is the shortest player?", ctx());
    REQUIRE(detect_modifiers(asc_q, tables()).superlative.has_value());
    CHECK(*detect_modifiers(asc_q, tables()).superlative == SortOrder::Asc);

    auto cmp_q = annotate("Which mountains are higher than the Matterhorn?", ctx());
    auto m4 = detect_modifiers(cmp_q, tables());
    REQUIRE(m4.comparative.has_value());
    CHECK(*m4.comparative == CompareOp::Greater);

    auto less_q = annotate("Which players are shorter than Yao Ming?", ctx());
    REQUIRE(detect_modifiers(less_q, tables()).comparative.has_value());
    CHECK(*detect_modifiers(less_q, tables()).comparative == CompareOp::Less);
}

TEST_CASE("ask excludes count and superlative") {
    auto q = annotate("Did the tallest player score?", ctx());
    auto m = detect_modifiers(q, tables());
    CHECK(m.ask);
    CHECK_FALSE(m.count);
    CHECK_FALSE(m.superlative.has_value());
}

TEST_CASE("variant counts follow the enumeration rule") {
    auto t = canon_of("SELECT ?uri WHERE { <http://e/1> <http://p/1> ?uri }");
    std::vector<LinkCandidate> ents = {cand(kEinstein, "Albert Einstein", 6, 2)};
    std::vector<LinkCandidate> rels = {cand(kAdvisor, "doctoral advisor", 3, 2)};
    auto bindings = fill_template(t, ents, rels, toy_bundle());
    REQUIRE(bindings.size() == 1);

    ModifierSet none;
    CHECK(generate_queries(t, bindings, none).size() == 1);  // plain only

    ModifierSet count;
    count.count = true;
    CHECK(generate_queries(t, bindings, count).size() == 2);  // plain + COUNT

    // superlative on a template with a helper variable: plain + ASC + DESC
    auto t2 = canon_of(
        "PREFIX dbo: <http://dbpedia.org/ontology/> "
        "SELECT ?uri WHERE { ?uri a dbo:Mountain . ?uri dbo:elevation ?x }");
    std::vector<LinkCandidate> ents2 = {
        cand("http://dbpedia.org/ontology/Mountain", "mountains", 1, 1)};
    std::vector<LinkCandidate> rels2 = {
        cand("http://dbpedia.org/ontology/elevation", "highest", 3, 1)};
    auto b3 = fill_template(t2, ents2, rels2, toy_bundle());
    std::vector<Binding> three = {b3.at(0), b3.at(0), b3.at(0)};
    ModifierSet sup;
    sup.superlative = SortOrder::Desc;
    CHECK(generate_queries(t2, three, sup).size() == 9);

    // superlative without a helper variable: the modifier is dropped
    CHECK(generate_queries(t, bindings, sup).size() == 1);
}

TEST_CASE("emitted queries parse back to the template's key") {
    auto t = canon_of(
        "PREFIX dbo: <http://dbpedia.org/ontology/> "
        "SELECT ?uri WHERE { ?uri a dbo:Mountain . ?uri dbo:elevation ?x }");
    std::vector<LinkCandidate> ents = {
        cand("http://dbpedia.org/ontology/Mountain", "mountains", 1, 1)};
    std::vector<LinkCandidate> rels = {
        cand("http://dbpedia.org/ontology/elevation", "highest", 3, 1)};
    auto bindings = fill_template(t, ents, rels, toy_bundle());
    ModifierSet sup;
    sup.superlative = SortOrder::Desc;
    sup.count = true;
    auto queries = generate_queries(t, bindings, sup);
    CHECK(queries.size() == 4 * bindings.size());  // plain, count, asc, desc
    for (const auto& q : queries) {
        auto back = canonicalize(to_bgp_graph(parse_query(q.sparql)));
        CHECK(back.canonical_key == t.canonical_key);  // modifiers are discarded
    }
}
