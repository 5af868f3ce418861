#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgqa/ranking.hpp"

using namespace kgqa;

namespace {

const AnnotationContext& ctx() {
    static AnnotationContext c = AnnotationContext::from_files(
        KGQA_DATA_DIR "/pos_lexicon.tsv", KGQA_DATA_DIR "/first_names.txt",
        KGQA_DATA_DIR "/stopwords.txt", KGQA_DATA_DIR "/topics.tsv");
    return c;
}

ExpectedAnswer expect(const std::string& text) {
    return expected_answer(annotate(text, ctx()));
}

CandidateQuery with_binding(std::vector<std::tuple<std::string, std::string, NGram>> bound) {
    CandidateQuery c;
    int i = 0;
    for (auto& [iri, label, span] : bound) {
        BoundValue v{iri, true, LinkCandidate{iri, label, span, 1.0}};
        c.binding["ent_" + std::to_string(i++)] = v;
    }
    return c;
}

AnswerSet resources(std::size_t n) {
    AnswerSet a;
    a.kind = AnswerKind::Resources;
    for (std::size_t i = 0; i < n; ++i) a.values.push_back(Term::iri("http://x/" + std::to_string(i)));
    return a;
}

}  // namespace

TEST_CASE("expected answer types from surface form") {
    CHECK(expect("When was the Battle of Gettysburg?") == ExpectedAnswer::Date);
    CHECK(expect("Did Socrates influence Aristotle?") == ExpectedAnswer::Boolean);
    CHECK(expect("Is Berlin a city?") == ExpectedAnswer::Boolean);
    CHECK(expect("How many children did Benjamin Franklin have?") == ExpectedAnswer::Number);
    CHECK(expect("How large is the Empire State Building?") == ExpectedAnswer::Number);
    CHECK(expect("In which UK city are the headquarters of the MI6?") ==
          ExpectedAnswer::SingleResource);
    CHECK(expect("Which ingredients do I need for carrot cake?") ==
          ExpectedAnswer::MultiResource);
    CHECK(expect("Who was the doctoral advisor of Albert Einstein?") ==
          ExpectedAnswer::SingleResource);
    CHECK(expect("Who are the children of Benjamin Franklin?") == ExpectedAnswer::MultiResource);
}

TEST_CASE("invariant plurals give an unknown cardinality") {
    CHECK(expect("Which news should I read?") == ExpectedAnswer::Unknown);
}

TEST_CASE("type filter keeps matching kinds and drops empty sets") {
    AnswerSet date;
    date.kind = AnswerKind::Literals;
    date.values.push_back(
        Term::literal("1863-07-01", "http://www.w3.org/2001/XMLSchema#date"));

    std::vector<RankedAnswer> cands;
    cands.push_back({CandidateQuery{}, date, 0.0});
    auto kept = type_filter(cands, ExpectedAnswer::Date);
    CHECK(kept.size() == 1);

    // cardinality: a 3-element set is not a single resource
    std::vector<RankedAnswer> multi = {{CandidateQuery{}, resources(3), 0.0}};
    CHECK(type_filter(multi, ExpectedAnswer::SingleResource).empty());
    CHECK(type_filter(multi, ExpectedAnswer::MultiResource).size() == 1);

    // unknown keeps everything non-empty, in order
    std::vector<RankedAnswer> mixed = {{CandidateQuery{}, resources(3), 0.0},
                                       {CandidateQuery{}, resources(0), 0.0},
                                       {CandidateQuery{}, resources(1), 0.0}};
    auto all = type_filter(mixed, ExpectedAnswer::Unknown);
    REQUIRE(all.size() == 2);
    CHECK(all[0].answers.values.size() == 3);
    CHECK(all[1].answers.values.size() == 1);

    // a zero count is an empty answer
    AnswerSet zero;
    zero.kind = AnswerKind::Count;
    zero.count = 0;
    std::vector<RankedAnswer> zeroes = {{CandidateQuery{}, zero, 0.0}};
    CHECK(type_filter(zeroes, ExpectedAnswer::Number).empty());

    // boolean false is a real answer
    AnswerSet no;
    no.kind = AnswerKind::Boolean;
    no.boolean = false;
    std::vector<RankedAnswer> falses = {{CandidateQuery{}, no, 0.0}};
    CHECK(type_filter(falses, ExpectedAnswer::Boolean).size() == 1);
}

TEST_CASE("annotation density: Angela Merkel outranks Angela") {
    auto merkel = with_binding({{"http://dbpedia.org/resource/Angela_Merkel", "Angela Merkel",
                                 NGram{8, 2, "Angela Merkel"}}});
    auto angela = with_binding(
        {{"http://dbpedia.org/resource/Angela", "Angela", NGram{8, 1, "Angela"}}});
    double r_merkel = rate(merkel, resources(1));
    double r_angela = rate(angela, resources(1));
    CHECK(r_merkel == 2.0);  // two words, zero distance
    CHECK(r_angela == 1.0);  // one word, zero distance
    CHECK(r_merkel > r_angela);
}

TEST_CASE("syntactic similarity: closer labels rate higher") {
    NGram span{5, 4, "the interpretation of dreams"};
    auto close = with_binding({{"http://x/a", "The Interpretation of Dreams", span}});
    auto far = with_binding({{"http://x/b", "Great Book of Interpretation of Dreams", span}});
    CHECK(rate(close, resources(1)) > rate(far, resources(1)));
    CHECK(rate(close, resources(1)) == 4.0);  // case-insensitive exact match
}

TEST_CASE("large result sets are penalized by 30 percent") {
    auto c = with_binding({{"http://x/a", "alpha beta gamma", NGram{0, 3, "alpha beta gamma"}}});
    CHECK(rate(c, resources(50)) == 3.0);        // at the threshold: no penalty
    CHECK(rate(c, resources(51)) == 3.0 * 0.7);  // over: exactly -30%
}

TEST_CASE("ratings are binding-order independent and additive") {
    NGram a{0, 2, "Angela Merkel"};
    NGram b{4, 1, "chancellor"};
    auto both = with_binding({{"http://x/1", "Angela Merkel", a}, {"http://x/2", "chancellor", b}});
    auto flipped =
        with_binding({{"http://x/2", "chancellor", b}, {"http://x/1", "Angela Merkel", a}});
    CHECK(rate(both, resources(1)) == rate(flipped, resources(1)));
    CHECK(rate(both, resources(1)) == 3.0);

    // adding a positive-score binding strictly increases the rating
    auto one = with_binding({{"http://x/1", "Angela Merkel", a}});
    CHECK(rate(both, resources(1)) > rate(one, resources(1)));
}

TEST_CASE("implicit bindings do not contribute") {
    CandidateQuery c;
    c.binding["pred_0"] = BoundValue{"http://www.w3.org/1999/02/22-rdf-syntax-ns#type", false, {}};
    CHECK(rate(c, resources(1)) == 0.0);
}

TEST_CASE("select_best ordering and tie-breaks") {
    auto mk = [](double rating, double cls, std::size_t results, const std::string& text) {
        RankedAnswer r;
        r.rating = rating;
        r.query.classifier_score = cls;
        r.query.sparql = text;
        r.answers = resources(results);
        return r;
    };
    // rating dominates
    CHECK(select_best({mk(2.0, 0.1, 1, "b"), mk(1.0, 0.9, 1, "a")}).query.sparql == "b");
    // classifier score breaks rating ties
    CHECK(select_best({mk(2.0, 0.4, 1, "b"), mk(2.0, 0.7, 1, "a")}).query.classifier_score ==
          0.7);
    // fewer results breaks the next tie
    CHECK(select_best({mk(2.0, 0.5, 3, "b"), mk(2.0, 0.5, 2, "a")}).answers.values.size() == 2);
    // lexicographic query text is last
    CHECK(select_best({mk(2.0, 0.5, 1, "b"), mk(2.0, 0.5, 1, "a")}).query.sparql == "a");
    CHECK_THROWS_AS(select_best({}), NoAnswerError);
}

TEST_CASE("detected superlative direction wins among tied order variants") {
    auto mk = [](QueryVariant v, const std::string& text) {
        RankedAnswer r;
        r.rating = 2.0;
        r.query.variant = v;
        r.query.detected_superlative = SortOrder::Desc;
        r.query.sparql = text;
        r.answers = resources(1);
        return r;
    };
    // ASC sorts first lexicographically, but the question said "tallest"
    auto best = select_best({mk(QueryVariant::OrderAsc, "ORDER BY ASC"),
                             mk(QueryVariant::OrderDesc, "ORDER BY DESC")});
    CHECK(best.query.variant == QueryVariant::OrderDesc);
}

TEST_CASE("the penalty preserves relative order above the threshold") {
    auto a = with_binding({{"http://x/1", "alpha beta", NGram{0, 2, "alpha beta"}}});
    auto b = with_binding({{"http://x/2", "alpha", NGram{0, 1, "alpha"}}});
    CHECK(rate(a, resources(60)) > rate(b, resources(60)));
}
