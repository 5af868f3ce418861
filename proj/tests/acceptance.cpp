// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Run via ctest or directly from the build directory.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>

#include "helpers.hpp"
#include "kgqa/pipeline.hpp"

using namespace kgqa;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail = "") {
    std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, name,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const AnnotationContext& ctx() {
    static AnnotationContext c = AnnotationContext::from_files(
        KGQA_DATA_DIR "/pos_lexicon.tsv", KGQA_DATA_DIR "/first_names.txt",
        KGQA_DATA_DIR "/stopwords.txt", KGQA_DATA_DIR "/topics.tsv");
    return c;
}

Engine build_toy_engine() {
    DataFiles files = DataFiles::in_dir(KGQA_DATA_DIR);
    Engine engine;
    engine.annotation = ctx();
    engine.keywords = KeywordTables::from_files(files.comparatives, files.superlatives);
    engine.store.load_ntriples_file(KGQA_DATA_DIR "/toy/kg.nt");
    engine.index = IndexBundle::build(engine.store, {}, load_synonym_lexicon(files.synonyms));
    auto ts = build_training_set(
        dataset_to_pairs(load_dataset(KGQA_DATA_DIR "/toy/train.json")), engine.annotation);
    engine.model = train(ts, Algorithm::NaiveBayes, 42);
    return engine;
}

// 1. canonical_key equality == brute-force isomorphism on random graphs.
void criterion_1() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(2024);
    std::vector<BgpGraph> graphs;
    std::vector<std::string> keys;
    for (int i = 0; i < 200; ++i) {
        graphs.push_back(testgen::random_bgp_graph(rng, 5));
        keys.push_back(canonicalize(graphs.back()).canonical_key);
    }
    long pairs = 0, disagreements = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        for (std::size_t j = i + 1; j < graphs.size(); ++j) {
            bool by_key = keys[i] == keys[j];
            bool by_oracle = is_isomorphic(graphs[i], graphs[j]);
            if (by_key != by_oracle) ++disagreements;
            ++pairs;
        }
    }
    double elapsed = seconds_since(start);
    report(1, "isomorphism oracle equivalence",
           pairs >= 2000 && disagreements == 0 && elapsed < 30.0,
           std::to_string(pairs) + " pairs, " + std::to_string(disagreements) +
               " disagreements, " + std::to_string(elapsed) + "s");
}

// 2. the eight hand-transcribed template shapes stay distinct.
void criterion_2() {
    const std::vector<std::string> shapes = {
        "SELECT ?uri WHERE { <http://e/1> <http://p/1> ?uri }",
        "SELECT ?uri WHERE { <http://e/1> <http://p/1> ?uri . ?uri <http://p/2> <http://e/2> }",
        "SELECT ?uri WHERE { ?uri <http://p/1> <http://e/1> . ?uri <http://p/2> <http://e/2> }",
        "SELECT ?uri WHERE { <http://e/1> <http://p/1> ?child . ?child <http://p/2> ?uri }",
        "SELECT ?uri WHERE { ?x <http://p/1> <http://e/1> . ?x <http://p/2> <http://e/2> . "
        "?x <http://p/3> ?uri }",
        "ASK WHERE { <http://e/1> <http://p/1> <http://e/2> }",
        "SELECT ?uri WHERE { ?uri <http://p/1> <http://e/1> }",
        "SELECT ?uri WHERE { ?x <http://p/1> <http://e/1> . ?x <http://p/2> ?uri }",
    };
    std::set<std::string> keys;
    for (const auto& s : shapes)
        keys.insert(canonicalize(to_bgp_graph(parse_query(s))).canonical_key);
    bool distinct = keys.size() == shapes.size();

    // structural duplicates (renamed variables and entities) collapse
    bool collapsed =
        keys.count(canonicalize(to_bgp_graph(parse_query(
                       "SELECT ?a WHERE { <http://z/9> <http://q/9> ?a }")))
                       .canonical_key) > 0 &&
        keys.count(canonicalize(to_bgp_graph(parse_query(
                       "SELECT ?w WHERE { ?h <http://q/1> <http://z/1> . ?h <http://q/2> ?w }")))
                       .canonical_key) > 0;
    report(2, "template shape reconstruction", distinct && collapsed,
           std::to_string(keys.size()) + " distinct keys");
}

// 3. the example feature vector is reproduced exactly.
void criterion_3() {
    auto f = extract_features(annotate("Who was the doctoral advisor of Albert Einstein?", ctx()),
                              ctx());
    bool ok = f.question_word == "Who" && f.entity_person && f.number_of_token == 8 &&
              f.query_resource_type == "dbo:Person" && f.noun == 1 && f.number == 0 &&
              f.verb == 1 && f.adjective == 0 && !f.comparative && f.triple_candidates == 1;
    report(3, "feature vector fidelity", ok, f.to_string());
}

// 4. classifier sanity on separable and label-shuffled data.
void criterion_4() {
    TrainingSet ts;
    const char* words[] = {"Who", "What", "Which", "How"};
    for (int c = 0; c < 4; ++c) {
        QueryTemplate tpl;
        tpl.class_id = c;
        ts.class_catalog.emplace(c, tpl);
        for (int i = 0; i < 15; ++i) {
            FeatureVector v;
            v.question_word = words[c];
            v.entity_person = c % 2 == 0;
            v.number_of_token = 4 + 3 * c + (i % 2);
            v.query_resource_type = c < 2 ? "dbo:Person" : "dbo:City";
            v.noun = 1 + c;
            v.verb = 1;
            v.adjective = c == 2 ? 1 : 0;
            v.comparative = c == 3;
            v.triple_candidates = 1 + (c % 3);
            ts.examples.emplace_back(v, c);
        }
        ts.class_support[c] = 15;
    }
    double separable = cross_validate(ts, 10, Algorithm::NaiveBayes, 42);

    // Balanced labels shuffled against label-independent features.
    TrainingSet shuffled;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> word(0, 3), tokens(4, 15), small(0, 3), coin(0, 1);
    for (int c = 0; c < 4; ++c) {
        QueryTemplate tpl;
        tpl.class_id = c;
        shuffled.class_catalog.emplace(c, tpl);
    }
    std::vector<int> labels;
    for (int i = 0; i < 120; ++i) labels.push_back(i % 4);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < 120; ++i) {
        FeatureVector v;
        v.question_word = words[word(rng)];
        v.entity_person = coin(rng) == 1;
        v.number_of_token = tokens(rng);
        v.query_resource_type = coin(rng) ? "dbo:Person" : "dbo:City";
        v.noun = small(rng);
        v.verb = 1 + small(rng) % 2;
        v.adjective = small(rng) % 2;
        v.comparative = coin(rng) == 1;
        v.triple_candidates = 1 + small(rng) % 3;
        shuffled.examples.emplace_back(v, labels[i]);
        ++shuffled.class_support[labels[i]];
    }
    double chance = cross_validate(shuffled, 10, Algorithm::NaiveBayes, 42);

    bool ok = separable >= 0.95 && chance >= 0.15 && chance <= 0.35;
    report(4, "classifier sanity", ok,
           "separable F=" + std::to_string(separable) + ", shuffled F=" + std::to_string(chance));

    // Optional full-data harness: report the QALD-9 CV score when the user
    // supplies the train file. The reference value is printed for
    // comparison, not enforced.
    const char* qald = std::getenv("KGQA_QALD9_TRAIN");
    if (qald && *qald) {
        try {
            auto ds = load_dataset(qald);
            auto qts = build_training_set(dataset_to_pairs(ds), ctx());
            double f = cross_validate(qts, 10, Algorithm::NaiveBayes, 42);
            std::printf("INFO  criterion 4: supplied train set CV macro-weighted F = %f "
                        "(reference 0.528875)\n",
                        f);
            // Where does the single-forward-pattern template land for the
            // running example?
            auto model = train(qts, Algorithm::NaiveBayes, 42);
            auto v = extract_features(
                annotate("Who was the doctoral advisor of Albert Einstein?", ctx()), ctx());
            auto ranked = model.predict_ranked(v);
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                const auto& tpl = model.class_catalog().at(ranked[i].first);
                if (tpl.canonical_key == "bgpv1|ae|1>0") {
                    std::printf("INFO  criterion 4: single-pattern forward template ranked "
                                "#%zu for the running example\n",
                                i + 1);
                    break;
                }
            }
        } catch (const std::exception& e) {
            std::printf("INFO  criterion 4: supplied-train harness failed: %s\n", e.what());
        }
    } else {
        std::printf("INFO  criterion 4: set KGQA_QALD9_TRAIN to a QALD-9 train JSON to report "
                    "the full-data CV score\n");
    }
}

// 5. indexed join vs naive cross-product oracle on random stores.
void criterion_5() {
    std::mt19937 rng(31337);
    int instances = 0, mismatches = 0, count_mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        auto store = testgen::random_store(rng, 200);
        auto q = testgen::random_bgp_query(rng, 3);
        auto oracle = testgen::oracle_select(store, q);
        auto got = evaluate(store, q);
        if (q.form == QueryForm::Ask) {
            if (got.boolean != !oracle.empty()) ++mismatches;
        } else {
            std::set<std::string> got_set;
            for (const auto& v : got.values) got_set.insert(term_to_sparql(v));
            if (got_set != oracle) ++mismatches;
            ParsedQuery counted = q;
            counted.modifiers.emplace_back(CountModifier{});
            auto c = evaluate(store, counted);
            if (c.kind != AnswerKind::Count ||
                c.count != static_cast<long>(got.values.size()))
                ++count_mismatches;
        }
        ++instances;
    }
    report(5, "store correctness vs naive oracle", mismatches == 0 && count_mismatches == 0,
           std::to_string(instances) + " instances, " + std::to_string(mismatches) +
               " join mismatches, " + std::to_string(count_mismatches) + " count mismatches");
}

// 6. the bundled toy benchmark end to end.
void criterion_6(const Engine& engine) {
    auto start = std::chrono::steady_clock::now();
    auto ds = load_dataset(KGQA_DATA_DIR "/toy/test.json");
    auto rep = evaluate_dataset(engine, ds);
    double elapsed = seconds_since(start);
    bool ok = ds.questions.size() == 20 && rep.exact_matches >= 18 && rep.macro_f1 >= 0.90 &&
              elapsed < 60.0;
    report(6, "end-to-end toy suite", ok,
           std::to_string(rep.exact_matches) + "/20 exact, macro F=" +
               std::to_string(rep.macro_f1) + ", " + std::to_string(elapsed) + "s");
}

// 7. the rating arithmetic, to exact floating point.
void criterion_7() {
    auto mk = [](const std::string& iri, const std::string& label, NGram span) {
        CandidateQuery c;
        c.binding["ent_0"] = BoundValue{iri, true, LinkCandidate{iri, label, span, 1.0}};
        return c;
    };
    AnswerSet one;
    one.kind = AnswerKind::Resources;
    one.values.push_back(Term::iri("http://x/r"));

    auto merkel = mk("http://dbpedia.org/resource/Angela_Merkel", "Angela Merkel",
                     NGram{8, 2, "Angela Merkel"});
    auto angela = mk("http://dbpedia.org/resource/Angela", "Angela", NGram{8, 1, "Angela"});
    bool density = rate(merkel, one) == 2.0 && rate(angela, one) == 1.0;

    AnswerSet many;
    many.kind = AnswerKind::Resources;
    for (int i = 0; i < 51; ++i) many.values.push_back(Term::iri("http://x/" + std::to_string(i)));
    CandidateQuery three;
    three.binding["ent_0"] =
        BoundValue{"http://x/a", true,
                   LinkCandidate{"http://x/a", "alpha beta gamma",
                                 NGram{0, 3, "alpha beta gamma"}, 1.0}};
    bool penalty = rate(three, many) == 3.0 * 0.7;

    report(7, "rating arithmetic", density && penalty,
           "r(Angela Merkel)=" + std::to_string(rate(merkel, one)) +
               ", r(Angela)=" + std::to_string(rate(angela, one)) +
               ", penalized=" + std::to_string(rate(three, many)));
}

// 8. metric arithmetic and order independence.
void criterion_8(const Engine& engine) {
    QuestionScore s;
    score_question({"a", "b"}, {"b", "c"}, s);
    bool arithmetic = s.precision == 0.5 && s.recall == 0.5 && s.f1 == 0.5;

    auto ds = load_dataset(KGQA_DATA_DIR "/toy/test.json");
    auto base = evaluate_dataset(engine, ds).to_json(false);
    BenchmarkDataset shuffled = ds;
    std::mt19937_64 rng(77);
    std::shuffle(shuffled.questions.begin(), shuffled.questions.end(), rng);
    auto moved_report = evaluate_dataset(engine, shuffled);
    // compare per-id scores and aggregate metrics
    nlohmann::json base_by_id = nlohmann::json::object(), moved_by_id = nlohmann::json::object();
    for (const auto& q : base["per_question"]) base_by_id[q["id"].get<std::string>()] = q;
    auto moved = moved_report.to_json(false);
    for (const auto& q : moved["per_question"]) moved_by_id[q["id"].get<std::string>()] = q;
    bool order_free = base_by_id.dump() == moved_by_id.dump() &&
                      base["macro_f1"].dump() == moved["macro_f1"].dump() &&
                      base["qald_f1"].dump() == moved["qald_f1"].dump();
    report(8, "metric arithmetic and order independence", arithmetic && order_free,
           "P=" + std::to_string(s.precision) + " R=" + std::to_string(s.recall) +
               " F=" + std::to_string(s.f1));
}

// 9. two identically-seeded evaluation runs match bit for bit (ex timing).
void criterion_9() {
    Engine a = build_toy_engine();
    Engine b = build_toy_engine();
    auto ds = load_dataset(KGQA_DATA_DIR "/toy/test.json");
    auto ra = evaluate_dataset(a, ds).to_json(false).dump();
    auto rb = evaluate_dataset(b, ds).to_json(false).dump();
    bool models_match = a.model.serialize() == b.model.serialize();
    report(9, "seeded determinism", models_match && ra == rb,
           models_match ? "model and report identical" : "model serialization differs");
}

}  // namespace

int main() {
    Engine engine = build_toy_engine();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6(engine);
    criterion_7();
    criterion_8(engine);
    criterion_9();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
