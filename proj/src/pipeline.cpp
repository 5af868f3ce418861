#include "kgqa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kgqa/text_util.hpp"

namespace kgqa {

using nlohmann::json;

DataFiles DataFiles::in_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
    return DataFiles{at("pos_lexicon.tsv"), at("first_names.txt"), at("stopwords.txt"),
                     at("topics.tsv"),      at("synonyms.tsv"),    at("comparatives.tsv"),
                     at("superlatives.tsv")};
}

namespace {

// Pool caps keep pathological questions from exploding the fill search;
// candidates are similarity-sorted, so the strongest links survive.
constexpr std::size_t kMaxPoolSize = 50;

void append_capped(std::vector<LinkCandidate>& pool, const std::vector<LinkCandidate>& found) {
    for (const auto& c : found) {
        if (pool.size() >= kMaxPoolSize) return;
        pool.push_back(c);
    }
}

AnswerSet execute_candidate(const Engine& engine, const CandidateQuery& c) {
    if (!engine.config.endpoint.empty()) {
        AnswerSet a = remote_execute(engine.config.endpoint, c.sparql, engine.config.timeout_ms);
        // A COUNT result arrives as one numeric literal over the wire.
        if (c.variant == QueryVariant::Count && a.kind == AnswerKind::Literals &&
            a.values.size() == 1) {
            AnswerSet count;
            count.kind = AnswerKind::Count;
            count.count = std::stol(a.values[0].value);
            return count;
        }
        return a;
    }
    return evaluate(engine.store, parse_query(c.sparql));
}

}  // namespace

AnswerResult answer_question(const Engine& engine, const std::string& text) {
    AnswerResult result;
    json& diag = result.diagnostics;
    diag["question"] = text;

    AnnotatedQuestion aq;
    try {
        aq = annotate(text, engine.annotation);
    } catch (const Error& e) {
        diag["errors"].push_back(e.what());
        return result;
    }

    auto features = extract_features(aq, engine.annotation);
    auto expected = expected_answer(aq);
    auto mods = detect_modifiers(aq, engine.keywords);
    diag["features"] = features.to_string();
    diag["expected_answer"] = expected_answer_name(expected);
    diag["modifiers"] = {{"count", mods.count},
                         {"comparative", mods.comparative.has_value()},
                         {"superlative", mods.superlative.has_value()},
                         {"ask", mods.ask}};
    diag["ngrams"] = aq.ngrams.size();

    // Link every relevant n-gram; class candidates join the entity pool
    // since they fill entity placeholders (through an implicit rdf:type).
    std::vector<LinkCandidate> entity_pool, relation_pool;
    for (const auto& ngram : aq.ngrams) {
        append_capped(entity_pool, engine.index.search_entities(ngram,
                                                                engine.config.similarity_threshold));
        append_capped(entity_pool, engine.index.search_classes(ngram,
                                                               engine.config.similarity_threshold));
        append_capped(relation_pool, engine.index.search_relations(
                                         ngram, engine.config.similarity_threshold));
    }
    diag["entity_candidates"] = entity_pool.size();
    diag["relation_candidates"] = relation_pool.size();

    auto ranked_classes = engine.model.predict_ranked(features);
    std::vector<RankedAnswer> executed;
    json templates_tried = json::array();

    for (int k = 0; k < engine.config.top_k_templates &&
                    k < static_cast<int>(ranked_classes.size());
         ++k) {
        auto [class_id, score] = ranked_classes[k];
        const QueryTemplate& tpl = engine.model.class_catalog().at(class_id);
        auto bindings = fill_template(tpl, entity_pool, relation_pool, engine.index,
                                      {engine.config.max_bindings});
        auto queries = generate_queries(tpl, bindings, mods, score);
        json t = {{"class_id", class_id},
                  {"score", score},
                  {"key", tpl.canonical_key},
                  {"bindings", bindings.size()},
                  {"queries", queries.size()}};
        json failures = json::array();
        for (const auto& q : queries) {
            try {
                AnswerSet answers = execute_candidate(engine, q);
                executed.push_back({q, std::move(answers), 0.0});
            } catch (const std::exception& e) {
                // a failed candidate never aborts the question
                failures.push_back({{"sparql", q.sparql}, {"error", e.what()}});
            }
        }
        t["failures"] = failures;
        templates_tried.push_back(std::move(t));
    }
    diag["templates"] = templates_tried;
    diag["executed"] = executed.size();

    auto survivors = type_filter(executed, expected);
    diag["after_type_filter"] = survivors.size();
    for (auto& s : survivors) s.rating = rate(s.query, s.answers);

    try {
        RankedAnswer best = select_best(survivors);
        result.answered = true;
        result.answers = best.answers;
        result.sparql = best.query.sparql;
        result.confidence = best.query.classifier_score;
        result.rating = best.rating;
        diag["selected_variant"] = variant_name(best.query.variant);
    } catch (const NoAnswerError&) {
        result.answered = false;
    }
    return result;
}

BenchmarkDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset: " + path);
    json doc = json::parse(in);
    BenchmarkDataset ds;
    if (!doc.contains("questions")) throw Error("dataset lacks a questions array");

    for (const auto& q : doc["questions"]) {
        BenchmarkQuestion bq;
        if (q.contains("id"))
            bq.id = q["id"].is_string() ? q["id"].get<std::string>()
                                        : std::to_string(q["id"].get<long>());
        else
            bq.id = std::to_string(ds.questions.size());

        if (q.contains("question") && q["question"].is_string()) {
            // flat fixture layout
            bq.text = q["question"].get<std::string>();
            if (q.contains("sparql")) bq.gold_sparql = q["sparql"].get<std::string>();
            if (q.contains("answers"))
                for (const auto& a : q["answers"])
                    bq.gold_answers.push_back(a.is_string() ? a.get<std::string>() : a.dump());
        } else if (q.contains("question")) {
            // QALD layout
            for (const auto& lq : q["question"]) {
                if (lq.contains("language") && lq["language"].get<std::string>() != "en") continue;
                if (lq.contains("string")) bq.text = lq["string"].get<std::string>();
            }
            if (q.contains("query") && q["query"].contains("sparql"))
                bq.gold_sparql = q["query"]["sparql"].get<std::string>();
            if (q.contains("answers")) {
                for (const auto& ans : q["answers"]) {
                    if (ans.contains("boolean")) {
                        bq.gold_answers.push_back(ans["boolean"].get<bool>() ? "true" : "false");
                    } else if (ans.contains("results") && ans["results"].contains("bindings")) {
                        for (const auto& row : ans["results"]["bindings"]) {
                            for (const auto& [var, cell] : row.items()) {
                                if (cell.contains("value"))
                                    bq.gold_answers.push_back(cell["value"].get<std::string>());
                            }
                        }
                    }
                }
            }
        }
        if (!bq.text.empty()) ds.questions.push_back(std::move(bq));
    }
    return ds;
}

std::vector<QaPair> dataset_to_pairs(const BenchmarkDataset& ds) {
    std::vector<QaPair> pairs;
    for (const auto& q : ds.questions)
        if (!q.gold_sparql.empty()) pairs.push_back({q.text, q.gold_sparql});
    return pairs;
}

void score_question(const std::vector<std::string>& system_answers,
                    const std::vector<std::string>& gold_answers, QuestionScore& out) {
    std::set<std::string> sys(system_answers.begin(), system_answers.end());
    std::set<std::string> gold(gold_answers.begin(), gold_answers.end());
    std::size_t inter = 0;
    for (const auto& s : sys)
        if (gold.count(s)) ++inter;

    if (sys.empty())
        out.precision = 0.0;
    else
        out.precision = static_cast<double>(inter) / static_cast<double>(sys.size());
    if (gold.empty())
        out.recall = sys.empty() ? 1.0 : 0.0;
    else
        out.recall = static_cast<double>(inter) / static_cast<double>(gold.size());
    out.f1 = (out.precision + out.recall) > 0
                 ? 2 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;

    if (sys.empty() && !gold.empty()) out.qald_f1 = 0.0;
    else if (sys.empty() && gold.empty()) out.qald_f1 = 1.0;
    else out.qald_f1 = out.f1;

    out.exact = sys == gold;
    out.system_answers = system_answers;
}

EvaluationReport evaluate_dataset(const Engine& engine, const BenchmarkDataset& ds) {
    EvaluationReport report;
    report.total = ds.questions.size();
    double time_total = 0.0;

    for (const auto& q : ds.questions) {
        QuestionScore score;
        score.id = q.id;
        auto start = std::chrono::steady_clock::now();
        AnswerResult r = answer_question(engine, q.text);
        auto end = std::chrono::steady_clock::now();
        score.time_ms = std::chrono::duration<double, std::milli>(end - start).count();
        time_total += score.time_ms;
        score.answered = r.answered;
        std::vector<std::string> sys;
        if (r.answered) sys = r.answers.value_strings();
        score_question(sys, q.gold_answers, score);
        if (score.answered) ++report.answered;
        if (score.exact) ++report.exact_matches;
        report.macro_precision += score.precision;
        report.macro_recall += score.recall;
        report.macro_f1 += score.f1;
        report.qald_f1 += score.qald_f1;
        report.per_question.push_back(std::move(score));
    }
    if (report.total > 0) {
        double n = static_cast<double>(report.total);
        report.macro_precision /= n;
        report.macro_recall /= n;
        report.macro_f1 /= n;
        report.qald_f1 /= n;
        report.avg_time_ms = time_total / n;
    }
    return report;
}

json EvaluationReport::to_json(bool include_timing) const {
    json per = json::array();
    for (const auto& q : per_question) {
        json item = {{"id", q.id},
                     {"precision", q.precision},
                     {"recall", q.recall},
                     {"f1", q.f1},
                     {"qald_f1", q.qald_f1},
                     {"answered", q.answered},
                     {"exact", q.exact},
                     {"system_answers", q.system_answers}};
        if (include_timing) item["time_ms"] = q.time_ms;
        per.push_back(std::move(item));
    }
    json j = {{"macro_precision", macro_precision},
              {"macro_recall", macro_recall},
              {"macro_f1", macro_f1},
              {"qald_f1", qald_f1},
              {"answered", answered},
              {"exact_matches", exact_matches},
              {"total", total},
              {"per_question", per}};
    if (include_timing) j["avg_time_ms"] = avg_time_ms;
    return j;
}

std::string EvaluationReport::to_text() const {
    std::ostringstream out;
    out << "questions:        " << total << "\n"
        << "answered:         " << answered << "\n"
        << "exact matches:    " << exact_matches << "\n"
        << "macro precision:  " << macro_precision << "\n"
        << "macro recall:     " << macro_recall << "\n"
        << "macro F1:         " << macro_f1 << "\n"
        << "QALD F-measure:   " << qald_f1 << "\n"
        << "avg time/question " << avg_time_ms << " ms\n";
    return out.str();
}

}  // namespace kgqa
