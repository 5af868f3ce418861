#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgqa/classifier.hpp"
#include "kgqa/kb_index.hpp"
#include "kgqa/query_builder.hpp"
#include "kgqa/ranking.hpp"
#include "kgqa/remote.hpp"
#include "kgqa/triple_store.hpp"

namespace kgqa {

struct EngineConfig {
    int top_k_templates = 2;
    double similarity_threshold = IndexBundle::kDefaultThreshold;
    std::size_t max_bindings = 64;
    int timeout_ms = 5000;
    std::string endpoint;  // empty: evaluate against the local store
};

// Everything needed to answer questions. Immutable after loading, so
// batches and concurrent HTTP requests can share one engine.
struct Engine {
    AnnotationContext annotation;
    KeywordTables keywords;
    ClassifierModel model;
    IndexBundle index;
    TripleStore store;
    EngineConfig config;
};

// Bundled data files, resolved relative to one directory.
struct DataFiles {
    std::string pos_lexicon, first_names, stopwords, topics, synonyms, comparatives, superlatives;

    static DataFiles in_dir(const std::string& dir);
};

struct AnswerResult {
    bool answered = false;
    AnswerSet answers;
    std::string sparql;      // the selected query, empty when unanswered
    double confidence = 0.0; // classifier score of the winning template
    double rating = 0.0;
    nlohmann::json diagnostics;  // per-stage candidate counts and errors
};

// The five-stage pipeline: annotate, classify, link, build, execute +
// rank. Stage failures land in diagnostics; the call itself never throws.
AnswerResult answer_question(const Engine& engine, const std::string& text);

struct BenchmarkQuestion {
    std::string id;
    std::string text;
    std::string gold_sparql;                // may be empty
    std::vector<std::string> gold_answers;  // compared as a set of strings
};

struct BenchmarkDataset {
    std::vector<BenchmarkQuestion> questions;
};

// Accepts the QALD JSON layout (questions[].question[].{language,string},
// query.sparql, answers in SPARQL-results form) or the flat fixture layout
// (questions[].{id,question,sparql,answers}).
BenchmarkDataset load_dataset(const std::string& path);

// (question, gold sparql) pairs for training; questions without a query
// are skipped.
std::vector<QaPair> dataset_to_pairs(const BenchmarkDataset& ds);

struct QuestionScore {
    std::string id;
    double precision = 0.0, recall = 0.0, f1 = 0.0, qald_f1 = 0.0;
    bool answered = false;
    bool exact = false;
    double time_ms = 0.0;
    std::vector<std::string> system_answers;
};

struct EvaluationReport {
    std::vector<QuestionScore> per_question;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double qald_f1 = 0.0;
    std::size_t answered = 0;
    std::size_t exact_matches = 0;
    std::size_t total = 0;
    double avg_time_ms = 0.0;

    nlohmann::json to_json(bool include_timing = true) const;
    std::string to_text() const;
};

EvaluationReport evaluate_dataset(const Engine& engine, const BenchmarkDataset& ds);

// Per-question arithmetic, exposed for tests: P = |g∩s|/|s| (0 when the
// system set is empty), R = |g∩s|/|g| (1 when both sets are empty), F1
// harmonic (0 when P+R = 0). The QALD convention scores unanswered
// questions with non-empty gold as 0 and empty-vs-empty as 1.
void score_question(const std::vector<std::string>& system_answers,
                    const std::vector<std::string>& gold_answers, QuestionScore& out);

}  // namespace kgqa
