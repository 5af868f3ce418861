#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "kgqa/pipeline.hpp"

using namespace kgqa;
using nlohmann::json;

namespace {

constexpr int kExitDataError = 3;
constexpr int kExitIoError = 4;

struct CommonOptions {
    std::string data_dir = "data";
    std::string model_path = "model.json";
    std::string index_dir = "index";
    std::string kg_path;
    std::string endpoint;
    std::string stopwords_override;
    int top_k_templates = 2;
    double threshold = IndexBundle::kDefaultThreshold;
    int timeout_ms = 5000;

    void add_engine_flags(CLI::App* cmd) {
        cmd->add_option("--data-dir", data_dir, "Directory with bundled lexicons");
        cmd->add_option("--model", model_path, "Classifier model file");
        cmd->add_option("--index-dir", index_dir, "Index directory");
        cmd->add_option("--kg", kg_path, "N-Triples file for local execution");
        cmd->add_option("--endpoint", endpoint, "Remote SPARQL endpoint URL");
        cmd->add_option("--top-k-templates", top_k_templates, "Templates tried per question");
        cmd->add_option("--threshold", threshold, "Levenshtein similarity threshold");
        cmd->add_option("--timeout", timeout_ms, "Remote endpoint timeout in ms");
        cmd->add_option("--stopwords", stopwords_override, "Override stopword file");
    }

    Engine load_engine() const {
        DataFiles files = DataFiles::in_dir(data_dir);
        if (!stopwords_override.empty()) files.stopwords = stopwords_override;
        Engine engine;
        engine.annotation = AnnotationContext::from_files(files.pos_lexicon, files.first_names,
                                                          files.stopwords, files.topics);
        engine.keywords = KeywordTables::from_files(files.comparatives, files.superlatives);
        engine.model = ClassifierModel::load(model_path);
        engine.index = IndexBundle::load(index_dir);
        if (!kg_path.empty()) engine.store.load_ntriples_file(kg_path);
        else if (endpoint.empty())
            throw Error("either --kg or --endpoint is required");
        engine.config.top_k_templates = top_k_templates;
        engine.config.similarity_threshold = threshold;
        engine.config.timeout_ms = timeout_ms;
        engine.config.endpoint = endpoint;
        return engine;
    }
};

json answer_payload(const AnswerResult& r) {
    return json{{"answered", r.answered},
                {"answers", r.answered ? r.answers.value_strings() : std::vector<std::string>{}},
                {"sparql", r.sparql},
                {"confidence", r.confidence}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Template-based knowledge-graph question answering"};
    app.require_subcommand(1);

    // index-build
    auto* index_cmd = app.add_subcommand("index-build", "Build KB indexes from an N-Triples file");
    std::string ib_kg, ib_dir = "index", ib_lexicon, ib_data_dir = "data";
    std::vector<std::string> ib_label_preds;
    index_cmd->add_option("--kg", ib_kg, "N-Triples input")->required();
    index_cmd->add_option("--index-dir", ib_dir, "Output directory");
    index_cmd->add_option("--lexicon", ib_lexicon, "Synonym lexicon TSV (canonical<TAB>synonym)");
    index_cmd->add_option("--data-dir", ib_data_dir, "Directory with bundled lexicons");
    index_cmd->add_option("--label-predicate", ib_label_preds, "Label predicate IRIs");

    // train
    auto* train_cmd = app.add_subcommand("train", "Learn templates and train the classifier");
    std::string tr_dataset, tr_algorithm = "nb", tr_data_dir = "data", tr_model = "model.json";
    std::size_t tr_min_support = 5;
    unsigned long tr_seed = 42;
    int tr_folds = 10;
    train_cmd->add_option("--dataset", tr_dataset, "Training dataset JSON")->required();
    train_cmd->add_option("--model", tr_model, "Output model file");
    train_cmd->add_option("--algorithm", tr_algorithm, "nb | mlp");
    train_cmd->add_option("--min-support", tr_min_support, "Prune classes below this support");
    train_cmd->add_option("--seed", tr_seed, "Training seed");
    train_cmd->add_option("--folds", tr_folds, "Cross-validation folds");
    train_cmd->add_option("--data-dir", tr_data_dir, "Directory with bundled lexicons");

    // answer
    auto* answer_cmd = app.add_subcommand("answer", "Answer a single question");
    CommonOptions answer_opts;
    answer_opts.add_engine_flags(answer_cmd);
    std::string question;
    bool answer_json = false;
    answer_cmd->add_option("question", question, "Question text (stdin when omitted)");
    answer_cmd->add_flag("--json", answer_json, "Emit machine-readable output");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Run a benchmark dataset");
    CommonOptions eval_opts;
    eval_opts.add_engine_flags(eval_cmd);
    std::string ev_dataset, ev_json_out;
    eval_cmd->add_option("--dataset", ev_dataset, "Benchmark dataset JSON")->required();
    eval_cmd->add_option("--json-out", ev_json_out, "Write the full report as JSON");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "HTTP answering endpoint");
    CommonOptions serve_opts;
    serve_opts.add_engine_flags(serve_cmd);
    int port = 8090;
    serve_cmd->add_option("--port", port, "Listen port");

    CLI11_PARSE(app, argc, argv);

    try {
        if (index_cmd->parsed()) {
            TripleStore store;
            auto report = store.load_ntriples_file(ib_kg);
            SynonymLexicon lexicon;
            std::string lexicon_path = ib_lexicon;
            if (lexicon_path.empty())
                lexicon_path = DataFiles::in_dir(ib_data_dir).synonyms;
            if (std::filesystem::exists(lexicon_path))
                lexicon = load_synonym_lexicon(lexicon_path);
            IndexBuildReport build_report;
            auto bundle = IndexBundle::build(
                store, std::set<std::string>(ib_label_preds.begin(), ib_label_preds.end()),
                lexicon, &build_report);
            bundle.save(ib_dir);
            std::cout << "loaded " << report.triples_loaded << " triples ("
                      << report.malformed_lines << " malformed lines skipped)\n"
                      << "entities:  " << bundle.entities().size() << "\n"
                      << "relations: " << bundle.relations().size() << "\n"
                      << "classes:   " << bundle.classes().size() << "\n"
                      << "index written to " << ib_dir << "\n";
            return 0;
        }

        if (train_cmd->parsed()) {
            auto files = DataFiles::in_dir(tr_data_dir);
            auto ctx = AnnotationContext::from_files(files.pos_lexicon, files.first_names,
                                                     files.stopwords, files.topics);
            auto dataset = load_dataset(tr_dataset);
            auto pairs = dataset_to_pairs(dataset);
            auto ts = build_training_set(pairs, ctx, {tr_min_support, kDefaultNodeCap});
            std::cout << "pairs accepted:    " << ts.report.accepted << "\n"
                      << "duplicates:        " << ts.report.duplicates_dropped << "\n"
                      << "unparsable:        " << ts.report.unparsable.size() << "\n"
                      << "classes retained:  " << ts.class_support.size() << "\n"
                      << "classes pruned:    " << ts.pruned_classes.size() << "\n";
            auto algorithm = algorithm_from_name(tr_algorithm);
            auto model = train(ts, algorithm, tr_seed);
            model.save(tr_model);
            double cv = cross_validate(ts, tr_folds, algorithm, tr_seed);
            std::cout << "cross-validation macro-weighted F (" << tr_folds << " folds): " << cv
                      << "\nmodel written to " << tr_model << "\n";
            return 0;
        }

        if (answer_cmd->parsed()) {
            Engine engine = answer_opts.load_engine();
            if (question.empty()) std::getline(std::cin, question);
            AnswerResult r = answer_question(engine, question);
            if (answer_json) {
                std::cout << answer_payload(r).dump(2) << "\n";
            } else if (r.answered) {
                std::cout << "sparql: " << r.sparql << "\nanswers:";
                for (const auto& a : r.answers.value_strings()) std::cout << " " << a;
                std::cout << "\n";
            } else {
                std::cout << "unanswered\n";
            }
            return 0;
        }

        if (eval_cmd->parsed()) {
            Engine engine = eval_opts.load_engine();
            auto dataset = load_dataset(ev_dataset);
            auto report = evaluate_dataset(engine, dataset);
            std::cout << report.to_text();
            if (!ev_json_out.empty()) {
                std::ofstream out(ev_json_out);
                if (!out) throw Error("cannot write report: " + ev_json_out);
                out << report.to_json().dump(2) << "\n";
                std::cout << "report written to " << ev_json_out << "\n";
            }
            return 0;
        }

        if (serve_cmd->parsed()) {
            Engine engine = serve_opts.load_engine();
            httplib::Server server;
            server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
                res.set_content(json{{"status", "ok"}}.dump(), "application/json");
            });
            server.Post("/question", [&engine](const httplib::Request& req,
                                               httplib::Response& res) {
                try {
                    json body = json::parse(req.body);
                    if (!body.contains("question")) {
                        res.status = 400;
                        res.set_content(json{{"error", "missing field 'question'"}}.dump(),
                                        "application/json");
                        return;
                    }
                    AnswerResult r = answer_question(engine, body["question"].get<std::string>());
                    res.set_content(answer_payload(r).dump(), "application/json");
                } catch (const json::exception& e) {
                    res.status = 400;
                    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
                } catch (const std::exception& e) {
                    res.status = 500;
                    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
                }
            });
            std::cout << "listening on port " << port << "\n";
            if (!server.listen("0.0.0.0", port)) throw Error("cannot bind port");
            return 0;
        }
    } catch (const TooFewClassesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
