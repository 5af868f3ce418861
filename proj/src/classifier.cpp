#include "kgqa/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "kgqa/text_util.hpp"

namespace kgqa {

using nlohmann::json;

namespace {

constexpr int kNominalCount = 4;
constexpr int kNumericCount = 6;
constexpr int kHiddenUnits = 16;
constexpr int kEpochs = 200;
constexpr double kLearningRate = 0.05;
constexpr double kVarianceFloor = 0.04;

std::string nominal_value(const FeatureVector& v, int f) {
    switch (f) {
        case 0: return v.question_word;
        case 1: return v.entity_person ? "Person" : "NoPerson";
        case 2: return v.query_resource_type;
        default: return v.comparative ? "Comparative" : "NoComparative";
    }
}

double numeric_value(const FeatureVector& v, int f) {
    switch (f) {
        case 0: return v.number_of_token;
        case 1: return v.noun;
        case 2: return v.number;
        case 3: return v.verb;
        case 4: return v.adjective;
        default: return v.triple_candidates;
    }
}

json graph_to_json(const BgpGraph& g) {
    json nodes = json::array();
    for (auto l : g.nodes)
        nodes.push_back(l == NodeLabel::AnswerVar ? "a" : (l == NodeLabel::Entity ? "e" : "v"));
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({e.from, e.to});
    return json{{"nodes", nodes}, {"edges", edges}};
}

BgpGraph graph_from_json(const json& j) {
    BgpGraph g;
    for (const auto& n : j.at("nodes")) {
        std::string s = n.get<std::string>();
        g.nodes.push_back(s == "a" ? NodeLabel::AnswerVar
                                   : (s == "e" ? NodeLabel::Entity : NodeLabel::OtherVar));
    }
    for (const auto& e : j.at("edges")) g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return g;
}

}  // namespace

TrainingSet build_training_set(const std::vector<QaPair>& pairs, const AnnotationContext& ctx,
                               const BuildOptions& options) {
    TrainingSet ts;
    std::map<std::string, int> class_by_key;
    std::map<int, std::size_t> support;
    std::set<std::string> seen_questions;
    std::vector<std::pair<FeatureVector, int>> all_examples;

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& pair = pairs[i];
        std::string norm = to_lower(pair.question);
        if (!seen_questions.insert(norm).second) {
            ++ts.report.duplicates_dropped;
            continue;
        }
        try {
            auto parsed = parse_query(pair.sparql);
            auto tpl = canonicalize(to_bgp_graph(parsed), options.node_cap);
            auto it = class_by_key.find(tpl.canonical_key);
            int class_id;
            if (it == class_by_key.end()) {
                class_id = static_cast<int>(class_by_key.size());
                class_by_key.emplace(tpl.canonical_key, class_id);
                tpl.class_id = class_id;
                ts.class_catalog.emplace(class_id, tpl);
            } else {
                class_id = it->second;
            }
            auto features = extract_features(annotate(pair.question, ctx), ctx);
            all_examples.emplace_back(std::move(features), class_id);
            ++support[class_id];
            ++ts.report.accepted;
        } catch (const Error& e) {
            ts.report.unparsable.emplace_back(i, e.what());
        }
    }

    for (const auto& [class_id, count] : support) {
        if (count < options.min_support) {
            ts.pruned_classes.insert(class_id);
            ts.report.pruned[class_id] = count;
        } else {
            ts.class_support[class_id] = count;
        }
    }
    for (auto& ex : all_examples)
        if (!ts.pruned_classes.count(ex.second)) ts.examples.push_back(std::move(ex));
    return ts;
}

Algorithm algorithm_from_name(const std::string& name) {
    std::string n = to_lower(name);
    if (n == "nb" || n == "naive-bayes" || n == "bayes") return Algorithm::NaiveBayes;
    if (n == "mlp" || n == "perceptron") return Algorithm::Perceptron;
    throw Error("unknown algorithm '" + name + "' (expected nb or mlp)");
}

std::string algorithm_name(Algorithm a) {
    return a == Algorithm::NaiveBayes ? "nb" : "mlp";
}

std::vector<double> ClassifierModel::encode(const FeatureVector& v) const {
    std::vector<double> x;
    for (int f = 0; f < kNominalCount; ++f) {
        const auto& cats = nominal_categories_[f];
        std::string value = nominal_value(v, f);
        std::size_t hot = cats.size();  // unseen bucket
        for (std::size_t c = 0; c < cats.size(); ++c)
            if (cats[c] == value) hot = c;
        for (std::size_t c = 0; c <= cats.size(); ++c) x.push_back(c == hot ? 1.0 : 0.0);
    }
    for (int f = 0; f < kNumericCount; ++f)
        x.push_back((numeric_value(v, f) - numeric_mean_[f]) / numeric_stddev_[f]);
    return x;
}

std::vector<double> ClassifierModel::class_scores(const FeatureVector& v) const {
    const std::size_t n_classes = class_ids_.size();
    std::vector<double> scores(n_classes);

    if (algorithm_ == Algorithm::NaiveBayes) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double logp = log_prior_[c];
            for (int f = 0; f < kNominalCount; ++f) {
                const auto& cats = nominal_categories_[f];
                std::string value = nominal_value(v, f);
                std::size_t idx = cats.size();
                for (std::size_t k = 0; k < cats.size(); ++k)
                    if (cats[k] == value) idx = k;
                logp += nominal_loglik_[c][f][idx];
            }
            for (int f = 0; f < kNumericCount; ++f) {
                double mu = gauss_mean_[c][f], var = gauss_var_[c][f];
                double d = numeric_value(v, f) - mu;
                logp += -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
            }
            scores[c] = logp;
        }
        // softmax over log-posteriors so callers see comparable confidences
        double mx = *std::max_element(scores.begin(), scores.end());
        double sum = 0.0;
        for (auto& s : scores) {
            s = std::exp(s - mx);
            sum += s;
        }
        for (auto& s : scores) s /= sum;
        return scores;
    }

    std::vector<double> x = encode(v);
    std::vector<double> h(kHiddenUnits);
    for (int j = 0; j < kHiddenUnits; ++j) {
        double z = hidden_b_[j];
        for (std::size_t i = 0; i < x.size(); ++i) z += hidden_w_[j][i] * x[i];
        h[j] = std::tanh(z);
    }
    double mx = -1e300;
    for (std::size_t c = 0; c < n_classes; ++c) {
        double z = out_b_[c];
        for (int j = 0; j < kHiddenUnits; ++j) z += out_w_[c][j] * h[j];
        scores[c] = z;
        mx = std::max(mx, z);
    }
    double sum = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (auto& s : scores) s /= sum;
    return scores;
}

std::vector<std::pair<int, double>> ClassifierModel::predict_ranked(const FeatureVector& v) const {
    auto scores = class_scores(v);
    std::vector<std::pair<int, double>> out;
    out.reserve(class_ids_.size());
    for (std::size_t c = 0; c < class_ids_.size(); ++c) out.emplace_back(class_ids_[c], scores[c]);
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        auto sa = support_.at(a.first), sb = support_.at(b.first);
        if (sa != sb) return sa > sb;
        return a.first < b.first;
    });
    return out;
}

ClassifierModel train(const TrainingSet& ts, Algorithm algorithm, unsigned long seed) {
    std::map<int, std::size_t> support;
    for (const auto& [features, class_id] : ts.examples) ++support[class_id];
    if (support.size() < 2)
        throw TooFewClassesError("training requires at least 2 classes, found " +
                                 std::to_string(support.size()));

    ClassifierModel m;
    m.algorithm_ = algorithm;
    m.seed_ = seed;
    m.support_ = support;
    for (const auto& [class_id, count] : support) m.class_ids_.push_back(class_id);
    for (const auto& [class_id, tpl] : ts.class_catalog)
        if (support.count(class_id)) m.catalog_.emplace(class_id, tpl);

    std::map<int, std::size_t> class_slot;
    for (std::size_t c = 0; c < m.class_ids_.size(); ++c) class_slot[m.class_ids_[c]] = c;
    const std::size_t n_classes = m.class_ids_.size();
    const std::size_t n = ts.examples.size();

    // Shared encoder statistics.
    m.nominal_categories_.assign(kNominalCount, {});
    for (int f = 0; f < kNominalCount; ++f) {
        std::set<std::string> cats;
        for (const auto& [v, cid] : ts.examples) cats.insert(nominal_value(v, f));
        m.nominal_categories_[f].assign(cats.begin(), cats.end());
    }
    m.numeric_mean_.assign(kNumericCount, 0.0);
    m.numeric_stddev_.assign(kNumericCount, 1.0);
    for (int f = 0; f < kNumericCount; ++f) {
        double sum = 0.0, sq = 0.0;
        for (const auto& [v, cid] : ts.examples) {
            double x = numeric_value(v, f);
            sum += x;
            sq += x * x;
        }
        double mean = sum / static_cast<double>(n);
        double var = sq / static_cast<double>(n) - mean * mean;
        m.numeric_mean_[f] = mean;
        m.numeric_stddev_[f] = std::sqrt(std::max(var, 1e-6));
    }

    if (algorithm == Algorithm::NaiveBayes) {
        m.log_prior_.assign(n_classes, 0.0);
        m.nominal_loglik_.assign(n_classes, {});
        m.gauss_mean_.assign(n_classes, std::vector<double>(kNumericCount, 0.0));
        m.gauss_var_.assign(n_classes, std::vector<double>(kNumericCount, 1.0));
        for (std::size_t c = 0; c < n_classes; ++c) {
            int cid = m.class_ids_[c];
            double nc = static_cast<double>(support.at(cid));
            m.log_prior_[c] = std::log(nc / static_cast<double>(n));
            m.nominal_loglik_[c].resize(kNominalCount);
            for (int f = 0; f < kNominalCount; ++f) {
                const auto& cats = m.nominal_categories_[f];
                std::vector<double> counts(cats.size() + 1, 0.0);  // + unseen bucket
                for (const auto& [v, ecid] : ts.examples) {
                    if (ecid != cid) continue;
                    std::string value = nominal_value(v, f);
                    for (std::size_t k = 0; k < cats.size(); ++k)
                        if (cats[k] == value) ++counts[k];
                }
                double denom = nc + static_cast<double>(counts.size());  // Laplace
                auto& loglik = m.nominal_loglik_[c][f];
                loglik.resize(counts.size());
                for (std::size_t k = 0; k < counts.size(); ++k)
                    loglik[k] = std::log((counts[k] + 1.0) / denom);
            }
            for (int f = 0; f < kNumericCount; ++f) {
                double sum = 0.0, sq = 0.0;
                for (const auto& [v, ecid] : ts.examples) {
                    if (ecid != cid) continue;
                    double x = numeric_value(v, f);
                    sum += x;
                    sq += x * x;
                }
                double mean = sum / nc;
                double var = sq / nc - mean * mean;
                m.gauss_mean_[c][f] = mean;
                m.gauss_var_[c][f] = std::max(var, kVarianceFloor);
            }
        }
        return m;
    }

    // Single-hidden-layer perceptron, SGD with softmax cross-entropy.
    std::mt19937_64 rng(seed);
    const std::size_t dim = m.encode(ts.examples.front().first).size();
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    m.hidden_w_.assign(kHiddenUnits, std::vector<double>(dim));
    m.hidden_b_.assign(kHiddenUnits, 0.0);
    m.out_w_.assign(n_classes, std::vector<double>(kHiddenUnits));
    m.out_b_.assign(n_classes, 0.0);
    for (auto& row : m.hidden_w_)
        for (auto& w : row) w = init(rng) / std::sqrt(static_cast<double>(dim));
    for (auto& row : m.out_w_)
        for (auto& w : row) w = init(rng) / std::sqrt(static_cast<double>(kHiddenUnits));

    std::vector<std::vector<double>> encoded;
    encoded.reserve(n);
    std::vector<std::size_t> targets;
    for (const auto& [v, cid] : ts.examples) {
        encoded.push_back(m.encode(v));
        targets.push_back(class_slot.at(cid));
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int epoch = 0; epoch < kEpochs; ++epoch) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) {
            const auto& x = encoded[i];
            std::vector<double> h(kHiddenUnits), z(n_classes);
            for (int j = 0; j < kHiddenUnits; ++j) {
                double s = m.hidden_b_[j];
                for (std::size_t d = 0; d < dim; ++d) s += m.hidden_w_[j][d] * x[d];
                h[j] = std::tanh(s);
            }
            double mx = -1e300;
            for (std::size_t c = 0; c < n_classes; ++c) {
                double s = m.out_b_[c];
                for (int j = 0; j < kHiddenUnits; ++j) s += m.out_w_[c][j] * h[j];
                z[c] = s;
                mx = std::max(mx, s);
            }
            double sum = 0.0;
            for (auto& s : z) {
                s = std::exp(s - mx);
                sum += s;
            }
            for (auto& s : z) s /= sum;

            std::vector<double> dh(kHiddenUnits, 0.0);
            for (std::size_t c = 0; c < n_classes; ++c) {
                double grad = z[c] - (targets[i] == c ? 1.0 : 0.0);
                for (int j = 0; j < kHiddenUnits; ++j) {
                    dh[j] += grad * m.out_w_[c][j];
                    m.out_w_[c][j] -= kLearningRate * grad * h[j];
                }
                m.out_b_[c] -= kLearningRate * grad;
            }
            for (int j = 0; j < kHiddenUnits; ++j) {
                double grad = dh[j] * (1.0 - h[j] * h[j]);
                for (std::size_t d = 0; d < dim; ++d)
                    m.hidden_w_[j][d] -= kLearningRate * grad * x[d];
                m.hidden_b_[j] -= kLearningRate * grad;
            }
        }
    }
    return m;
}

std::string ClassifierModel::serialize() const {
    json j;
    j["format"] = "kgqa-model/1";
    j["algorithm"] = algorithm_name(algorithm_);
    j["seed"] = seed_;
    json classes = json::array();
    for (int cid : class_ids_) {
        const auto& tpl = catalog_.at(cid);
        classes.push_back({{"id", cid},
                           {"key", tpl.canonical_key},
                           {"support", support_.at(cid)},
                           {"graph", graph_to_json(tpl.graph)}});
    }
    j["classes"] = classes;
    j["encoder"] = {{"nominal_categories", nominal_categories_},
                    {"numeric_mean", numeric_mean_},
                    {"numeric_stddev", numeric_stddev_}};
    if (algorithm_ == Algorithm::NaiveBayes) {
        j["nb"] = {{"log_prior", log_prior_},
                   {"nominal_loglik", nominal_loglik_},
                   {"gauss_mean", gauss_mean_},
                   {"gauss_var", gauss_var_}};
    } else {
        j["mlp"] = {{"hidden_w", hidden_w_},
                    {"hidden_b", hidden_b_},
                    {"out_w", out_w_},
                    {"out_b", out_b_}};
    }
    return j.dump(2);
}

ClassifierModel ClassifierModel::deserialize(const std::string& text) {
    json j = json::parse(text);
    if (j.at("format").get<std::string>() != "kgqa-model/1")
        throw Error("unknown model format: " + j.at("format").get<std::string>());
    ClassifierModel m;
    m.algorithm_ = algorithm_from_name(j.at("algorithm").get<std::string>());
    m.seed_ = j.at("seed").get<unsigned long>();
    for (const auto& c : j.at("classes")) {
        int cid = c.at("id").get<int>();
        QueryTemplate tpl;
        tpl.canonical_key = c.at("key").get<std::string>();
        tpl.graph = graph_from_json(c.at("graph"));
        tpl.class_id = cid;
        m.class_ids_.push_back(cid);
        m.catalog_.emplace(cid, std::move(tpl));
        m.support_[cid] = c.at("support").get<std::size_t>();
    }
    const auto& enc = j.at("encoder");
    m.nominal_categories_ = enc.at("nominal_categories").get<std::vector<std::vector<std::string>>>();
    m.numeric_mean_ = enc.at("numeric_mean").get<std::vector<double>>();
    m.numeric_stddev_ = enc.at("numeric_stddev").get<std::vector<double>>();
    if (m.algorithm_ == Algorithm::NaiveBayes) {
        const auto& nb = j.at("nb");
        m.log_prior_ = nb.at("log_prior").get<std::vector<double>>();
        m.nominal_loglik_ =
            nb.at("nominal_loglik").get<std::vector<std::vector<std::vector<double>>>>();
        m.gauss_mean_ = nb.at("gauss_mean").get<std::vector<std::vector<double>>>();
        m.gauss_var_ = nb.at("gauss_var").get<std::vector<std::vector<double>>>();
    } else {
        const auto& mlp = j.at("mlp");
        m.hidden_w_ = mlp.at("hidden_w").get<std::vector<std::vector<double>>>();
        m.hidden_b_ = mlp.at("hidden_b").get<std::vector<double>>();
        m.out_w_ = mlp.at("out_w").get<std::vector<std::vector<double>>>();
        m.out_b_ = mlp.at("out_b").get<std::vector<double>>();
    }
    return m;
}

void ClassifierModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << serialize();
}

ClassifierModel ClassifierModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

double cross_validate(const TrainingSet& ts, int folds, Algorithm algorithm, unsigned long seed) {
    if (folds < 2) throw Error("cross-validation requires at least 2 folds");

    // Stratified assignment: shuffle within each class, deal round-robin.
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ts.examples.size(); ++i)
        by_class[ts.examples[i].second].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<int> fold_of(ts.examples.size(), 0);
    for (auto& [cid, indices] : by_class) {
        std::shuffle(indices.begin(), indices.end(), rng);
        for (std::size_t k = 0; k < indices.size(); ++k)
            fold_of[indices[k]] = static_cast<int>(k) % folds;
    }

    double fold_sum = 0.0;
    int folds_used = 0;
    for (int fold = 0; fold < folds; ++fold) {
        TrainingSet sub;
        sub.class_catalog = ts.class_catalog;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < ts.examples.size(); ++i) {
            if (fold_of[i] == fold) test_idx.push_back(i);
            else sub.examples.push_back(ts.examples[i]);
        }
        if (test_idx.empty()) continue;
        for (const auto& [v, cid] : sub.examples) ++sub.class_support[cid];

        auto model = train(sub, algorithm, seed);

        std::map<int, int> gold_count, pred_count, true_pos;
        for (std::size_t i : test_idx) {
            const auto& [features, gold] = ts.examples[i];
            int predicted = model.predict_ranked(features).front().first;
            ++gold_count[gold];
            ++pred_count[predicted];
            if (predicted == gold) ++true_pos[gold];
        }
        double weighted = 0.0, weight_sum = 0.0;
        for (const auto& [cid, gc] : gold_count) {
            double tp = true_pos.count(cid) ? true_pos[cid] : 0;
            double pc = pred_count.count(cid) ? pred_count[cid] : 0;
            double precision = pc > 0 ? tp / pc : 0.0;
            double recall = tp / gc;
            double f1 = (precision + recall) > 0 ? 2 * precision * recall / (precision + recall)
                                                 : 0.0;
            weighted += f1 * gc;
            weight_sum += gc;
        }
        fold_sum += weight_sum > 0 ? weighted / weight_sum : 0.0;
        ++folds_used;
    }
    return folds_used > 0 ? fold_sum / folds_used : 0.0;
}

}  // namespace kgqa
