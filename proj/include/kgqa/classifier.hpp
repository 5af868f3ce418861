#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgqa/annotation.hpp"
#include "kgqa/bgp.hpp"

namespace kgqa {

struct QaPair {
    std::string question;
    std::string sparql;
};

struct BuildReport {
    std::size_t accepted = 0;
    std::size_t duplicates_dropped = 0;
    std::vector<std::pair<std::size_t, std::string>> unparsable;  // (input index, reason)
    std::map<int, std::size_t> pruned;                            // class_id -> support
};

struct TrainingSet {
    std::vector<std::pair<FeatureVector, int>> examples;  // retained classes only
    std::map<int, QueryTemplate> class_catalog;           // all discovered classes
    std::map<int, std::size_t> class_support;             // retained support counts
    std::set<int> pruned_classes;
    BuildReport report;
};

struct BuildOptions {
    std::size_t min_support = 5;
    int node_cap = kDefaultNodeCap;
};

// Canonicalize every gold query, group by canonical key, drop duplicate
// questions and unparsable entries, prune classes below min_support.
TrainingSet build_training_set(const std::vector<QaPair>& pairs, const AnnotationContext& ctx,
                               const BuildOptions& options = {});

enum class Algorithm { NaiveBayes, Perceptron };

Algorithm algorithm_from_name(const std::string& name);  // "nb" | "mlp"
std::string algorithm_name(Algorithm a);

// A trained model over the retained classes. Immutable after training;
// safe for concurrent prediction.
class ClassifierModel {
  public:
    // Ranked prediction: every retained class exactly once, scores
    // non-increasing, ties broken by class support then class id.
    std::vector<std::pair<int, double>> predict_ranked(const FeatureVector& v) const;

    const std::map<int, QueryTemplate>& class_catalog() const { return catalog_; }
    const std::map<int, std::size_t>& class_support() const { return support_; }
    Algorithm algorithm() const { return algorithm_; }

    std::string serialize() const;  // versioned JSON text
    void save(const std::string& path) const;
    static ClassifierModel deserialize(const std::string& text);
    static ClassifierModel load(const std::string& path);

  private:
    friend ClassifierModel train(const TrainingSet&, Algorithm, unsigned long);

    Algorithm algorithm_ = Algorithm::NaiveBayes;
    unsigned long seed_ = 0;
    std::vector<int> class_ids_;
    std::map<int, QueryTemplate> catalog_;
    std::map<int, std::size_t> support_;

    // Shared feature encoding.
    std::vector<std::vector<std::string>> nominal_categories_;  // per nominal feature
    std::vector<double> numeric_mean_, numeric_stddev_;

    // Naive Bayes parameters: per class, per nominal feature, per category
    // (last slot = unseen bucket); Gaussian stats per numeric feature.
    std::vector<double> log_prior_;
    std::vector<std::vector<std::vector<double>>> nominal_loglik_;
    std::vector<std::vector<double>> gauss_mean_, gauss_var_;

    // Perceptron parameters.
    std::vector<std::vector<double>> hidden_w_;  // [hidden][input]
    std::vector<double> hidden_b_;
    std::vector<std::vector<double>> out_w_;  // [class][hidden]
    std::vector<double> out_b_;

    std::vector<double> encode(const FeatureVector& v) const;  // one-hot + standardized
    std::vector<double> class_scores(const FeatureVector& v) const;
};

// Deterministic given (data, algorithm, seed). Throws TooFewClassesError
// when fewer than two classes remain.
ClassifierModel train(const TrainingSet& ts, Algorithm algorithm = Algorithm::NaiveBayes,
                      unsigned long seed = 42);

// Stratified k-fold cross-validation; returns the macro-weighted F-measure
// averaged over folds (per fold: per-class F1 weighted by class size).
double cross_validate(const TrainingSet& ts, int folds = 10,
                      Algorithm algorithm = Algorithm::NaiveBayes, unsigned long seed = 42);

}  // namespace kgqa
