#include "kgqa/kb_index.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kgqa/errors.hpp"
#include "kgqa/text_util.hpp"

namespace kgqa {

using nlohmann::json;

namespace {

const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
const char* kRdfsDomain = "http://www.w3.org/2000/01/rdf-schema#domain";
const char* kRdfsRange = "http://www.w3.org/2000/01/rdf-schema#range";

bool in_builtin_namespace(const std::string& iri) {
    return iri.starts_with("http://www.w3.org/1999/02/22-rdf-syntax-ns#") ||
           iri.starts_with("http://www.w3.org/2000/01/rdf-schema#") ||
           iri.starts_with("http://www.w3.org/2002/07/owl#") ||
           iri.starts_with("http://www.w3.org/2001/XMLSchema#");
}

std::vector<std::string> label_tokens(const std::string& label) {
    return split_ws(to_lower(label));
}

// Expansion strings for one label under the lexicon: the label with the
// matched token replaced, plus the bare replacement. Both directions of
// each pair apply.
void add_expansions(const std::string& label,
                    const SynonymLexicon& lexicon,
                    std::vector<std::string>& out) {
    auto tokens = label_tokens(label);
    auto apply = [&](const std::string& from, const std::string& to) {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i] != from) continue;
            std::vector<std::string> replaced = tokens;
            replaced[i] = to;
            out.push_back(join(replaced, " "));
            if (replaced.size() > 1) out.push_back(to);
        }
    };
    for (const auto& [canonical, synonym] : lexicon) {
        apply(to_lower(canonical), to_lower(synonym));
        apply(to_lower(synonym), to_lower(canonical));
    }
}

// Highest similarity between the n-gram and any contiguous token window of
// the label. A label may carry more tokens than the n-gram; the window
// keeps an exact token match at ratio 1 while still penalizing garbled
// candidates.
double window_similarity(const std::string& ngram_lower,
                         const std::vector<std::string>& tokens) {
    double best = 0.0;
    for (std::size_t start = 0; start < tokens.size(); ++start) {
        std::string window;
        for (std::size_t end = start; end < tokens.size(); ++end) {
            if (end > start) window += ' ';
            window += tokens[end];
            best = std::max(best, similarity_ratio(ngram_lower, window));
        }
    }
    return best;
}

struct SearchableText {
    const std::string* text;
    std::vector<std::string> tokens;
};

}  // namespace

SynonymLexicon load_synonym_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open synonym lexicon: " + path);
    SynonymLexicon out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

IndexBundle IndexBundle::build(const TripleStore& store,
                               const std::set<std::string>& label_predicates,
                               const SynonymLexicon& lexicon, IndexBuildReport* report) {
    std::set<std::string> label_preds = label_predicates;
    if (label_preds.empty()) label_preds.insert(kRdfsLabel);

    std::set<std::string> predicate_iris, class_iris;
    std::map<std::string, std::vector<std::string>> labels_of;
    std::map<std::string, std::set<std::string>> types_of;
    std::map<std::string, std::string> domain_of, range_of;
    std::set<std::string> mentioned;  // IRIs in subject or object position

    IndexBundle b;
    for (const auto& t : store.triples()) {
        if (report) ++report->triples_seen;
        const std::string& p = t.predicate.value;
        predicate_iris.insert(p);

        mentioned.insert(t.subject.value);
        if (t.object.is_iri()) mentioned.insert(t.object.value);

        b.connectivity_[t.subject.value].insert(p);
        if (t.object.is_iri()) {
            b.connectivity_[t.object.value].insert(p);
            b.adjacency_[t.subject.value][p].insert(t.object.value);
            b.adjacency_[t.object.value][p].insert(t.subject.value);
        }

        if (p == kRdfType && t.object.is_iri()) class_iris.insert(t.object.value);
        if (p == kRdfType && t.object.is_iri()) types_of[t.subject.value].insert(t.object.value);
        if (p == kRdfsDomain && t.object.is_iri()) domain_of[t.subject.value] = t.object.value;
        if (p == kRdfsRange && t.object.is_iri()) range_of[t.subject.value] = t.object.value;
        if (label_preds.count(p) && t.object.is_literal())
            labels_of[t.subject.value].push_back(t.object.value);
    }

    auto labels_for = [&](const std::string& iri) {
        auto it = labels_of.find(iri);
        if (it != labels_of.end() && !it->second.empty()) return it->second;
        return std::vector<std::string>{de_camel(iri_local_name(iri))};
    };

    for (const auto& iri : mentioned) {
        if (predicate_iris.count(iri) || class_iris.count(iri) || in_builtin_namespace(iri))
            continue;
        EntityRecord rec;
        rec.iri = iri;
        rec.labels = labels_for(iri);
        rec.connected_relations = b.connectivity_[iri];
        if (auto it = types_of.find(iri); it != types_of.end()) rec.connected_types = it->second;
        b.entity_pos_[iri] = b.entities_.size();
        b.entities_.push_back(std::move(rec));
    }

    for (const auto& iri : predicate_iris) {
        RelationRecord rec;
        rec.iri = iri;
        rec.labels = labels_for(iri);
        for (const auto& l : rec.labels) add_expansions(l, lexicon, rec.expansions);
        if (domain_of.count(iri)) rec.domain = domain_of[iri];
        if (range_of.count(iri)) rec.range = range_of[iri];
        b.relation_pos_[iri] = b.relations_.size();
        b.relations_.push_back(std::move(rec));
    }

    for (const auto& iri : class_iris) {
        ClassRecord rec;
        rec.iri = iri;
        rec.labels = labels_for(iri);
        for (const auto& l : rec.labels) add_expansions(l, lexicon, rec.expansions);
        b.class_pos_[iri] = b.classes_.size();
        b.classes_.push_back(std::move(rec));
    }

    b.rebuild_search_structures();
    return b;
}

void IndexBundle::rebuild_search_structures() {
    entity_tokens_.clear();
    relation_tokens_.clear();
    class_tokens_.clear();
    auto index_tokens = [](std::map<std::string, std::vector<std::size_t>>& postings,
                           const std::vector<std::string>& texts, std::size_t pos) {
        for (const auto& text : texts)
            for (const auto& tok : label_tokens(text)) {
                auto& list = postings[tok];
                if (list.empty() || list.back() != pos) list.push_back(pos);
            }
    };
    for (std::size_t i = 0; i < entities_.size(); ++i)
        index_tokens(entity_tokens_, entities_[i].labels, i);
    for (std::size_t i = 0; i < relations_.size(); ++i) {
        index_tokens(relation_tokens_, relations_[i].labels, i);
        index_tokens(relation_tokens_, relations_[i].expansions, i);
    }
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        index_tokens(class_tokens_, classes_[i].labels, i);
        index_tokens(class_tokens_, classes_[i].expansions, i);
    }
}

namespace {

template <typename Record>
std::vector<LinkCandidate> search_impl(
    const std::map<std::string, std::vector<std::size_t>>& postings,
    const std::vector<Record>& records, const NGram& ngram, double threshold,
    bool with_expansions) {
    std::vector<LinkCandidate> out;
    auto query_tokens = label_tokens(ngram.surface);
    if (query_tokens.empty()) return out;

    // Intersect posting lists: a candidate label must contain every token.
    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < query_tokens.size(); ++t) {
        auto it = postings.find(query_tokens[t]);
        if (it == postings.end()) return out;
        if (t == 0) {
            candidates = it->second;
        } else {
            std::vector<std::size_t> merged;
            std::set_intersection(candidates.begin(), candidates.end(), it->second.begin(),
                                  it->second.end(), std::back_inserter(merged));
            candidates = std::move(merged);
        }
        if (candidates.empty()) return out;
    }

    std::string ngram_lower = to_lower(ngram.surface);
    for (std::size_t pos : candidates) {
        const Record& rec = records[pos];
        double best = -1.0;
        const std::string* best_text = nullptr;
        auto consider = [&](const std::string& text) {
            auto tokens = label_tokens(text);
            for (const auto& qt : query_tokens)
                if (std::find(tokens.begin(), tokens.end(), qt) == tokens.end()) return;
            double sim = window_similarity(ngram_lower, tokens);
            if (sim > best) {
                best = sim;
                best_text = &text;
            }
        };
        for (const auto& l : rec.labels) consider(l);
        if constexpr (requires { rec.expansions; }) {
            if (with_expansions)
                for (const auto& e : rec.expansions) consider(e);
        }
        if (best_text && best >= threshold)
            out.push_back({rec.iri, *best_text, ngram, best});
    }
    std::sort(out.begin(), out.end(), [](const LinkCandidate& a, const LinkCandidate& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.iri < b.iri;
    });
    return out;
}

}  // namespace

std::vector<LinkCandidate> IndexBundle::search_entities(const NGram& ngram,
                                                        double threshold) const {
    return search_impl(entity_tokens_, entities_, ngram, threshold, false);
}

std::vector<LinkCandidate> IndexBundle::search_relations(const NGram& ngram,
                                                         double threshold) const {
    return search_impl(relation_tokens_, relations_, ngram, threshold, true);
}

std::vector<LinkCandidate> IndexBundle::search_classes(const NGram& ngram,
                                                       double threshold) const {
    return search_impl(class_tokens_, classes_, ngram, threshold, true);
}

std::set<std::string> IndexBundle::connected_objects(const std::string& entity,
                                                     const std::string& predicate) const {
    if (!entity_pos_.count(entity) && !class_pos_.count(entity))
        throw UnknownEntityError(entity);
    auto it = adjacency_.find(entity);
    if (it == adjacency_.end()) return {};
    auto pit = it->second.find(predicate);
    if (pit == it->second.end()) return {};
    return pit->second;
}

const std::set<std::string>* IndexBundle::connected_relations(const std::string& iri) const {
    auto it = connectivity_.find(iri);
    return it == connectivity_.end() ? nullptr : &it->second;
}

const RelationRecord* IndexBundle::relation(const std::string& iri) const {
    auto it = relation_pos_.find(iri);
    return it == relation_pos_.end() ? nullptr : &relations_[it->second];
}

void IndexBundle::save(const std::string& directory) const {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    auto write = [&](const std::string& name, const json& j) {
        std::ofstream out(fs::path(directory) / name);
        if (!out) throw Error("cannot write index file: " + name);
        out << j.dump(2);
    };

    json entities = json::array();
    for (const auto& e : entities_)
        entities.push_back({{"iri", e.iri},
                            {"labels", e.labels},
                            {"relations", e.connected_relations},
                            {"types", e.connected_types}});
    json relations = json::array();
    for (const auto& r : relations_)
        relations.push_back({{"iri", r.iri},
                             {"labels", r.labels},
                             {"expansions", r.expansions},
                             {"domain", r.domain},
                             {"range", r.range}});
    json classes = json::array();
    for (const auto& c : classes_)
        classes.push_back({{"iri", c.iri}, {"labels", c.labels}, {"expansions", c.expansions}});
    json adjacency = json::object();
    for (const auto& [iri, by_pred] : adjacency_) {
        json preds = json::object();
        for (const auto& [p, neigh] : by_pred) preds[p] = neigh;
        adjacency[iri] = preds;
    }
    json connectivity = json::object();
    for (const auto& [iri, rels] : connectivity_) connectivity[iri] = rels;

    write("entities.json", entities);
    write("relations.json", relations);
    write("classes.json", classes);
    write("adjacency.json", adjacency);
    write("connectivity.json", connectivity);
    write("manifest.json", json{{"format", "kgqa-index/1"},
                                {"entities", entities_.size()},
                                {"relations", relations_.size()},
                                {"classes", classes_.size()},
                                {"files",
                                 {"entities.json", "relations.json", "classes.json",
                                  "adjacency.json", "connectivity.json"}}});
}

IndexBundle IndexBundle::load(const std::string& directory) {
    namespace fs = std::filesystem;
    auto read = [&](const std::string& name) {
        std::ifstream in(fs::path(directory) / name);
        if (!in) throw Error("cannot open index file: " + (fs::path(directory) / name).string());
        return json::parse(in);
    };
    json manifest = read("manifest.json");
    if (manifest.at("format").get<std::string>() != "kgqa-index/1")
        throw Error("unknown index format");

    IndexBundle b;
    for (const auto& e : read("entities.json")) {
        EntityRecord rec;
        rec.iri = e.at("iri").get<std::string>();
        rec.labels = e.at("labels").get<std::vector<std::string>>();
        rec.connected_relations = e.at("relations").get<std::set<std::string>>();
        rec.connected_types = e.at("types").get<std::set<std::string>>();
        b.entity_pos_[rec.iri] = b.entities_.size();
        b.entities_.push_back(std::move(rec));
    }
    for (const auto& r : read("relations.json")) {
        RelationRecord rec;
        rec.iri = r.at("iri").get<std::string>();
        rec.labels = r.at("labels").get<std::vector<std::string>>();
        rec.expansions = r.at("expansions").get<std::vector<std::string>>();
        rec.domain = r.at("domain").get<std::string>();
        rec.range = r.at("range").get<std::string>();
        b.relation_pos_[rec.iri] = b.relations_.size();
        b.relations_.push_back(std::move(rec));
    }
    for (const auto& c : read("classes.json")) {
        ClassRecord rec;
        rec.iri = c.at("iri").get<std::string>();
        rec.labels = c.at("labels").get<std::vector<std::string>>();
        rec.expansions = c.at("expansions").get<std::vector<std::string>>();
        b.class_pos_[rec.iri] = b.classes_.size();
        b.classes_.push_back(std::move(rec));
    }
    json adjacency = read("adjacency.json");
    for (const auto& [iri, preds] : adjacency.items())
        for (const auto& [p, neigh] : preds.items())
            b.adjacency_[iri][p] = neigh.get<std::set<std::string>>();
    json connectivity = read("connectivity.json");
    for (const auto& [iri, rels] : connectivity.items())
        b.connectivity_[iri] = rels.get<std::set<std::string>>();

    b.rebuild_search_structures();
    return b;
}

}  // namespace kgqa
