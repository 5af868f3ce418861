#include "kgqa/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "kgqa/text_util.hpp"

namespace kgqa {

namespace {

bool is_punct_char(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) && c != '-' && c != '\'';
}

std::string strip_punct(const std::string& tok) {
    std::size_t b = 0, e = tok.size();
    while (b < e && is_punct_char(tok[b])) ++b;
    while (e > b && is_punct_char(tok[e - 1])) --e;
    return tok.substr(b, e - b);
}

bool capitalized(const std::string& w) {
    return !w.empty() && std::isupper(static_cast<unsigned char>(w[0]));
}

bool all_digits(const std::string& w) {
    if (w.empty()) return false;
    for (char c : w)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != ',') return false;
    return true;
}

std::map<std::string, std::string> load_tsv_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        out[to_lower(line.substr(0, tab))] = line.substr(tab + 1);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& question_words() {
    static const std::vector<std::string> kWords = {
        "Who",  "What", "Where", "When", "Which", "How",  "Give", "List", "Is",  "Are",
        "Did",  "Does", "Do",    "Was",  "Were",  "Has",  "Have", "Show", "Name"};
    return kWords;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& raw : split_ws(text)) {
        std::string tok = strip_punct(raw);
        if (!tok.empty()) out.push_back(tok);
    }
    if (out.empty()) throw EmptyQuestionError();
    return out;
}

LexiconAnnotator::LexiconAnnotator(std::map<std::string, std::string> pos_lexicon,
                                   std::set<std::string> first_names)
    : pos_lexicon_(std::move(pos_lexicon)), first_names_(std::move(first_names)) {}

LexiconAnnotator LexiconAnnotator::from_files(const std::string& pos_lexicon_tsv,
                                              const std::string& first_names_file) {
    std::set<std::string> names;
    std::ifstream in(first_names_file);
    if (!in) throw Error("cannot open first-name file: " + first_names_file);
    std::string line;
    while (std::getline(in, line)) {
        auto toks = split_ws(line);
        if (!toks.empty() && toks[0][0] != '#') names.insert(to_lower(toks[0]));
    }
    return LexiconAnnotator(load_tsv_map(pos_lexicon_tsv), std::move(names));
}

std::vector<std::string> LexiconAnnotator::pos(const std::vector<std::string>& tokens) const {
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& w = tokens[i];
        // Mid-sentence capitalization marks proper nouns, including title
        // words like "The" in "The Two Towers".
        if (i > 0 && capitalized(w)) {
            tags.push_back("NNP");
            continue;
        }
        auto it = pos_lexicon_.find(to_lower(w));
        if (it != pos_lexicon_.end()) {
            tags.push_back(it->second);
            continue;
        }
        if (all_digits(w)) {
            tags.push_back("CD");
            continue;
        }
        if (i == 0 && capitalized(w)) {
            tags.push_back("NNP");
            continue;
        }
        std::string lw = to_lower(w);
        if (lw.size() > 4 && lw.ends_with("est")) tags.push_back("JJS");
        else if (lw.size() > 3 && lw.ends_with("s")) tags.push_back("NNS");
        else tags.push_back("NN");
    }
    return tags;
}

std::vector<std::string> LexiconAnnotator::ner(const std::vector<std::string>& tokens) const {
    std::vector<std::string> tags(tokens.size(), "NONE");
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (capitalized(tokens[i]) && first_names_.count(to_lower(tokens[i]))) {
            std::size_t j = i;
            while (j < tokens.size() && capitalized(tokens[j])) {
                tags[j] = "PERSON";
                ++j;
            }
            i = j;
        } else {
            ++i;
        }
    }
    return tags;
}

AnnotationContext AnnotationContext::from_files(const std::string& pos_lexicon_tsv,
                                                const std::string& first_names_file,
                                                const std::string& stopwords_file,
                                                const std::string& topics_tsv) {
    AnnotationContext ctx;
    ctx.annotator = std::make_shared<LexiconAnnotator>(
        LexiconAnnotator::from_files(pos_lexicon_tsv, first_names_file));

    std::ifstream stop(stopwords_file);
    if (!stop) throw Error("cannot open stopword file: " + stopwords_file);
    std::string line;
    while (std::getline(stop, line)) {
        auto toks = split_ws(line);
        if (!toks.empty() && toks[0][0] != '#') ctx.stopwords.insert(to_lower(toks[0]));
    }

    std::ifstream topics(topics_tsv);
    if (!topics) throw Error("cannot open topic lexicon: " + topics_tsv);
    while (std::getline(topics, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        ctx.topics.emplace_back(to_lower(line.substr(0, tab)), line.substr(tab + 1));
    }
    return ctx;
}

std::vector<NGram> relevant_ngrams(const std::vector<AnnotatedToken>& tokens,
                                   const std::set<std::string>& stopwords) {
    std::vector<NGram> out;
    for (std::size_t start = 0; start < tokens.size(); ++start) {
        const std::string& tag = tokens[start].pos;
        bool good_start = tag.starts_with("JJ") || tag.starts_with("NN") || tag.starts_with("VB");
        if (!good_start) continue;
        std::string surface;
        bool all_stop = true;
        for (std::size_t len = 1; len <= 6 && start + len <= tokens.size(); ++len) {
            if (len > 1) surface += ' ';
            surface += tokens[start + len - 1].surface;
            if (!stopwords.count(to_lower(tokens[start + len - 1].surface))) all_stop = false;
            if (all_stop) continue;
            out.push_back({start, len, surface});
        }
    }
    return out;
}

AnnotatedQuestion annotate(const std::string& text, const AnnotationContext& ctx) {
    AnnotatedQuestion q;
    q.text = text;
    auto words = tokenize(text);
    auto pos_tags = ctx.annotator->pos(words);
    auto ner_tags = ctx.annotator->ner(words);
    for (std::size_t i = 0; i < words.size(); ++i)
        q.tokens.push_back({words[i], pos_tags[i], ner_tags[i]});
    q.ngrams = relevant_ngrams(q.tokens, ctx.stopwords);
    return q;
}

namespace {

// Noun groups: maximal runs of common nouns, with directly attached
// attributive JJ modifiers absorbed into the group ("doctoral advisor"
// counts once and its JJ is not a standalone adjective). Proper-noun runs
// are entity mentions, covered by EntityPerson rather than Noun.
struct NounGroupScan {
    int groups = 0;
    std::vector<bool> absorbed_adjective;

    explicit NounGroupScan(const std::vector<AnnotatedToken>& toks)
        : absorbed_adjective(toks.size(), false) {
        std::size_t i = 0;
        while (i < toks.size()) {
            std::size_t adj_start = i;
            while (i < toks.size() && toks[i].pos == "JJ") ++i;
            if (i < toks.size() && (toks[i].pos == "NN" || toks[i].pos == "NNS")) {
                for (std::size_t k = adj_start; k < i; ++k) absorbed_adjective[k] = true;
                while (i < toks.size() && (toks[i].pos == "NN" || toks[i].pos == "NNS")) ++i;
                ++groups;
            } else {
                i = adj_start + 1;
            }
        }
    }
};

}  // namespace

FeatureVector extract_features(const AnnotatedQuestion& q, const AnnotationContext& ctx) {
    FeatureVector f;
    f.number_of_token = static_cast<int>(q.tokens.size());

    f.question_word = "None";
    for (const auto& t : q.tokens) {
        for (const auto& w : question_words()) {
            if (to_lower(t.surface) == to_lower(w)) {
                f.question_word = w;
                break;
            }
        }
        if (f.question_word != "None") break;
    }

    for (const auto& t : q.tokens)
        if (t.ner == "PERSON") f.entity_person = true;

    f.query_resource_type = "None";
    for (const auto& [keyword, cls] : ctx.topics) {
        for (const auto& t : q.tokens) {
            if (to_lower(t.surface) == keyword) {
                f.query_resource_type = cls;
                break;
            }
        }
        if (f.query_resource_type != "None") break;
    }

    NounGroupScan scan(q.tokens);
    f.noun = scan.groups;

    int comparatives = 0;
    for (std::size_t i = 0; i < q.tokens.size(); ++i) {
        const std::string& tag = q.tokens[i].pos;
        if (tag == "CD") ++f.number;
        if (tag.starts_with("VB")) ++f.verb;
        if ((tag == "JJ" && !scan.absorbed_adjective[i]) || tag == "JJR" || tag == "JJS")
            ++f.adjective;
        if (tag == "JJR" || tag == "RBR") ++comparatives;
    }
    f.comparative = comparatives > 0;
    f.triple_candidates = std::clamp(f.verb + comparatives, 1, 3);
    return f;
}

std::string FeatureVector::to_string() const {
    return "<" + question_word + "," + (entity_person ? "Person" : "NoPerson") + "," +
           std::to_string(number_of_token) + "," + query_resource_type + "," +
           std::to_string(noun) + "," + std::to_string(number) + "," + std::to_string(verb) + "," +
           std::to_string(adjective) + "," + (comparative ? "Comparative" : "NoComparative") +
           "," + std::to_string(triple_candidates) + ">";
}

}  // namespace kgqa
