#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kgqa/errors.hpp"

namespace kgqa {

struct AnnotatedToken {
    std::string surface;
    std::string pos;  // Penn-style tag
    std::string ner;  // "PERSON" or "NONE"
};

// Contiguous span of tokens, 1..6 long.
struct NGram {
    std::size_t start = 0;
    std::size_t length = 0;
    std::string surface;  // original tokens joined by single spaces

    bool overlaps(const NGram& other) const {
        return start < other.start + other.length && other.start < start + length;
    }
    bool operator==(const NGram&) const = default;
};

struct AnnotatedQuestion {
    std::string text;
    std::vector<AnnotatedToken> tokens;
    std::vector<NGram> ngrams;  // the relevant n-grams
};

// The ten classification features of a question.
struct FeatureVector {
    std::string question_word;       // "Who", "What", ... or "None"
    bool entity_person = false;      // printed as Person / NoPerson
    int number_of_token = 0;
    std::string query_resource_type; // topic lexicon class or "None"
    int noun = 0;
    int number = 0;
    int verb = 0;
    int adjective = 0;
    bool comparative = false;        // printed as Comparative / NoComparative
    int triple_candidates = 0;

    std::string to_string() const;  // "<Who,Person,8,dbo:Person,1,0,1,0,NoComperative,1>" style
    bool operator==(const FeatureVector&) const = default;
};

// Pluggable linguistic annotator. Output vectors are length-aligned with
// the input tokens. Implementations must be safe for concurrent read-only
// use after construction.
class Annotator {
  public:
    virtual ~Annotator() = default;
    virtual std::vector<std::string> pos(const std::vector<std::string>& tokens) const = 0;
    virtual std::vector<std::string> ner(const std::vector<std::string>& tokens) const = 0;
};

// Default annotator: a word -> most-frequent-tag lexicon with suffix and
// capitalization heuristics, plus a first-name gazetteer for PERSON spans.
class LexiconAnnotator : public Annotator {
  public:
    LexiconAnnotator(std::map<std::string, std::string> pos_lexicon,
                     std::set<std::string> first_names);

    static LexiconAnnotator from_files(const std::string& pos_lexicon_tsv,
                                       const std::string& first_names_file);

    std::vector<std::string> pos(const std::vector<std::string>& tokens) const override;
    std::vector<std::string> ner(const std::vector<std::string>& tokens) const override;

  private:
    std::map<std::string, std::string> pos_lexicon_;  // lowercased word -> tag
    std::set<std::string> first_names_;               // lowercased
};

// Everything extract_features needs besides the question itself.
struct AnnotationContext {
    std::shared_ptr<const Annotator> annotator;
    std::set<std::string> stopwords;                   // lowercased
    std::vector<std::pair<std::string, std::string>> topics;  // keyword -> class IRI, in file order

    static AnnotationContext from_files(const std::string& pos_lexicon_tsv,
                                        const std::string& first_names_file,
                                        const std::string& stopwords_file,
                                        const std::string& topics_tsv);
};

// Whitespace tokens with leading/trailing punctuation stripped;
// pure-punctuation tokens are dropped. Throws EmptyQuestionError when
// nothing remains.
std::vector<std::string> tokenize(const std::string& text);

AnnotatedQuestion annotate(const std::string& text, const AnnotationContext& ctx);

// All 1..6-grams, minus those whose tokens are all stopwords and those
// whose first token's POS tag does not start with JJ, NN or VB.
std::vector<NGram> relevant_ngrams(const std::vector<AnnotatedToken>& tokens,
                                   const std::set<std::string>& stopwords);

FeatureVector extract_features(const AnnotatedQuestion& q, const AnnotationContext& ctx);

// Question-word list used for the QuestionWord feature, in scan order.
const std::vector<std::string>& question_words();

}  // namespace kgqa
