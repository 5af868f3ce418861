#include "kgqa/ranking.hpp"

#include <algorithm>
#include <set>

#include "kgqa/text_util.hpp"

namespace kgqa {

namespace {

const std::set<std::string> kBeDoHave = {"is",  "are",  "was", "were", "am",  "be",
                                         "did", "does", "do",  "has",  "have", "had"};

// Words whose singular and plural forms coincide; cardinality is then
// undecidable from the surface form.
const std::set<std::string> kInvariantPlurals = {"news",    "series", "species", "sheep",
                                                 "fish",    "deer",   "means",   "headquarters",
                                                 "aircraft"};

bool is_noun_tag(const std::string& tag) { return tag.starts_with("NN"); }
bool is_plural_tag(const std::string& tag) { return tag == "NNS" || tag == "NNPS"; }

}  // namespace

std::string expected_answer_name(ExpectedAnswer e) {
    switch (e) {
        case ExpectedAnswer::Date: return "date";
        case ExpectedAnswer::Boolean: return "boolean";
        case ExpectedAnswer::Number: return "number";
        case ExpectedAnswer::SingleResource: return "single-resource";
        case ExpectedAnswer::MultiResource: return "multi-resource";
        case ExpectedAnswer::Unknown: return "unknown";
    }
    return "unknown";
}

ExpectedAnswer expected_answer(const AnnotatedQuestion& q) {
    const auto& toks = q.tokens;
    if (toks.empty()) return ExpectedAnswer::Unknown;

    std::string first = to_lower(toks[0].surface);
    if (first == "when") return ExpectedAnswer::Date;
    if (kBeDoHave.count(first)) return ExpectedAnswer::Boolean;
    if (first == "how" && toks.size() >= 2) {
        std::string second = to_lower(toks[1].surface);
        if (second == "many" || second == "much") return ExpectedAnswer::Number;
        if (toks[1].pos.starts_with("JJ")) return ExpectedAnswer::Number;
    }

    // Cardinality of the first noun group after the question word.
    std::size_t qword_pos = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        bool match = false;
        for (const auto& w : question_words())
            if (to_lower(toks[i].surface) == to_lower(w)) match = true;
        if (match) {
            qword_pos = i;
            break;
        }
    }
    std::size_t i = qword_pos + 1;
    while (i < toks.size() && !is_noun_tag(toks[i].pos)) ++i;
    if (i >= toks.size()) return ExpectedAnswer::Unknown;
    std::size_t group_end = i;
    while (group_end < toks.size() && is_noun_tag(toks[group_end].pos)) ++group_end;

    const auto& head = toks[group_end - 1];
    if (kInvariantPlurals.count(to_lower(head.surface))) return ExpectedAnswer::Unknown;
    for (std::size_t k = i; k < group_end; ++k)
        if (is_plural_tag(toks[k].pos)) return ExpectedAnswer::MultiResource;
    return ExpectedAnswer::SingleResource;
}

namespace {

bool answer_matches(const AnswerSet& a, ExpectedAnswer expected) {
    switch (expected) {
        case ExpectedAnswer::Boolean:
            return a.kind == AnswerKind::Boolean;
        case ExpectedAnswer::Number:
            if (a.kind == AnswerKind::Count) return true;
            if (a.kind != AnswerKind::Literals) return false;
            for (const auto& v : a.values) {
                if (!v.is_literal()) return false;
                bool numeric = true;
                for (char c : v.value)
                    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != '-')
                        numeric = false;
                if (!numeric || v.value.empty()) return false;
            }
            return true;
        case ExpectedAnswer::Date: {
            if (a.kind != AnswerKind::Literals) return false;
            for (const auto& v : a.values) {
                bool typed_date = v.datatype.find("date") != std::string::npos ||
                                  v.datatype.find("gYear") != std::string::npos;
                bool shaped = v.value.size() >= 4 &&
                              std::isdigit(static_cast<unsigned char>(v.value[0]));
                if (!typed_date && !shaped) return false;
            }
            return true;
        }
        case ExpectedAnswer::SingleResource:
            return a.result_count() == 1;
        case ExpectedAnswer::MultiResource:
            return a.result_count() > 1;
        case ExpectedAnswer::Unknown:
            return true;
    }
    return true;
}

}  // namespace

std::vector<RankedAnswer> type_filter(const std::vector<RankedAnswer>& candidates,
                                      ExpectedAnswer expected) {
    std::vector<RankedAnswer> out;
    for (const auto& c : candidates) {
        if (c.answers.empty()) continue;  // empty answer sets are always discarded
        if (answer_matches(c.answers, expected)) out.push_back(c);
    }
    return out;
}

double rate(const CandidateQuery& c, const AnswerSet& answers) {
    double rating = 0.0;
    for (const auto& [slot, value] : c.binding) {
        if (!value.has_source) continue;  // implicit bindings carry no span
        const auto& span = value.source.source_ngram;
        double words = static_cast<double>(span.length);
        double distance =
            levenshtein_norm(to_lower(value.source.matched_label), to_lower(span.surface));
        rating += words - distance;
    }
    if (answers.result_count() > kResultPenaltyThreshold) rating *= 0.7;
    return rating;
}

RankedAnswer select_best(const std::vector<RankedAnswer>& candidates) {
    if (candidates.empty()) throw NoAnswerError();
    auto direction_match = [](const RankedAnswer& r) {
        if (!r.query.detected_superlative) return 0;
        bool matches = (r.query.variant == QueryVariant::OrderAsc &&
                        *r.query.detected_superlative == SortOrder::Asc) ||
                       (r.query.variant == QueryVariant::OrderDesc &&
                        *r.query.detected_superlative == SortOrder::Desc);
        return matches ? 1 : 0;
    };
    const RankedAnswer* best = &candidates.front();
    for (const auto& c : candidates) {
        if (c.rating != best->rating) {
            if (c.rating > best->rating) best = &c;
            continue;
        }
        if (c.query.classifier_score != best->query.classifier_score) {
            if (c.query.classifier_score > best->query.classifier_score) best = &c;
            continue;
        }
        if (c.answers.result_count() != best->answers.result_count()) {
            if (c.answers.result_count() < best->answers.result_count()) best = &c;
            continue;
        }
        if (direction_match(c) != direction_match(*best)) {
            if (direction_match(c) > direction_match(*best)) best = &c;
            continue;
        }
        if (c.query.sparql < best->query.sparql) best = &c;
    }
    return *best;
}

}  // namespace kgqa
