#pragma once

#include <optional>
#include <vector>

#include "kgqa/annotation.hpp"
#include "kgqa/query_builder.hpp"
#include "kgqa/triple_store.hpp"

namespace kgqa {

enum class ExpectedAnswer { Date, Boolean, Number, SingleResource, MultiResource, Unknown };

std::string expected_answer_name(ExpectedAnswer e);

// Derived from the question surface form alone: leading "When" asks for a
// date, a leading Be/Do/Have form for a boolean, "How much/many" (or
// "How" + adjective) for a number; otherwise the grammatical number of the
// first noun group after the question word decides the cardinality.
ExpectedAnswer expected_answer(const AnnotatedQuestion& q);

struct RankedAnswer {
    CandidateQuery query;
    AnswerSet answers;
    double rating = 0.0;
};

// Keep candidates whose answer type and cardinality match; empty answer
// sets are always discarded. Never reorders.
std::vector<RankedAnswer> type_filter(const std::vector<RankedAnswer>& candidates,
                                      ExpectedAnswer expected);

// Rating threshold: result sets larger than this are penalized by 30%.
inline constexpr std::size_t kResultPenaltyThreshold = 50;

// rating = sum over bindings B of |words(span)| - normalized_levenshtein(
// label(B), span); then *0.7 when the query returned more than 50 results.
double rate(const CandidateQuery& c, const AnswerSet& answers);

// Highest rating; ties broken by classifier score, then fewer results,
// then agreement with the detected superlative direction, then query text.
// Throws NoAnswerError on an empty list.
RankedAnswer select_best(const std::vector<RankedAnswer>& candidates);

}  // namespace kgqa
