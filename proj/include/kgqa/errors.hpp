#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgqa {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SPARQL text could not be parsed; `offset` is the byte position of the
// offending token in the input.
struct ParseError : Error {
    ParseError(std::string msg, std::size_t offset)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

// A graph exceeded the node cap that bounds the canonicalization search.
struct SizeLimitError : Error {
    using Error::Error;
};

// Template instantiation was missing a value for `placeholder`.
struct MissingBindingError : Error {
    explicit MissingBindingError(std::string ph)
        : Error("missing binding for placeholder " + ph), placeholder(std::move(ph)) {}
    std::string placeholder;
};

struct EmptyQuestionError : Error {
    EmptyQuestionError() : Error("question is empty") {}
};

struct TooFewClassesError : Error {
    using Error::Error;
};

struct UnknownEntityError : Error {
    explicit UnknownEntityError(const std::string& iri)
        : Error("unknown entity " + iri) {}
};

struct NoAnswerError : Error {
    NoAnswerError() : Error("no candidate answer survived filtering") {}
};

// Query uses a construct outside the supported evaluation subset.
struct UnsupportedFeatureError : Error {
    using Error::Error;
};

// Remote endpoint errors. Each marks a single candidate query as failed.
struct TransportError : Error {
    using Error::Error;
};
struct TimeoutError : Error {
    using Error::Error;
};
struct MalformedResponseError : Error {
    using Error::Error;
};

}  // namespace kgqa
