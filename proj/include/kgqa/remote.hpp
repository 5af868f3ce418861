#pragma once

#include <string>

#include "kgqa/triple_store.hpp"

namespace kgqa {

// Execute a query against a SPARQL-protocol endpoint and parse the
// standard JSON results serialization. Throws TransportError,
// TimeoutError or MalformedResponseError; each failure marks only the
// candidate query, never the whole question.
AnswerSet remote_execute(const std::string& endpoint, const std::string& sparql,
                         int timeout_ms = 5000);

// Parse a SPARQL results JSON document (SELECT bindings or ASK boolean).
// Exposed separately so the parsing is testable without a server.
AnswerSet parse_sparql_results_json(const std::string& body);

}  // namespace kgqa
