#include "kgqa/remote.hpp"

#include <httplib.h>
#include <json.hpp>

#include "kgqa/errors.hpp"

namespace kgqa {

using nlohmann::json;

AnswerSet parse_sparql_results_json(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw MalformedResponseError(std::string("invalid JSON: ") + e.what());
    }

    AnswerSet out;
    if (doc.contains("boolean")) {
        if (!doc["boolean"].is_boolean())
            throw MalformedResponseError("boolean field is not a boolean");
        out.kind = AnswerKind::Boolean;
        out.boolean = doc["boolean"].get<bool>();
        return out;
    }
    if (!doc.contains("results") || !doc["results"].contains("bindings"))
        throw MalformedResponseError("missing results.bindings");

    std::string var;
    if (doc.contains("head") && doc["head"].contains("vars") && !doc["head"]["vars"].empty())
        var = doc["head"]["vars"][0].get<std::string>();

    bool any_literal = false;
    for (const auto& row : doc["results"]["bindings"]) {
        if (!row.is_object()) throw MalformedResponseError("binding row is not an object");
        if (row.empty()) continue;
        const json* cell = nullptr;
        if (!var.empty() && row.contains(var)) cell = &row[var];
        else cell = &row.begin().value();
        if (!cell->contains("type") || !cell->contains("value"))
            throw MalformedResponseError("binding cell lacks type/value");
        std::string type = (*cell)["type"].get<std::string>();
        std::string value = (*cell)["value"].get<std::string>();
        if (type == "uri") {
            out.values.push_back(Term::iri(value));
        } else {
            std::string datatype, lang;
            if (cell->contains("datatype")) datatype = (*cell)["datatype"].get<std::string>();
            if (cell->contains("xml:lang")) lang = (*cell)["xml:lang"].get<std::string>();
            out.values.push_back(Term::literal(value, datatype, lang));
            any_literal = true;
        }
    }
    out.kind = any_literal ? AnswerKind::Literals : AnswerKind::Resources;
    return out;
}

AnswerSet remote_execute(const std::string& endpoint, const std::string& sparql, int timeout_ms) {
    // Split scheme://host:port from the path.
    std::string rest = endpoint;
    std::string scheme_host;
    auto scheme = rest.find("://");
    if (scheme == std::string::npos) throw TransportError("endpoint URL lacks a scheme");
    auto path_start = rest.find('/', scheme + 3);
    std::string path = "/sparql";
    if (path_start != std::string::npos) {
        scheme_host = rest.substr(0, path_start);
        path = rest.substr(path_start);
    } else {
        scheme_host = rest;
    }

    httplib::Client client(scheme_host);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

    httplib::Params params{{"query", sparql}};
    httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
    auto res = client.Post(path, headers, params);

    if (!res) {
        auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write)
            throw TimeoutError("endpoint timed out: " + httplib::to_string(err));
        throw TransportError("endpoint unreachable: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300)
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
    return parse_sparql_results_json(res->body);
}

}  // namespace kgqa
