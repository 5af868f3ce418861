#include "kgqa/sparql.hpp"

#include <cctype>
#include <map>
#include <set>

#include "kgqa/text_util.hpp"

namespace kgqa {

namespace {

const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

// Constructs we recognize but refuse, so the error names them.
const std::set<std::string> kUnsupported = {
    "UNION",  "OPTIONAL", "GRAPH",    "SERVICE", "MINUS",  "EXISTS",
    "NOT",    "CONSTRUCT", "DESCRIBE", "INSERT",  "DELETE", "VALUES",
    "BIND",   "GROUP",    "HAVING",   "OFFSET",  "REDUCED", "FROM",
    "SAMPLE", "SUM",      "AVG",      "MIN",     "MAX"};

enum class TokKind { Iri, Pname, Var, String, Number, Word, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;       // raw text (IRI without <>, var without ?, string unescaped)
    std::string datatype;   // for String: datatype IRI or pname (unresolved)
    bool datatype_is_pname = false;
    std::string lang;       // for String
    std::size_t offset = 0;
};

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;

    explicit Lexer(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size()) {
            char c = src[pos];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else if (c == '#') {  // comment to end of line
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg, at);
    }

    static bool word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    Token next() {
        skip_ws();
        Token t;
        t.offset = pos;
        if (pos >= src.size()) return t;
        char c = src[pos];

        if (c == '<') {
            // IRIREF if a '>' closes it before any whitespace; else the
            // '<' is a comparison operator.
            std::size_t j = pos + 1;
            while (j < src.size() && src[j] != '>' &&
                   !std::isspace(static_cast<unsigned char>(src[j])))
                ++j;
            if (j < src.size() && src[j] == '>') {
                t.kind = TokKind::Iri;
                t.text = src.substr(pos + 1, j - pos - 1);
                pos = j + 1;
                return t;
            }
            t.kind = TokKind::Punct;
            if (pos + 1 < src.size() && src[pos + 1] == '=') {
                t.text = "<=";
                pos += 2;
            } else {
                t.text = "<";
                ++pos;
            }
            return t;
        }
        if (c == '?' || c == '$') {
            std::size_t j = pos + 1;
            while (j < src.size() && word_char(src[j])) ++j;
            if (j == pos + 1) fail("expected variable name after '?'", pos);
            t.kind = TokKind::Var;
            t.text = src.substr(pos + 1, j - pos - 1);
            pos = j;
            return t;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            std::size_t j = pos + 1;
            std::string value;
            while (j < src.size() && src[j] != quote) {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    char e = src[j + 1];
                    switch (e) {
                        case 'n': value += '\n'; break;
                        case 't': value += '\t'; break;
                        case 'r': value += '\r'; break;
                        case '\\': value += '\\'; break;
                        case '"': value += '"'; break;
                        case '\'': value += '\''; break;
                        default: value += e; break;
                    }
                    j += 2;
                } else {
                    value += src[j++];
                }
            }
            if (j >= src.size()) fail("unterminated string literal", pos);
            pos = j + 1;
            t.kind = TokKind::String;
            t.text = std::move(value);
            if (pos + 1 < src.size() && src[pos] == '^' && src[pos + 1] == '^') {
                pos += 2;
                Token dt = next();
                if (dt.kind == TokKind::Iri) {
                    t.datatype = dt.text;
                } else if (dt.kind == TokKind::Pname) {
                    t.datatype = dt.text;
                    t.datatype_is_pname = true;
                } else {
                    fail("expected datatype IRI after '^^'", dt.offset);
                }
            } else if (pos < src.size() && src[pos] == '@') {
                std::size_t j2 = pos + 1;
                while (j2 < src.size() && word_char(src[j2])) ++j2;
                t.lang = src.substr(pos + 1, j2 - pos - 1);
                pos = j2;
            }
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '+' || c == '-') && pos + 1 < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
            std::size_t j = pos + 1;
            bool seen_dot = false;
            while (j < src.size() &&
                   (std::isdigit(static_cast<unsigned char>(src[j])) ||
                    (src[j] == '.' && !seen_dot && j + 1 < src.size() &&
                     std::isdigit(static_cast<unsigned char>(src[j + 1]))))) {
                if (src[j] == '.') seen_dot = true;
                ++j;
            }
            t.kind = TokKind::Number;
            t.text = src.substr(pos, j - pos);
            t.datatype = seen_dot ? "http://www.w3.org/2001/XMLSchema#decimal"
                                  : "http://www.w3.org/2001/XMLSchema#integer";
            pos = j;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = pos;
            while (j < src.size() && word_char(src[j])) ++j;
            // A ':' turns the word into a prefixed name.
            if (j < src.size() && src[j] == ':') {
                std::size_t k = j + 1;
                while (k < src.size() && (word_char(src[k]) || src[k] == '.')) ++k;
                while (k > j + 1 && src[k - 1] == '.') --k;  // trailing dot ends the triple
                t.kind = TokKind::Pname;
                t.text = src.substr(pos, k - pos);
                pos = k;
                return t;
            }
            t.kind = TokKind::Word;
            t.text = src.substr(pos, j - pos);
            pos = j;
            return t;
        }
        if (c == ':') {  // default-prefix name
            std::size_t k = pos + 1;
            while (k < src.size() && (word_char(src[k]) || src[k] == '.')) ++k;
            while (k > pos + 1 && src[k - 1] == '.') --k;
            t.kind = TokKind::Pname;
            t.text = src.substr(pos, k - pos);
            pos = k;
            return t;
        }
        if (c == '>' || c == '=') {
            t.kind = TokKind::Punct;
            if (pos + 1 < src.size() && src[pos + 1] == '=') {
                t.text = std::string(1, c) + "=";
                pos += 2;
            } else {
                t.text = std::string(1, c);
                ++pos;
            }
            return t;
        }
        if (c == '!' && pos + 1 < src.size() && src[pos + 1] == '=') {
            t.kind = TokKind::Punct;
            t.text = "!=";
            pos += 2;
            return t;
        }
        if (std::string("{}().;,").find(c) != std::string::npos) {
            t.kind = TokKind::Punct;
            t.text = std::string(1, c);
            ++pos;
            return t;
        }
        fail(std::string("unsupported character '") + c + "'", pos);
    }
};

struct Parser {
    Lexer lex;
    Token cur;
    std::map<std::string, std::string> prefixes;

    explicit Parser(const std::string& s) : lex(s) { cur = lex.next(); }

    void advance() { cur = lex.next(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur.offset); }

    bool word_is(const char* kw) const {
        return cur.kind == TokKind::Word && to_lower(cur.text) == to_lower(kw);
    }

    void expect_word(const char* kw) {
        if (!word_is(kw)) fail(std::string("expected '") + kw + "'");
        advance();
    }

    void expect_punct(const char* p) {
        if (cur.kind != TokKind::Punct || cur.text != p)
            fail(std::string("expected '") + p + "'");
        advance();
    }

    void check_supported() const {
        if (cur.kind == TokKind::Word) {
            std::string up;
            for (char c : cur.text) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (kUnsupported.count(up))
                throw ParseError("unsupported construct " + up, cur.offset);
        }
    }

    std::string expand(const std::string& pname, std::size_t at) const {
        auto colon = pname.find(':');
        std::string pfx = pname.substr(0, colon);
        auto it = prefixes.find(pfx);
        if (it == prefixes.end())
            throw ParseError("undeclared prefix '" + pfx + ":'", at);
        return it->second + pname.substr(colon + 1);
    }

    void parse_prologue() {
        while (word_is("prefix")) {
            advance();
            if (cur.kind != TokKind::Pname || cur.text.back() != ':')
                fail("expected prefix name");
            std::string pfx = cur.text.substr(0, cur.text.size() - 1);
            advance();
            if (cur.kind != TokKind::Iri) fail("expected IRI in PREFIX declaration");
            prefixes[pfx] = cur.text;
            advance();
        }
    }

    Term parse_term(bool predicate_position) {
        check_supported();
        switch (cur.kind) {
            case TokKind::Iri: {
                Term t = Term::iri(cur.text);
                advance();
                return t;
            }
            case TokKind::Pname: {
                Term t = Term::iri(expand(cur.text, cur.offset));
                advance();
                return t;
            }
            case TokKind::Var: {
                Term t = Term::variable(cur.text);
                advance();
                return t;
            }
            case TokKind::String: {
                if (predicate_position) fail("literal not allowed as predicate");
                std::string dt = cur.datatype;
                if (cur.datatype_is_pname) dt = expand(cur.datatype, cur.offset);
                Term t = Term::literal(cur.text, dt, cur.lang);
                advance();
                return t;
            }
            case TokKind::Number: {
                if (predicate_position) fail("literal not allowed as predicate");
                Term t = Term::literal(cur.text, cur.datatype);
                advance();
                return t;
            }
            case TokKind::Word:
                if (to_lower(cur.text) == "a" && predicate_position) {
                    advance();
                    return Term::iri(kRdfType);
                }
                if (to_lower(cur.text) == "true" || to_lower(cur.text) == "false") {
                    Term t = Term::literal(to_lower(cur.text),
                                           "http://www.w3.org/2001/XMLSchema#boolean");
                    advance();
                    return t;
                }
                fail("expected term, got '" + cur.text + "'");
            default:
                fail("expected term");
        }
    }

    FilterModifier parse_filter() {
        expect_punct("(");
        FilterModifier f;
        f.lhs = parse_term(false);
        if (cur.kind != TokKind::Punct) fail("expected comparison operator in FILTER");
        std::string op = cur.text;
        if (op == "<") f.op = CompareOp::Less;
        else if (op == "<=") f.op = CompareOp::LessEq;
        else if (op == ">") f.op = CompareOp::Greater;
        else if (op == ">=") f.op = CompareOp::GreaterEq;
        else if (op == "=") f.op = CompareOp::Equal;
        else if (op == "!=") f.op = CompareOp::NotEqual;
        else fail("unsupported FILTER operator '" + op + "'");
        advance();
        f.rhs = parse_term(false);
        expect_punct(")");
        return f;
    }

    // Parses the group between braces: triples plus optional FILTERs.
    void parse_group(ParsedQuery& q) {
        expect_punct("{");
        while (!(cur.kind == TokKind::Punct && cur.text == "}")) {
            if (cur.kind == TokKind::End) fail("unterminated group, expected '}'");
            check_supported();
            if (word_is("filter")) {
                advance();
                q.modifiers.emplace_back(parse_filter());
                if (cur.kind == TokKind::Punct && cur.text == ".") advance();
                continue;
            }
            Term subject = parse_term(false);
            while (true) {
                Term predicate = parse_term(true);
                while (true) {
                    Term object = parse_term(false);
                    q.patterns.push_back({subject, predicate, object});
                    if (cur.kind == TokKind::Punct && cur.text == ",") {
                        advance();
                        continue;
                    }
                    break;
                }
                if (cur.kind == TokKind::Punct && cur.text == ";") {
                    advance();
                    // allow dangling ';' before '}' or '.'
                    if (cur.kind == TokKind::Punct && (cur.text == "}" || cur.text == "."))
                        break;
                    continue;
                }
                break;
            }
            if (cur.kind == TokKind::Punct && cur.text == ".") advance();
        }
        advance();  // consume '}'
    }

    ParsedQuery parse() {
        parse_prologue();
        ParsedQuery q;
        check_supported();
        if (word_is("select")) {
            advance();
            q.form = QueryForm::Select;
            if (word_is("distinct")) advance();  // results are always distinct
            std::size_t proj_offset = cur.offset;
            bool counted = false;
            while (true) {
                check_supported();
                if (cur.kind == TokKind::Var) {
                    q.projection.push_back(cur.text);
                    advance();
                    continue;
                }
                if (cur.kind == TokKind::Punct && cur.text == "(") {
                    advance();
                    expect_word("count");
                    expect_punct("(");
                    if (word_is("distinct")) advance();
                    if (cur.kind != TokKind::Var) fail("expected variable inside COUNT");
                    q.projection.push_back(cur.text);
                    advance();
                    expect_punct(")");
                    expect_word("as");
                    if (cur.kind != TokKind::Var) fail("expected alias variable after AS");
                    advance();
                    expect_punct(")");
                    counted = true;
                    continue;
                }
                if (word_is("count")) {  // legacy COUNT(?x) without AS
                    advance();
                    expect_punct("(");
                    if (word_is("distinct")) advance();
                    if (cur.kind != TokKind::Var) fail("expected variable inside COUNT");
                    q.projection.push_back(cur.text);
                    advance();
                    expect_punct(")");
                    counted = true;
                    continue;
                }
                break;
            }
            if (counted) q.modifiers.emplace_back(CountModifier{});
            if (q.projection.empty())
                throw ParseError("SELECT requires at least one projected variable", proj_offset);
            expect_word("where");
            parse_group(q);
            parse_solution_modifiers(q);
            // Every projected variable must occur in some pattern.
            for (const auto& v : q.projection) {
                bool found = false;
                for (const auto& p : q.patterns)
                    if ((p.subject.is_variable() && p.subject.value == v) ||
                        (p.predicate.is_variable() && p.predicate.value == v) ||
                        (p.object.is_variable() && p.object.value == v))
                        found = true;
                if (!found)
                    throw ParseError("projected variable ?" + v + " not used in any pattern",
                                     proj_offset);
            }
        } else if (word_is("ask")) {
            advance();
            q.form = QueryForm::Ask;
            if (word_is("where")) advance();
            parse_group(q);
        } else {
            check_supported();
            fail("expected SELECT or ASK");
        }
        if (q.patterns.empty()) fail("query has no triple patterns");
        if (cur.kind != TokKind::End) {
            check_supported();
            fail("unexpected trailing input");
        }
        return q;
    }

    void parse_solution_modifiers(ParsedQuery& q) {
        if (word_is("order")) {
            advance();
            expect_word("by");
            OrderLimitModifier m;
            if (word_is("asc") || word_is("desc")) {
                m.order = word_is("asc") ? SortOrder::Asc : SortOrder::Desc;
                advance();
                expect_punct("(");
                if (cur.kind != TokKind::Var) fail("expected variable in ORDER BY");
                m.variable = cur.text;
                advance();
                expect_punct(")");
            } else if (cur.kind == TokKind::Var) {
                m.order = SortOrder::Asc;
                m.variable = cur.text;
                advance();
            } else {
                fail("expected ASC(?v), DESC(?v) or ?v after ORDER BY");
            }
            if (word_is("limit")) {
                advance();
                if (cur.kind != TokKind::Number) fail("expected integer after LIMIT");
                m.limit = std::stol(cur.text);
                advance();
            }
            q.modifiers.emplace_back(std::move(m));
        } else if (word_is("limit")) {
            advance();
            if (cur.kind != TokKind::Number) fail("expected integer after LIMIT");
            OrderLimitModifier m;  // bare LIMIT: keep solution order
            m.variable.clear();
            m.limit = std::stol(cur.text);
            advance();
            q.modifiers.emplace_back(std::move(m));
        }
    }
};

}  // namespace

bool ParsedQuery::has_count() const {
    for (const auto& m : modifiers)
        if (std::holds_alternative<CountModifier>(m)) return true;
    return false;
}

std::optional<FilterModifier> ParsedQuery::filter() const {
    for (const auto& m : modifiers)
        if (auto* f = std::get_if<FilterModifier>(&m)) return *f;
    return std::nullopt;
}

std::optional<OrderLimitModifier> ParsedQuery::order_limit() const {
    for (const auto& m : modifiers)
        if (auto* o = std::get_if<OrderLimitModifier>(&m)) return *o;
    return std::nullopt;
}

std::string compare_op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Less: return "<";
        case CompareOp::LessEq: return "<=";
        case CompareOp::Greater: return ">";
        case CompareOp::GreaterEq: return ">=";
        case CompareOp::Equal: return "=";
        case CompareOp::NotEqual: return "!=";
    }
    return "<";
}

std::string term_to_sparql(const Term& t) {
    switch (t.kind) {
        case TermKind::Iri: return "<" + t.value + ">";
        case TermKind::Variable: return "?" + t.value;
        case TermKind::Literal: {
            std::string escaped;
            for (char c : t.value) {
                if (c == '"' || c == '\\') escaped += '\\';
                if (c == '\n') { escaped += "\\n"; continue; }
                escaped += c;
            }
            std::string out = "\"" + escaped + "\"";
            if (!t.lang.empty()) out += "@" + t.lang;
            else if (!t.datatype.empty()) out += "^^<" + t.datatype + ">";
            return out;
        }
    }
    return "";
}

ParsedQuery parse_query(const std::string& text) {
    Parser p(text);
    return p.parse();
}

std::string render_query(const ParsedQuery& q) {
    std::string out;
    if (q.form == QueryForm::Ask) {
        out = "ASK WHERE { ";
    } else if (q.has_count()) {
        out = "SELECT (COUNT(?" + q.projection.front() + ") AS ?cnt) WHERE { ";
    } else {
        out = "SELECT";
        for (const auto& v : q.projection) out += " ?" + v;
        out += " WHERE { ";
    }
    for (const auto& p : q.patterns) {
        out += term_to_sparql(p.subject) + " " + term_to_sparql(p.predicate) + " " +
               term_to_sparql(p.object) + " . ";
    }
    if (auto f = q.filter()) {
        out += "FILTER(" + term_to_sparql(f->lhs) + " " + compare_op_text(f->op) + " " +
               term_to_sparql(f->rhs) + ") ";
    }
    out += "}";
    if (auto o = q.order_limit()) {
        if (!o->variable.empty())
            out += std::string(" ORDER BY ") + (o->order == SortOrder::Asc ? "ASC" : "DESC") +
                   "(?" + o->variable + ")";
        if (o->limit) out += " LIMIT " + std::to_string(*o->limit);
    }
    return out;
}

}  // namespace kgqa
