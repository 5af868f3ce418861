#include "kgqa/triple_store.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <set>

#include "kgqa/errors.hpp"
#include "kgqa/text_util.hpp"

namespace kgqa {

namespace {

std::string term_key(const Term& t) { return term_to_sparql(t); }

const std::vector<std::size_t> kEmptyPostings;

bool is_numeric_datatype(const std::string& dt) {
    return dt == "http://www.w3.org/2001/XMLSchema#integer" ||
           dt == "http://www.w3.org/2001/XMLSchema#decimal" ||
           dt == "http://www.w3.org/2001/XMLSchema#double" ||
           dt == "http://www.w3.org/2001/XMLSchema#float" ||
           dt == "http://www.w3.org/2001/XMLSchema#long" ||
           dt == "http://www.w3.org/2001/XMLSchema#int" ||
           dt == "http://www.w3.org/2001/XMLSchema#nonNegativeInteger";
}

bool is_date_datatype(const std::string& dt) {
    return dt == "http://www.w3.org/2001/XMLSchema#date" ||
           dt == "http://www.w3.org/2001/XMLSchema#dateTime" ||
           dt == "http://www.w3.org/2001/XMLSchema#gYear" ||
           dt == "http://www.w3.org/2001/XMLSchema#gYearMonth";
}

std::optional<double> as_number(const Term& t) {
    if (!t.is_literal()) return std::nullopt;
    if (!t.datatype.empty() && !is_numeric_datatype(t.datatype)) return std::nullopt;
    const std::string& s = t.value;
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

// (year, month, day), unspecified components zero-filled.
std::optional<std::array<int, 3>> as_date(const Term& t) {
    if (!t.is_literal()) return std::nullopt;
    bool typed = is_date_datatype(t.datatype);
    if (!t.datatype.empty() && !typed) return std::nullopt;
    const std::string& s = t.value;
    if (s.size() < 4) return std::nullopt;
    std::array<int, 3> out = {0, 0, 0};
    int field = 0;
    std::size_t i = 0;
    while (i < s.size() && field < 3) {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) return std::nullopt;
        out[field++] = std::stoi(s.substr(i, j - i));
        if (j >= s.size() || s[j] == 'T') break;
        if (s[j] != '-') return std::nullopt;
        i = j + 1;
    }
    if (!typed && field < 3) return std::nullopt;  // untyped: require full date shape
    return out;
}

// Three-way comparison where both sides must share a comparable domain.
std::optional<int> compare_values(const Term& a, const Term& b) {
    auto na = as_number(a), nb = as_number(b);
    if (na && nb) return (*na < *nb) ? -1 : (*na > *nb ? 1 : 0);
    auto da = as_date(a), db = as_date(b);
    if (da && db) return (*da < *db) ? -1 : (*da > *db ? 1 : 0);
    return std::nullopt;
}

using Bindings = std::map<std::string, Term>;

bool unify(const Term& pattern_term, const Term& value, Bindings& bound) {
    if (!pattern_term.is_variable()) return pattern_term == value;
    auto [it, inserted] = bound.try_emplace(pattern_term.value, value);
    return inserted || it->second == value;
}

}  // namespace

bool AnswerSet::empty() const {
    switch (kind) {
        case AnswerKind::Resources:
        case AnswerKind::Literals: return values.empty();
        case AnswerKind::Boolean: return false;  // false is a real ASK answer
        case AnswerKind::Count: return count == 0;  // nothing matched the BGP
    }
    return true;
}

std::size_t AnswerSet::result_count() const {
    switch (kind) {
        case AnswerKind::Resources:
        case AnswerKind::Literals: return values.size();
        case AnswerKind::Boolean:
        case AnswerKind::Count: return 1;
    }
    return 0;
}

std::vector<std::string> AnswerSet::value_strings() const {
    switch (kind) {
        case AnswerKind::Boolean: return {boolean ? "true" : "false"};
        case AnswerKind::Count: return {std::to_string(count)};
        default: break;
    }
    std::vector<std::string> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.value);
    return out;
}

void TripleStore::add(Term subject, Term predicate, Term object) {
    std::size_t idx = triples_.size();
    subject_index_[term_key(subject)].push_back(idx);
    predicate_index_[term_key(predicate)].push_back(idx);
    object_index_[term_key(object)].push_back(idx);
    triples_.push_back({std::move(subject), std::move(predicate), std::move(object)});
}

const std::vector<std::size_t>& TripleStore::by_subject(const Term& t) const {
    auto it = subject_index_.find(term_key(t));
    return it == subject_index_.end() ? kEmptyPostings : it->second;
}
const std::vector<std::size_t>& TripleStore::by_predicate(const Term& t) const {
    auto it = predicate_index_.find(term_key(t));
    return it == predicate_index_.end() ? kEmptyPostings : it->second;
}
const std::vector<std::size_t>& TripleStore::by_object(const Term& t) const {
    auto it = object_index_.find(term_key(t));
    return it == object_index_.end() ? kEmptyPostings : it->second;
}

namespace {

// One line of N-Triples: IRI or literal term.
std::optional<Term> parse_nt_term(const std::string& line, std::size_t& i) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) return std::nullopt;
    if (line[i] == '<') {
        auto end = line.find('>', i);
        if (end == std::string::npos) return std::nullopt;
        Term t = Term::iri(line.substr(i + 1, end - i - 1));
        i = end + 1;
        return t;
    }
    if (line[i] == '"') {
        std::string value;
        std::size_t j = i + 1;
        while (j < line.size() && line[j] != '"') {
            if (line[j] == '\\' && j + 1 < line.size()) {
                char e = line[j + 1];
                switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    default: value += e; break;
                }
                j += 2;
            } else {
                value += line[j++];
            }
        }
        if (j >= line.size()) return std::nullopt;
        i = j + 1;
        std::string datatype, lang;
        if (i + 1 < line.size() && line[i] == '^' && line[i + 1] == '^') {
            i += 2;
            if (i >= line.size() || line[i] != '<') return std::nullopt;
            auto end = line.find('>', i);
            if (end == std::string::npos) return std::nullopt;
            datatype = line.substr(i + 1, end - i - 1);
            i = end + 1;
        } else if (i < line.size() && line[i] == '@') {
            std::size_t j2 = i + 1;
            while (j2 < line.size() && (std::isalnum(static_cast<unsigned char>(line[j2])) ||
                                        line[j2] == '-'))
                ++j2;
            lang = line.substr(i + 1, j2 - i - 1);
            i = j2;
        }
        return Term::literal(value, datatype, lang);
    }
    return std::nullopt;
}

}  // namespace

LoadReport TripleStore::load_ntriples(std::istream& in) {
    LoadReport report;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t i = 0;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') continue;
        auto s = parse_nt_term(line, i);
        auto p = parse_nt_term(line, i);
        auto o = parse_nt_term(line, i);
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        bool terminated = i < line.size() && line[i] == '.';
        if (!s || !p || !o || !terminated || !s->is_iri() || !p->is_iri()) {
            ++report.malformed_lines;
            continue;
        }
        add(std::move(*s), std::move(*p), std::move(*o));
        ++report.triples_loaded;
    }
    return report;
}

LoadReport TripleStore::load_ntriples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open N-Triples file: " + path);
    return load_ntriples(in);
}

namespace {

// Candidate triple rows for a pattern under current bindings, using the
// most selective applicable access map.
std::vector<std::size_t> candidate_rows(const TripleStore& store, const TriplePattern& p,
                                        const Bindings& bound) {
    auto resolved = [&](const Term& t) -> std::optional<Term> {
        if (!t.is_variable()) return t;
        auto it = bound.find(t.value);
        if (it != bound.end()) return it->second;
        return std::nullopt;
    };
    auto s = resolved(p.subject), pr = resolved(p.predicate), o = resolved(p.object);

    const std::vector<std::size_t>* best = nullptr;
    auto consider = [&](const std::vector<std::size_t>& rows) {
        if (!best || rows.size() < best->size()) best = &rows;
    };
    if (s) consider(store.by_subject(*s));
    if (pr) consider(store.by_predicate(*pr));
    if (o) consider(store.by_object(*o));
    if (best) return *best;
    std::vector<std::size_t> all(store.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

int bound_term_count(const TriplePattern& p) {
    int n = 0;
    if (!p.subject.is_variable()) ++n;
    if (!p.predicate.is_variable()) ++n;
    if (!p.object.is_variable()) ++n;
    return n;
}

}  // namespace

AnswerSet evaluate(const TripleStore& store, const ParsedQuery& q) {
    if (q.patterns.empty()) throw UnsupportedFeatureError("query has no patterns");

    // Most selective first: more constants, then smaller initial candidate set.
    std::vector<std::size_t> order(q.patterns.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Bindings no_bindings;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        int ba = bound_term_count(q.patterns[a]), bb = bound_term_count(q.patterns[b]);
        if (ba != bb) return ba > bb;
        return candidate_rows(store, q.patterns[a], no_bindings).size() <
               candidate_rows(store, q.patterns[b], no_bindings).size();
    });

    auto filter = q.filter();
    std::vector<Bindings> solutions;

    std::function<void(std::size_t, Bindings&)> join = [&](std::size_t depth, Bindings& bound) {
        if (depth == order.size()) {
            if (filter) {
                auto resolve = [&](const Term& t) -> std::optional<Term> {
                    if (!t.is_variable()) return t;
                    auto it = bound.find(t.value);
                    if (it == bound.end()) return std::nullopt;
                    return it->second;
                };
                auto lhs = resolve(filter->lhs), rhs = resolve(filter->rhs);
                if (!lhs || !rhs) return;
                auto cmp = compare_values(*lhs, *rhs);
                if (!cmp) return;  // incomparable values exclude the solution
                bool keep = false;
                switch (filter->op) {
                    case CompareOp::Less: keep = *cmp < 0; break;
                    case CompareOp::LessEq: keep = *cmp <= 0; break;
                    case CompareOp::Greater: keep = *cmp > 0; break;
                    case CompareOp::GreaterEq: keep = *cmp >= 0; break;
                    case CompareOp::Equal: keep = *cmp == 0; break;
                    case CompareOp::NotEqual: keep = *cmp != 0; break;
                }
                if (!keep) return;
            }
            solutions.push_back(bound);
            return;
        }
        const auto& p = q.patterns[order[depth]];
        for (std::size_t row : candidate_rows(store, p, bound)) {
            const Triple& t = store.triples()[row];
            Bindings next = bound;
            if (unify(p.subject, t.subject, next) && unify(p.predicate, t.predicate, next) &&
                unify(p.object, t.object, next))
                join(depth + 1, next);
        }
    };
    Bindings root;
    join(0, root);

    if (q.form == QueryForm::Ask) {
        AnswerSet a;
        a.kind = AnswerKind::Boolean;
        a.boolean = !solutions.empty();
        return a;
    }

    const std::string& proj = q.projection.front();
    auto order_limit = q.order_limit();

    if (order_limit && !order_limit->variable.empty()) {
        const std::string& sort_var = order_limit->variable;
        bool desc = order_limit->order == SortOrder::Desc;
        std::stable_sort(solutions.begin(), solutions.end(),
                         [&](const Bindings& x, const Bindings& y) {
                             auto ix = x.find(sort_var), iy = y.find(sort_var);
                             if (ix == x.end() || iy == y.end()) return false;
                             auto cmp = compare_values(ix->second, iy->second);
                             int c;
                             if (cmp) c = *cmp;
                             else c = ix->second.value.compare(iy->second.value) < 0 ? -1
                                      : (ix->second.value == iy->second.value ? 0 : 1);
                             return desc ? c > 0 : c < 0;
                         });
    }

    // Project, dedupe (results are always distinct), then LIMIT.
    std::vector<Term> values;
    std::set<std::string> seen;
    for (const auto& sol : solutions) {
        auto it = sol.find(proj);
        if (it == sol.end()) continue;
        if (seen.insert(term_to_sparql(it->second)).second) values.push_back(it->second);
    }
    if (!order_limit || order_limit->variable.empty()) {
        std::sort(values.begin(), values.end(), [](const Term& a, const Term& b) {
            return term_to_sparql(a) < term_to_sparql(b);
        });
    }
    if (order_limit && order_limit->limit && static_cast<long>(values.size()) > *order_limit->limit)
        values.resize(static_cast<std::size_t>(*order_limit->limit));

    AnswerSet a;
    if (q.has_count()) {
        a.kind = AnswerKind::Count;
        a.count = static_cast<long>(values.size());
        return a;
    }
    bool any_literal = false;
    for (const auto& v : values)
        if (v.is_literal()) any_literal = true;
    a.kind = any_literal ? AnswerKind::Literals : AnswerKind::Resources;
    a.values = std::move(values);
    return a;
}

}  // namespace kgqa
