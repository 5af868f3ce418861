#include "kgqa/query_builder.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

#include "kgqa/text_util.hpp"

namespace kgqa {

namespace {

const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

std::map<std::string, std::string> load_direction_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open keyword table: " + path);
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

KeywordTables KeywordTables::from_files(const std::string& comparatives_tsv,
                                        const std::string& superlatives_tsv) {
    KeywordTables t;
    for (const auto& [word, dir] : load_direction_tsv(comparatives_tsv))
        t.comparative_direction[word] = dir == "<" ? CompareOp::Less : CompareOp::Greater;
    for (const auto& [word, dir] : load_direction_tsv(superlatives_tsv))
        t.superlative_direction[word] = to_lower(dir) == "asc" ? SortOrder::Asc : SortOrder::Desc;
    return t;
}

ModifierSet detect_modifiers(const AnnotatedQuestion& q, const KeywordTables& tables) {
    ModifierSet mods;
    const auto& toks = q.tokens;

    if (toks.size() >= 2 && to_lower(toks[0].surface) == "how" &&
        (to_lower(toks[1].surface) == "many" || to_lower(toks[1].surface) == "much"))
        mods.count = true;

    for (const auto& t : toks) {
        if (t.pos == "JJR" || t.pos == "RBR") {
            auto it = tables.comparative_direction.find(to_lower(t.surface));
            mods.comparative =
                it != tables.comparative_direction.end() ? it->second : CompareOp::Greater;
            break;
        }
    }
    for (const auto& t : toks) {
        if (t.pos == "JJS" || t.pos == "RBS") {
            auto it = tables.superlative_direction.find(to_lower(t.surface));
            mods.superlative =
                it != tables.superlative_direction.end() ? it->second : SortOrder::Desc;
            break;
        }
    }

    static const std::set<std::string> kAskWords = {"is",  "are", "was",  "were", "am",  "did",
                                                    "does", "do",  "has",  "have", "had"};
    if (!toks.empty() && kAskWords.count(to_lower(toks[0].surface))) mods.ask = true;

    if (mods.ask) {  // ask excludes count and superlative
        mods.count = false;
        mods.superlative.reset();
    }
    return mods;
}

namespace {

struct TemplateTriple {
    TriplePattern pattern;  // placeholder terms
    int ent_slots = 0;      // entity placeholders in subject/object position
};

bool is_ent_placeholder(const Term& t) { return t.is_iri() && t.value.starts_with("ent_"); }

std::vector<std::string> triple_variables(const TriplePattern& p) {
    std::vector<std::string> vars;
    if (p.subject.is_variable()) vars.push_back(p.subject.value);
    if (p.object.is_variable()) vars.push_back(p.object.value);
    return vars;
}

bool spans_overlap(const BoundValue& a, const BoundValue& b) {
    if (!a.has_source || !b.has_source) return false;
    return a.source.source_ngram.overlaps(b.source.source_ngram);
}

// Reference information from a bound case-1 triple, used by case 2.
struct Case1Ref {
    std::string entity_iri, pred_iri;
    BoundValue entity_value, pred_value;
    std::vector<std::string> variables;
};

}  // namespace

std::vector<Binding> fill_template(const QueryTemplate& t,
                                   const std::vector<LinkCandidate>& entity_candidates,
                                   const std::vector<LinkCandidate>& relation_candidates,
                                   const IndexBundle& bundle, const FillOptions& options) {
    std::vector<TemplateTriple> case1, case2;
    for (const auto& p : t.placeholder_patterns()) {
        TemplateTriple tt{p, 0};
        if (is_ent_placeholder(p.subject)) ++tt.ent_slots;
        if (is_ent_placeholder(p.object)) ++tt.ent_slots;
        if (tt.ent_slots == 1) case1.push_back(tt);
        else if (tt.ent_slots == 0) case2.push_back(tt);
        else return {};  // variable-free triple: not fillable (ignored case)
    }
    if (case1.empty()) return {};  // case 2 presupposes a case-1 triple

    std::vector<TemplateTriple> ordered = case1;
    ordered.insert(ordered.end(), case2.begin(), case2.end());

    std::vector<Binding> results;
    Binding current;
    std::vector<Case1Ref> refs;

    // The answer-class constraint for the domain/range consistency check:
    // a case-1 triple (?uri, p, C) with C a class makes C the answer type.
    auto answer_class = [&](const Binding& b) -> std::string {
        for (const auto& tt : case1) {
            if (!tt.pattern.subject.is_variable() || tt.pattern.subject.value != "uri") continue;
            auto pred_it = b.find(tt.pattern.predicate.value);
            if (pred_it == b.end() || pred_it->second.iri != kRdfType) continue;
            if (!is_ent_placeholder(tt.pattern.object)) continue;
            auto ent_it = b.find(tt.pattern.object.value);
            if (ent_it != b.end() && bundle.is_class(ent_it->second.iri))
                return ent_it->second.iri;
        }
        return "";
    };

    auto consistent_with_ontology = [&](const Binding& b) {
        std::string cls = answer_class(b);
        if (cls.empty()) return true;
        for (const auto& tt : ordered) {
            auto pred_it = b.find(tt.pattern.predicate.value);
            if (pred_it == b.end() || pred_it->second.iri == kRdfType) continue;
            const RelationRecord* rel = bundle.relation(pred_it->second.iri);
            if (!rel) continue;
            bool subject_is_answer =
                tt.pattern.subject.is_variable() && tt.pattern.subject.value == "uri";
            bool object_is_answer =
                tt.pattern.object.is_variable() && tt.pattern.object.value == "uri";
            if (subject_is_answer && !rel->domain.empty() && rel->domain != cls) return false;
            if (object_is_answer && !rel->range.empty() && rel->range != cls) return false;
        }
        return true;
    };

    std::function<void(std::size_t)> fill = [&](std::size_t depth) {
        if (results.size() >= options.max_bindings) return;
        if (depth == ordered.size()) {
            if (consistent_with_ontology(current)) results.push_back(current);
            return;
        }
        const auto& tt = ordered[depth];
        const std::string& pred_slot = tt.pattern.predicate.value;
        auto pred_assigned = current.find(pred_slot);

        if (tt.ent_slots == 1) {
            bool ent_in_object = is_ent_placeholder(tt.pattern.object);
            const std::string& ent_slot =
                ent_in_object ? tt.pattern.object.value : tt.pattern.subject.value;
            auto ent_assigned = current.find(ent_slot);

            auto try_pair = [&](const BoundValue& ev, const BoundValue& pv) {
                if (spans_overlap(ev, pv)) return;
                bool had_ent = ent_assigned != current.end();
                bool had_pred = pred_assigned != current.end();
                if (!had_ent) current[ent_slot] = ev;
                if (!had_pred) current[pred_slot] = pv;
                Case1Ref ref{ev.iri, pv.iri, ev, pv, triple_variables(tt.pattern)};
                refs.push_back(std::move(ref));
                fill(depth + 1);
                refs.pop_back();
                if (!had_ent) current.erase(ent_slot);
                if (!had_pred) current.erase(pred_slot);
                // iterators may be invalidated by map mutation
                ent_assigned = current.find(ent_slot);
                pred_assigned = current.find(pred_slot);
            };

            auto entity_choices = [&]() {
                std::vector<BoundValue> out;
                if (ent_assigned != current.end()) {
                    out.push_back(ent_assigned->second);
                } else {
                    for (const auto& c : entity_candidates) out.push_back({c.iri, true, c});
                }
                return out;
            };

            for (const auto& ev : entity_choices()) {
                const auto* connected = bundle.connected_relations(ev.iri);
                if (!connected) continue;
                bool is_class_value = bundle.is_class(ev.iri);

                if (is_class_value) {
                    // Classes bind through an implicit rdf:type predicate and
                    // only make sense in object position: (?v, a, Class).
                    if (!ent_in_object) continue;
                    if (pred_assigned != current.end() &&
                        pred_assigned->second.iri != kRdfType)
                        continue;
                    if (!connected->count(kRdfType)) continue;
                    BoundValue pv{kRdfType, false, {}};
                    if (pred_assigned != current.end()) pv = pred_assigned->second;
                    try_pair(ev, pv);
                    continue;
                }

                if (pred_assigned != current.end()) {
                    if (connected->count(pred_assigned->second.iri))
                        try_pair(ev, pred_assigned->second);
                    continue;
                }
                for (const auto& pc : relation_candidates) {
                    if (!connected->count(pc.iri)) continue;  // gate: p in S(e)
                    try_pair(ev, {pc.iri, true, pc});
                }
            }
            return;
        }

        // Case 2: only a relation placeholder. Use the case-1 triple
        // sharing a variable (else the first one) to build S(e'), then
        // admit relations connected to some member of S(e').
        auto vars = triple_variables(tt.pattern);
        const Case1Ref* ref = refs.empty() ? nullptr : &refs.front();
        for (const auto& r : refs) {
            for (const auto& v : vars)
                if (std::find(r.variables.begin(), r.variables.end(), v) != r.variables.end()) {
                    ref = &r;
                    break;
                }
        }
        if (!ref) return;
        std::set<std::string> connected_entities;
        try {
            connected_entities = bundle.connected_objects(ref->entity_iri, ref->pred_iri);
        } catch (const UnknownEntityError&) {
            return;
        }
        std::set<std::string> admissible;
        for (const auto& e : connected_entities)
            if (const auto* rels = bundle.connected_relations(e))
                admissible.insert(rels->begin(), rels->end());

        auto try_pred = [&](const BoundValue& pv) {
            bool had = current.count(pred_slot) > 0;
            if (!had) current[pred_slot] = pv;
            fill(depth + 1);
            if (!had) current.erase(pred_slot);
        };

        if (pred_assigned != current.end()) {
            if (admissible.count(pred_assigned->second.iri)) try_pred(pred_assigned->second);
            return;
        }
        for (const auto& pc : relation_candidates) {
            if (!admissible.count(pc.iri)) continue;
            BoundValue pv{pc.iri, true, pc};
            if (spans_overlap(pv, ref->entity_value) || spans_overlap(pv, ref->pred_value))
                continue;  // must not cover the n-grams of e and p
            try_pred(pv);
        }
    };

    fill(0);
    return results;
}

std::string variant_name(QueryVariant v) {
    switch (v) {
        case QueryVariant::Plain: return "plain";
        case QueryVariant::Count: return "count";
        case QueryVariant::Filtered: return "filtered";
        case QueryVariant::OrderAsc: return "order-asc";
        case QueryVariant::OrderDesc: return "order-desc";
        case QueryVariant::Ask: return "ask";
    }
    return "plain";
}

namespace {

// Helper variable for ORDER BY / FILTER: prefer one adjacent to the
// answer node, in canonical order.
std::vector<std::string> helper_vars_by_preference(const QueryTemplate& t) {
    std::vector<int> other_nodes;
    for (int i = 0; i < static_cast<int>(t.graph.nodes.size()); ++i)
        if (t.graph.nodes[i] == NodeLabel::OtherVar) other_nodes.push_back(i);

    int answer = -1;
    for (int i = 0; i < static_cast<int>(t.graph.nodes.size()); ++i)
        if (t.graph.nodes[i] == NodeLabel::AnswerVar) answer = i;

    auto adjacent = [&](int node) {
        for (const auto& e : t.graph.edges)
            if ((e.from == node && e.to == answer) || (e.from == answer && e.to == node))
                return true;
        return false;
    };
    std::stable_sort(other_nodes.begin(), other_nodes.end(),
                     [&](int a, int b) { return adjacent(a) && !adjacent(b); });

    std::vector<std::string> names;
    for (int node : other_nodes) {
        int ord = 0;
        for (int j = 0; j < node; ++j)
            if (t.graph.nodes[j] == NodeLabel::OtherVar) ++ord;
        names.push_back("x" + std::to_string(ord));
    }
    return names;
}

}  // namespace

std::vector<CandidateQuery> generate_queries(const QueryTemplate& t,
                                             const std::vector<Binding>& bindings,
                                             const ModifierSet& mods, double classifier_score) {
    std::vector<CandidateQuery> out;
    auto helpers = helper_vars_by_preference(t);

    for (const auto& binding : bindings) {
        std::map<std::string, std::string> iris;
        for (const auto& [slot, value] : binding) iris[slot] = value.iri;

        auto emit = [&](QueryVariant variant, QueryForm form, std::vector<Modifier> m) {
            CandidateQuery c;
            c.class_id = t.class_id;
            c.canonical_key = t.canonical_key;
            c.variant = variant;
            c.binding = binding;
            c.classifier_score = classifier_score;
            c.detected_superlative = mods.superlative;
            c.sparql = instantiate(t, iris, form, m);
            out.push_back(std::move(c));
        };

        if (t.has_answer_var()) emit(QueryVariant::Plain, QueryForm::Select, {});
        if (mods.count && t.has_answer_var())
            emit(QueryVariant::Count, QueryForm::Select, {CountModifier{}});
        if (mods.comparative && helpers.size() >= 2) {
            FilterModifier f{Term::variable(helpers[0]), *mods.comparative,
                             Term::variable(helpers[1])};
            emit(QueryVariant::Filtered, QueryForm::Select, {f});
        }
        if (mods.superlative && !helpers.empty() && t.has_answer_var()) {
            emit(QueryVariant::OrderAsc, QueryForm::Select,
                 {OrderLimitModifier{helpers[0], SortOrder::Asc, 1}});
            emit(QueryVariant::OrderDesc, QueryForm::Select,
                 {OrderLimitModifier{helpers[0], SortOrder::Desc, 1}});
        }
        if (mods.ask) emit(QueryVariant::Ask, QueryForm::Ask, {});
    }
    return out;
}

}  // namespace kgqa
