#include "kgqa/bgp.hpp"

#include <algorithm>
#include <set>

#include "kgqa/errors.hpp"

namespace kgqa {

namespace {

char label_char(NodeLabel l) {
    switch (l) {
        case NodeLabel::AnswerVar: return 'a';
        case NodeLabel::Entity: return 'e';
        case NodeLabel::OtherVar: return 'v';
    }
    return '?';
}

// Canonical node order groups labels as a < e < v; any serialization whose
// label prefix is not sorted is lexicographically dominated, so only
// within-group permutations need to be searched.
struct LabelGroups {
    std::vector<int> answer, entity, other;

    explicit LabelGroups(const BgpGraph& g) {
        for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
            switch (g.nodes[i]) {
                case NodeLabel::AnswerVar: answer.push_back(i); break;
                case NodeLabel::Entity: entity.push_back(i); break;
                case NodeLabel::OtherVar: other.push_back(i); break;
            }
        }
    }
};

std::vector<std::pair<int, int>> mapped_edges(const BgpGraph& g, const std::vector<int>& pos_of) {
    std::vector<std::pair<int, int>> out;
    out.reserve(g.edges.size());
    for (const auto& e : g.edges) out.emplace_back(pos_of[e.from], pos_of[e.to]);
    std::sort(out.begin(), out.end());
    return out;
}

// Enumerates every ordering that keeps the three label groups in canonical
// order, invoking fn with pos_of[original node] = canonical position.
template <typename Fn>
void for_each_group_ordering(const BgpGraph& g, Fn&& fn) {
    LabelGroups groups(g);
    std::vector<int> a = groups.answer, e = groups.entity, v = groups.other;
    std::sort(a.begin(), a.end());
    std::sort(e.begin(), e.end());
    std::sort(v.begin(), v.end());
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> pos_of(n, -1);
    do {
        do {
            do {
                int pos = 0;
                for (int i : a) pos_of[i] = pos++;
                for (int i : e) pos_of[i] = pos++;
                for (int i : v) pos_of[i] = pos++;
                fn(pos_of);
            } while (std::next_permutation(v.begin(), v.end()));
        } while (std::next_permutation(e.begin(), e.end()));
    } while (std::next_permutation(a.begin(), a.end()));
}

void check_cap(std::size_t nodes, int node_cap) {
    if (static_cast<int>(nodes) > node_cap)
        throw SizeLimitError("graph has " + std::to_string(nodes) +
                             " nodes, exceeding the cap of " + std::to_string(node_cap));
}

std::string term_key(const Term& t) { return term_to_sparql(t); }

}  // namespace

BgpGraph to_bgp_graph(const ParsedQuery& q) {
    BgpGraph g;
    std::map<std::string, int> node_of;
    std::string answer_var;
    if (q.form == QueryForm::Select && !q.projection.empty()) answer_var = q.projection.front();

    auto node_for = [&](const Term& t) {
        std::string key = term_key(t);
        auto it = node_of.find(key);
        if (it != node_of.end()) return it->second;
        NodeLabel label;
        if (t.is_variable())
            label = (!answer_var.empty() && t.value == answer_var) ? NodeLabel::AnswerVar
                                                                   : NodeLabel::OtherVar;
        else
            label = NodeLabel::Entity;  // IRIs and literals play the same structural role
        int idx = static_cast<int>(g.nodes.size());
        g.nodes.push_back(label);
        node_of.emplace(std::move(key), idx);
        return idx;
    };

    std::set<std::pair<int, std::pair<int, std::string>>> seen;  // dedupes identical patterns
    for (const auto& p : q.patterns) {
        int s = node_for(p.subject);
        int o = node_for(p.object);
        auto fingerprint = std::make_pair(s, std::make_pair(o, term_key(p.predicate)));
        if (!seen.insert(fingerprint).second) continue;
        g.edges.push_back({s, o});
    }
    return g;
}

QueryTemplate canonicalize(const BgpGraph& g, int node_cap) {
    check_cap(g.nodes.size(), node_cap);

    std::vector<std::pair<int, int>> best_edges;
    std::vector<int> best_pos;
    bool first = true;
    for_each_group_ordering(g, [&](const std::vector<int>& pos_of) {
        auto edges = mapped_edges(g, pos_of);
        if (first || edges < best_edges) {
            best_edges = std::move(edges);
            best_pos = pos_of;
            first = false;
        }
    });

    LabelGroups groups(g);
    QueryTemplate t;
    t.graph.nodes.reserve(g.nodes.size());
    for (std::size_t i = 0; i < groups.answer.size(); ++i)
        t.graph.nodes.push_back(NodeLabel::AnswerVar);
    for (std::size_t i = 0; i < groups.entity.size(); ++i)
        t.graph.nodes.push_back(NodeLabel::Entity);
    for (std::size_t i = 0; i < groups.other.size(); ++i)
        t.graph.nodes.push_back(NodeLabel::OtherVar);
    for (const auto& [f, to] : best_edges) t.graph.edges.push_back({f, to});

    std::string key = "bgpv1|";
    for (NodeLabel l : t.graph.nodes) key += label_char(l);
    key += '|';
    for (std::size_t i = 0; i < best_edges.size(); ++i) {
        if (i) key += ',';
        key += std::to_string(best_edges[i].first) + ">" + std::to_string(best_edges[i].second);
    }
    t.canonical_key = std::move(key);
    return t;
}

bool is_isomorphic(const BgpGraph& g1, const BgpGraph& g2, int node_cap) {
    check_cap(g1.nodes.size(), node_cap);
    check_cap(g2.nodes.size(), node_cap);
    if (g1.nodes.size() != g2.nodes.size() || g1.edges.size() != g2.edges.size()) return false;

    LabelGroups a(g1), b(g2);
    if (a.answer.size() != b.answer.size() || a.entity.size() != b.entity.size() ||
        a.other.size() != b.other.size())
        return false;

    std::vector<std::pair<int, int>> target;
    target.reserve(g2.edges.size());
    for (const auto& e : g2.edges) target.emplace_back(e.from, e.to);
    std::sort(target.begin(), target.end());

    // Fix one slot assignment for g2; composing it with every group ordering
    // of g1 enumerates exactly the label-preserving bijections g1 -> g2.
    std::vector<int> slot_to_g2(g2.nodes.size());
    {
        int pos = 0;
        for (int i : b.answer) slot_to_g2[pos++] = i;
        for (int i : b.entity) slot_to_g2[pos++] = i;
        for (int i : b.other) slot_to_g2[pos++] = i;
    }

    bool found = false;
    for_each_group_ordering(g1, [&](const std::vector<int>& pos1) {
        if (found) return;
        std::vector<std::pair<int, int>> mapped;
        mapped.reserve(g1.edges.size());
        for (const auto& e : g1.edges)
            mapped.emplace_back(slot_to_g2[pos1[e.from]], slot_to_g2[pos1[e.to]]);
        std::sort(mapped.begin(), mapped.end());
        if (mapped == target) found = true;
    });
    return found;
}

int QueryTemplate::entity_placeholders() const {
    return static_cast<int>(std::count(graph.nodes.begin(), graph.nodes.end(), NodeLabel::Entity));
}

int QueryTemplate::predicate_placeholders() const {
    return static_cast<int>(graph.edges.size());
}

int QueryTemplate::other_var_count() const {
    return static_cast<int>(std::count(graph.nodes.begin(), graph.nodes.end(), NodeLabel::OtherVar));
}

bool QueryTemplate::has_answer_var() const {
    return !graph.nodes.empty() && graph.nodes.front() == NodeLabel::AnswerVar;
}

namespace {

// Canonical term for node i of a canonical graph: ?uri, <ent_k> or ?xk.
Term node_term(const BgpGraph& g, int i) {
    int ent_ord = 0, var_ord = 0;
    for (int j = 0; j < i; ++j) {
        if (g.nodes[j] == NodeLabel::Entity) ++ent_ord;
        if (g.nodes[j] == NodeLabel::OtherVar) ++var_ord;
    }
    switch (g.nodes[i]) {
        case NodeLabel::AnswerVar: return Term::variable("uri");
        case NodeLabel::Entity: return Term::iri("ent_" + std::to_string(ent_ord));
        case NodeLabel::OtherVar: return Term::variable("x" + std::to_string(var_ord));
    }
    return Term::variable("uri");
}

}  // namespace

std::vector<TriplePattern> QueryTemplate::placeholder_patterns() const {
    std::vector<TriplePattern> out;
    out.reserve(graph.edges.size());
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        const auto& e = graph.edges[k];
        out.push_back({node_term(graph, e.from), Term::iri("pred_" + std::to_string(k)),
                       node_term(graph, e.to)});
    }
    return out;
}

std::string instantiate(const QueryTemplate& t, const std::map<std::string, std::string>& binding,
                        QueryForm form, const std::vector<Modifier>& mods) {
    auto lookup = [&](const std::string& placeholder) {
        auto it = binding.find(placeholder);
        if (it == binding.end()) throw MissingBindingError(placeholder);
        return it->second;
    };

    ParsedQuery q;
    q.form = form;
    if (form == QueryForm::Select) {
        if (!t.has_answer_var())
            throw Error("template has no answer variable to project");
        q.projection.push_back("uri");
    }
    for (const auto& p : t.placeholder_patterns()) {
        TriplePattern filled = p;
        if (!filled.subject.is_variable()) filled.subject = Term::iri(lookup(filled.subject.value));
        filled.predicate = Term::iri(lookup(filled.predicate.value));
        if (!filled.object.is_variable()) filled.object = Term::iri(lookup(filled.object.value));
        q.patterns.push_back(std::move(filled));
    }
    q.modifiers = mods;
    return render_query(q);
}

}  // namespace kgqa
