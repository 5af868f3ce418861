#pragma once

// Shared generators for property-style tests: random labeled BGP graphs,
// random toy triple stores, and a naive cross-product BGP evaluator used
// as the oracle for the indexed join.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgqa/bgp.hpp"
#include "kgqa/sparql.hpp"
#include "kgqa/triple_store.hpp"

namespace testgen {

// Random connected-ish labeled graph with <= max_edges edges and at most
// one ANSWER_VAR node.
inline kgqa::BgpGraph random_bgp_graph(std::mt19937& rng, int max_edges = 5) {
    std::uniform_int_distribution<int> edge_count(1, max_edges);
    int edges = edge_count(rng);
    int max_nodes = std::min(edges + 1, 6);
    std::uniform_int_distribution<int> node_count(std::max(1, edges > 1 ? 2 : 1), max_nodes);
    int nodes = node_count(rng);

    kgqa::BgpGraph g;
    bool answer_used = false;
    std::uniform_int_distribution<int> label_pick(0, 2);
    for (int i = 0; i < nodes; ++i) {
        int l = label_pick(rng);
        if (l == 0 && !answer_used) {
            g.nodes.push_back(kgqa::NodeLabel::AnswerVar);
            answer_used = true;
        } else if (l == 1) {
            g.nodes.push_back(kgqa::NodeLabel::Entity);
        } else {
            g.nodes.push_back(kgqa::NodeLabel::OtherVar);
        }
    }
    std::uniform_int_distribution<int> node_pick(0, nodes - 1);
    for (int i = 0; i < edges; ++i)
        g.edges.push_back({node_pick(rng), node_pick(rng)});
    return g;
}

// Relabels/permutes a graph; the result is isomorphic by construction.
inline kgqa::BgpGraph shuffled_copy(const kgqa::BgpGraph& g, std::mt19937& rng) {
    std::vector<int> perm(g.nodes.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::shuffle(perm.begin(), perm.end(), rng);
    kgqa::BgpGraph out;
    out.nodes.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) out.nodes[perm[i]] = g.nodes[i];
    for (const auto& e : g.edges) out.edges.push_back({perm[e.from], perm[e.to]});
    std::shuffle(out.edges.begin(), out.edges.end(), rng);
    return out;
}

// Random store over a small vocabulary so patterns join non-trivially.
inline kgqa::TripleStore random_store(std::mt19937& rng, int max_triples = 200) {
    std::uniform_int_distribution<int> size_dist(20, max_triples);
    std::uniform_int_distribution<int> subj(0, 11), pred(0, 4), obj(0, 13);
    int n = size_dist(rng);
    kgqa::TripleStore store;
    for (int i = 0; i < n; ++i) {
        store.add(kgqa::Term::iri("http://t/s" + std::to_string(subj(rng))),
                  kgqa::Term::iri("http://t/p" + std::to_string(pred(rng))),
                  kgqa::Term::iri("http://t/o" + std::to_string(obj(rng))));
    }
    return store;
}

// Random BGP over the same vocabulary; variables drawn from a small pool.
inline kgqa::ParsedQuery random_bgp_query(std::mt19937& rng, int max_patterns = 3) {
    std::uniform_int_distribution<int> pat_count(1, max_patterns);
    std::uniform_int_distribution<int> coin(0, 99);
    std::uniform_int_distribution<int> subj(0, 11), pred(0, 4), obj(0, 13), var(0, 3);
    const char* var_names[] = {"a", "b", "c", "d"};

    kgqa::ParsedQuery q;
    q.form = kgqa::QueryForm::Select;
    int n = pat_count(rng);
    for (int i = 0; i < n; ++i) {
        kgqa::TriplePattern p;
        p.subject = coin(rng) < 45 ? kgqa::Term::variable(var_names[var(rng)])
                                   : kgqa::Term::iri("http://t/s" + std::to_string(subj(rng)));
        p.predicate = coin(rng) < 30 ? kgqa::Term::variable(var_names[var(rng)])
                                     : kgqa::Term::iri("http://t/p" + std::to_string(pred(rng)));
        p.object = coin(rng) < 45 ? kgqa::Term::variable(var_names[var(rng)])
                                  : kgqa::Term::iri("http://t/o" + std::to_string(obj(rng)));
        q.patterns.push_back(std::move(p));
    }
    // project the first variable that occurs; fall back to ASK if none
    for (const auto& p : q.patterns) {
        for (const auto* t : {&p.subject, &p.predicate, &p.object}) {
            if (t->is_variable()) {
                q.projection.push_back(t->value);
                return q;
            }
        }
    }
    q.form = kgqa::QueryForm::Ask;
    return q;
}

// Naive oracle: enumerate the full cross product of matching triples per
// pattern and keep consistent assignments. Independent of the join code.
inline std::set<std::string> oracle_select(const kgqa::TripleStore& store,
                                           const kgqa::ParsedQuery& q) {
    using namespace kgqa;
    std::vector<Triple> all(store.triples().begin(), store.triples().end());

    auto term_matches = [](const Term& pattern_term, const Term& value,
                           std::map<std::string, Term>& bound) {
        if (!pattern_term.is_variable()) return pattern_term == value;
        auto it = bound.find(pattern_term.value);
        if (it == bound.end()) {
            bound.emplace(pattern_term.value, value);
            return true;
        }
        return it->second == value;
    };

    std::set<std::string> results;
    if (all.empty()) return results;

    std::vector<std::size_t> idx(q.patterns.size(), 0);
    while (true) {
        std::map<std::string, Term> bound;
        bool ok = true;
        for (std::size_t i = 0; ok && i < q.patterns.size(); ++i) {
            const auto& t = all[idx[i]];
            const auto& p = q.patterns[i];
            ok = term_matches(p.subject, t.subject, bound) &&
                 term_matches(p.predicate, t.predicate, bound) &&
                 term_matches(p.object, t.object, bound);
        }
        if (ok && !q.projection.empty()) {
            auto it = bound.find(q.projection.front());
            if (it != bound.end()) results.insert(term_to_sparql(it->second));
        }
        if (ok && q.projection.empty()) results.insert("true");
        // odometer increment
        std::size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < all.size()) break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) break;
    }
    return results;
}

}  // namespace testgen
