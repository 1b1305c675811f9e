#include "pao/rdf.hpp"

#include <nlohmann/json.hpp>

namespace pao {

Term substitute(const Term& t, const Bindings& b) {
    if (!t.is_var()) return t;
    auto it = b.find(t.name);
    return it == b.end() ? t : it->second;
}

Triple substitute(const Triple& t, const Bindings& b) {
    return {substitute(t.subject, b), substitute(t.predicate, b),
            substitute(t.object, b)};
}

namespace {

bool filters_hold(const std::vector<Filter>& filters, const Bindings& b) {
    for (const auto& f : filters) {
        Term l = substitute(f.left, b);
        Term r = substitute(f.right, b);
        if (l.is_var() || r.is_var()) continue; // undecided yet
        if (l == r) return false;
    }
    return true;
}

void match_rec(const Snapshot& snapshot, const std::vector<Triple>& pattern,
               size_t idx, const std::vector<Filter>& filters, Bindings& cur,
               std::vector<Bindings>& out) {
    if (idx == pattern.size()) {
        if (filters_hold(filters, cur)) out.push_back(cur);
        return;
    }
    Triple p = substitute(pattern[idx], cur);
    for (const auto& t : snapshot.triples) {
        Bindings next = cur;
        auto unify = [&next](const Term& pat, const Term& val) {
            if (pat.is_var()) {
                auto it = next.find(pat.name);
                if (it != next.end()) return it->second == val;
                next[pat.name] = val;
                return true;
            }
            return pat == val;
        };
        if (!unify(p.subject, t.subject)) continue;
        if (!unify(p.predicate, t.predicate)) continue;
        if (!unify(p.object, t.object)) continue;
        if (!filters_hold(filters, next)) continue;
        match_rec(snapshot, pattern, idx + 1, filters, next, out);
    }
}

} // namespace

std::vector<Bindings> match_pattern(const Snapshot& snapshot,
                                    const std::vector<Triple>& pattern,
                                    const std::vector<Filter>& filters,
                                    const Bindings& seed) {
    std::vector<Bindings> out;
    Bindings cur = seed;
    match_rec(snapshot, pattern, 0, filters, cur, out);
    // Deterministic order independent of match order.
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Snapshot apply_update(const Snapshot& snapshot, const UpdateOp& op,
                      const Bindings& bindings) {
    std::vector<Bindings> solutions;
    if (op.where.empty()) {
        solutions.push_back(bindings);
    } else {
        solutions = match_pattern(snapshot, op.where, op.filters, bindings);
    }

    auto ground = [](const Triple& t, const Bindings& b) {
        Triple g = substitute(t, b);
        if (g.subject.is_var()) throw UnboundVariable(g.subject.name);
        if (g.predicate.is_var()) throw UnboundVariable(g.predicate.name);
        if (g.object.is_var()) throw UnboundVariable(g.object.name);
        return g;
    };

    Snapshot result = snapshot;
    for (const auto& sol : solutions)
        for (const auto& d : op.deletes) {
            Triple g = ground(d, sol);
            result.triples.erase(g);
            result.implicit.erase(g);
        }
    for (const auto& sol : solutions)
        for (const auto& i : op.inserts) result.triples.insert(ground(i, sol));
    return result;
}

namespace {

nlohmann::json triple_json(const Triple& t) {
    return nlohmann::json::array(
        {t.subject.str(), t.predicate.str(), t.object.str()});
}

Triple triple_from_json(const nlohmann::json& j) {
    return {Term::parse(j.at(0).get<std::string>()),
            Term::parse(j.at(1).get<std::string>()),
            Term::parse(j.at(2).get<std::string>())};
}

} // namespace

std::string trace_to_json(const Trace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.snapshots) {
        nlohmann::json triples = nlohmann::json::array();
        nlohmann::json implicit = nlohmann::json::array();
        for (const auto& t : s.triples) triples.push_back(triple_json(t));
        for (const auto& t : s.implicit) implicit.push_back(triple_json(t));
        steps.push_back({{"label", s.label},
                         {"triples", std::move(triples)},
                         {"implicit", std::move(implicit)}});
    }
    return nlohmann::json{{"steps", std::move(steps)}}.dump(2);
}

Trace trace_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    Trace trace;
    for (const auto& step : j.at("steps")) {
        Snapshot s;
        s.label = step.at("label").get<std::string>();
        for (const auto& t : step.at("triples"))
            s.triples.insert(triple_from_json(t));
        for (const auto& t : step.at("implicit"))
            s.implicit.insert(triple_from_json(t));
        trace.snapshots.push_back(std::move(s));
    }
    return trace;
}

std::string trace_to_quads(const Trace& trace) {
    std::string out;
    for (const auto& s : trace.snapshots)
        for (const auto& t : s.triples)
            out += t.str() + " " + s.label + " .\n";
    return out;
}

} // namespace pao
