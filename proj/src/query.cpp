#include "pao/query.hpp"

#include <nlohmann/json.hpp>

#include <cctype>

#include <algorithm>
#include <map>
#include <set>

namespace pao {

namespace {

// ---------------------------------------------------------------- lexing

std::vector<std::string> lex(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    auto word_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == ':' || c == '-' || c == '?';
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '<') {
            size_t close = text.find('>', i);
            if (close == std::string::npos)
                throw QueryError("unterminated '<' term");
            out.push_back(text.substr(i + 1, close - i - 1));
            i = close + 1;
        } else if (c == '!' && i + 1 < text.size() && text[i + 1] == '=') {
            out.emplace_back("!=");
            i += 2;
        } else if (word_char(c) && c != '-') {
            size_t j = i;
            while (j < text.size() && word_char(text[j])) ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
        } else {
            out.push_back(std::string(1, c));
            ++i;
        }
    }
    return out;
}

struct Cursor {
    const std::vector<std::string>& toks;
    size_t pos = 0;

    bool done() const { return pos >= toks.size(); }
    const std::string& peek() const {
        static const std::string end = "<end of query>";
        return done() ? end : toks[pos];
    }
    std::string next() {
        if (done()) throw QueryError("unexpected end of query");
        return toks[pos++];
    }
    void expect(const std::string& t) {
        if (next() != t)
            throw QueryError("expected '" + t + "' before '" +
                             toks[pos - 1] + "'");
    }
    bool accept(const std::string& t) {
        if (!done() && toks[pos] == t) {
            ++pos;
            return true;
        }
        return false;
    }
};

StepSelector parse_selector(Cursor& c) {
    StepSelector s;
    std::string tok = c.next();
    if (tok == "any") {
        s.kind = StepSelector::Kind::Any;
    } else if (tok == "min") {
        s.kind = StepSelector::Kind::Min;
    } else if (!tok.empty() && tok[0] == '?') {
        s.var = tok.substr(1);
        if (c.accept("+")) {
            s.kind = StepSelector::Kind::Offset;
            s.offset = std::stoi(c.next());
            if (s.offset < 1 || s.offset > 3)
                throw QueryError("step offsets are limited to +1..+3");
        } else {
            s.kind = StepSelector::Kind::StepVar;
        }
    } else {
        s.kind = StepSelector::Kind::Label;
        s.label = tok;
    }
    c.expect(")");
    return s;
}

QueryBlock parse_block(Cursor& c) {
    QueryBlock b;
    c.expect("(");
    b.selector = parse_selector(c);
    c.expect("{");
    while (!c.accept("}")) {
        if (c.accept("FILTER")) {
            c.expect("(");
            Term left = Term::parse(c.next());
            c.expect("!=");
            Term right = Term::parse(c.next());
            c.expect(")");
            b.filters.push_back({left, right});
        } else {
            Triple t;
            t.subject = Term::parse(c.next());
            t.predicate = Term::parse(c.next());
            t.object = Term::parse(c.next());
            b.patterns.push_back(t);
        }
        c.accept(".");
    }
    return b;
}

TemporalQuery parse_one(Cursor& c) {
    TemporalQuery q;
    c.expect("SELECT");
    if (c.accept("*")) {
        q.star = true;
    } else {
        while (!c.peek().empty() && c.peek()[0] == '?')
            q.projection.push_back(c.next().substr(1));
        if (q.projection.empty())
            throw QueryError("SELECT needs '*' or at least one variable");
    }
    while (c.accept("WHERE-AT-STEP")) q.blocks.push_back(parse_block(c));
    if (q.blocks.empty())
        throw QueryError("a query needs at least one WHERE-AT-STEP block");
    std::string sv;
    for (const auto& b : q.blocks)
        if (!b.selector.var.empty()) {
            if (sv.empty()) sv = b.selector.var;
            if (b.selector.var != sv)
                throw QueryError("all step selectors must share one "
                                 "variable, got ?" + sv + " and ?" +
                                 b.selector.var);
        }
    return q;
}

// ------------------------------------------------------------- evaluation

using ClassKey = std::string; // "prefix:Name" via Term::str

std::map<ClassKey, std::set<ClassKey>> named_super_closure(
    const std::vector<Axiom>& tbox) {
    std::map<ClassKey, std::set<ClassKey>> up;
    auto key = [](const ClassExprPtr& e) {
        return Term::iri(e->prefix, e->name).str();
    };
    auto named = [](const ClassExprPtr& e) {
        return e && e->kind == ClassExpr::Kind::Named;
    };
    for (const auto& ax : tbox) {
        if (ax.kind == Axiom::Kind::SubClass && named(ax.lhs) &&
            named(ax.rhs))
            up[key(ax.lhs)].insert(key(ax.rhs));
        if (ax.kind == Axiom::Kind::Equivalent && named(ax.lhs) &&
            named(ax.rhs)) {
            up[key(ax.lhs)].insert(key(ax.rhs));
            up[key(ax.rhs)].insert(key(ax.lhs));
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [sub, supers] : up)
            for (const auto& s : std::set<ClassKey>(supers))
                if (auto it = up.find(s); it != up.end())
                    for (const auto& ss : it->second)
                        changed |= supers.insert(ss).second;
    }
    return up;
}

struct TraceView {
    std::vector<std::set<Triple>> roles;       // per step
    std::vector<std::set<Triple>> step_types;  // per step, closure-expanded
    std::set<Triple> union_types;              // trace-wide

    TraceView(const Trace& trace, const std::vector<Axiom>& tbox) {
        auto up = named_super_closure(tbox);
        for (const auto& snap : trace.snapshots) {
            std::set<Triple> r, ty;
            for (const auto& t : snap.triples) {
                if (t.predicate != type_predicate()) {
                    r.insert(t);
                    continue;
                }
                ty.insert(t);
                if (auto it = up.find(t.object.str()); it != up.end())
                    for (const auto& super : it->second)
                        ty.insert({t.subject, type_predicate(),
                                   Term::parse(super)});
            }
            roles.push_back(std::move(r));
            step_types.push_back(std::move(ty));
        }
        for (const auto& ty : step_types)
            union_types.insert(ty.begin(), ty.end());
    }

    Snapshot at(size_t k, bool per_step_types) const {
        Snapshot s;
        s.triples = roles[k];
        const auto& ty = per_step_types ? step_types[k] : union_types;
        s.triples.insert(ty.begin(), ty.end());
        return s;
    }
};

std::vector<Bindings> join_at(const TraceView& view, size_t k,
                              bool per_step_types, const QueryBlock& block,
                              const std::vector<Bindings>& seeds) {
    Snapshot state = view.at(k, per_step_types);
    std::vector<Bindings> out;
    for (const auto& seed : seeds) {
        auto sols = match_pattern(state, block.patterns, block.filters, seed);
        out.insert(out.end(), sols.begin(), sols.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::string TemporalQuery::step_var() const {
    for (const auto& b : blocks)
        if (!b.selector.var.empty()) return b.selector.var;
    return {};
}

bool TemporalQuery::projects_step() const {
    auto sv = step_var();
    if (sv.empty()) return false;
    return star || std::count(projection.begin(), projection.end(), sv) > 0;
}

TemporalQuery parse_query(const std::string& text) {
    auto toks = lex(text);
    Cursor c{toks};
    auto q = parse_one(c);
    if (!c.done())
        throw QueryError("trailing input after query: '" + c.peek() + "'");
    return q;
}

std::vector<TemporalQuery> parse_queries(const std::string& text) {
    auto toks = lex(text);
    Cursor c{toks};
    std::vector<TemporalQuery> out;
    while (!c.done()) out.push_back(parse_one(c));
    return out;
}

AnswerSet evaluate(const TemporalQuery& query, const Trace& trace,
                   const std::vector<Axiom>& tbox) {
    AnswerSet answer;
    answer.vars = query.projection;
    const size_t steps = trace.snapshots.size();
    if (steps == 0) return answer;

    TraceView view(trace, tbox);
    const bool per_step_types = query.projects_step();
    const std::string sv = query.step_var();

    std::vector<long> candidates;
    if (sv.empty())
        candidates.push_back(-1);
    else
        for (size_t n = 0; n < steps; ++n) candidates.push_back(long(n));

    std::set<Bindings> rows;
    std::set<std::string> star_vars;
    for (long n : candidates) {
        std::vector<Bindings> sols{{}};
        for (const auto& block : query.blocks) {
            switch (block.selector.kind) {
            case StepSelector::Kind::StepVar:
                sols = join_at(view, size_t(n), per_step_types, block, sols);
                break;
            case StepSelector::Kind::Offset: {
                size_t k = size_t(n) + size_t(block.selector.offset);
                sols = k < steps ? join_at(view, k, per_step_types, block,
                                           sols)
                                 : std::vector<Bindings>{};
                break;
            }
            case StepSelector::Kind::Label: {
                size_t k = steps;
                for (size_t i = 0; i < steps; ++i)
                    if (trace.snapshots[i].label == block.selector.label)
                        k = i;
                if (k == steps)
                    throw QueryError("no step labeled '" +
                                     block.selector.label + "'");
                sols = join_at(view, k, per_step_types, block, sols);
                break;
            }
            case StepSelector::Kind::Any: {
                std::vector<Bindings> merged;
                for (size_t k = 0; k < steps; ++k) {
                    auto part = join_at(view, k, per_step_types, block, sols);
                    merged.insert(merged.end(), part.begin(), part.end());
                }
                std::sort(merged.begin(), merged.end());
                merged.erase(std::unique(merged.begin(), merged.end()),
                             merged.end());
                sols = std::move(merged);
                break;
            }
            case StepSelector::Kind::Min: {
                std::vector<Bindings> first;
                for (size_t k = 0; k < steps && first.empty(); ++k)
                    first = join_at(view, k, per_step_types, block, sols);
                sols = std::move(first);
                break;
            }
            }
            if (sols.empty()) break;
        }
        for (auto& sol : sols) {
            if (!sv.empty())
                sol[sv] = Term::iri("", trace.snapshots[size_t(n)].label);
            Bindings row;
            if (query.star) {
                row = sol;
                for (const auto& [v, _] : sol) star_vars.insert(v);
            } else {
                for (const auto& v : query.projection) {
                    auto it = sol.find(v);
                    if (it == sol.end())
                        throw QueryError("projected variable ?" + v +
                                         " is not bound by any pattern");
                    row[v] = it->second;
                }
            }
            rows.insert(std::move(row));
        }
    }
    if (query.star)
        answer.vars.assign(star_vars.begin(), star_vars.end());
    answer.rows.assign(rows.begin(), rows.end());
    return answer;
}

std::string render_answers(const TemporalQuery& query, const AnswerSet& a) {
    if (query.star) return a.nonempty() ? "yes\n" : "no\n";
    if (a.rows.empty()) return "(no answers)\n";
    std::string out;
    for (const auto& row : a.rows) {
        bool first = true;
        for (const auto& v : a.vars) {
            out += (first ? "" : ", ") + ("?" + v) + " = " +
                   row.at(v).str();
            first = false;
        }
        out += "\n";
    }
    return out;
}

std::string answers_to_json(const TemporalQuery& query, const AnswerSet& a) {
    nlohmann::json j;
    j["vars"] = a.vars;
    j["boolean"] = query.star;
    if (query.star) j["answer"] = a.nonempty();
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& row : a.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (const auto& [v, term] : row) r[v] = term.str();
        rows.push_back(std::move(r));
    }
    return j.dump(2);
}

} // namespace pao
