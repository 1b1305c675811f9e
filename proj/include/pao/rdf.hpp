#pragma once
// Terms, triples, snapshots and the snapshot-sequence trace.
//
// Snapshots are immutable values; an execution trace is an ordered
// sequence of them, one per narrative step, so temporal queries can
// address any historical state directly.

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pao {

struct Term {
    enum class Kind { Iri, Var, Anon };

    Kind kind = Kind::Iri;
    std::string prefix;  // namespace id, empty for global properties
    std::string name;    // local name or variable name
    int64_t anon_id = 0; // discourse id for anonymous terms

    static Term iri(std::string prefix, std::string local) {
        Term t;
        t.kind = Kind::Iri;
        t.prefix = std::move(prefix);
        t.name = std::move(local);
        return t;
    }
    static Term var(std::string name) {
        Term t;
        t.kind = Kind::Var;
        t.name = std::move(name);
        return t;
    }
    static Term anon(int64_t id) {
        Term t;
        t.kind = Kind::Anon;
        t.anon_id = id;
        return t;
    }

    bool is_var() const { return kind == Kind::Var; }

    auto operator<=>(const Term&) const = default;

    std::string str() const {
        switch (kind) {
        case Kind::Var: return "?" + name;
        case Kind::Anon: return "obj" + std::to_string(anon_id);
        case Kind::Iri: return prefix.empty() ? name : prefix + ":" + name;
        }
        return {};
    }

    // Parses the serialized forms produced by str().
    static Term parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("empty term");
        if (s[0] == '?') return var(s.substr(1));
        if (s.rfind("obj", 0) == 0 && s.size() > 3 &&
            s.find_first_not_of("0123456789", 3) == std::string::npos)
            return anon(std::stoll(s.substr(3)));
        auto colon = s.find(':');
        if (colon == std::string::npos) return iri("", s);
        return iri(s.substr(0, colon), s.substr(colon + 1));
    }
};

// rdf:type predicate used for class-membership triples.
inline Term type_predicate() { return Term::iri("rdf", "type"); }

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;

    bool has_vars() const {
        return subject.is_var() || predicate.is_var() || object.is_var();
    }

    std::string str() const {
        return subject.str() + " " + predicate.str() + " " + object.str();
    }
};

using Bindings = std::map<std::string, Term>;

struct Snapshot {
    std::string label;
    std::set<Triple> triples;
    std::set<Triple> implicit; // entailed-or-planned subset of triples

    bool contains(const Triple& t) const { return triples.count(t) > 0; }
};

struct Trace {
    std::vector<Snapshot> snapshots;

    bool empty() const { return snapshots.empty(); }
    const Snapshot* find(const std::string& label) const {
        for (const auto& s : snapshots)
            if (s.label == label) return &s;
        return nullptr;
    }
};

// Inequality filter ?v != term (either side may be a variable).
struct Filter {
    Term left;
    Term right;
};

// A compiled SPARQL/UL-style update: deletes applied before inserts,
// where-patterns bind the remaining variables against the current state.
struct UpdateOp {
    enum class Provenance { Explicit, Entailed, Planned };

    std::vector<Triple> deletes;
    std::vector<Triple> inserts;
    std::vector<Triple> where;
    std::vector<Filter> filters;
    // Ground positive precondition atoms checked (and plannable) by the
    // executor rather than matched as where-patterns.
    std::vector<Triple> ground_preconditions;
    Provenance provenance = Provenance::Explicit;

    bool empty() const {
        return deletes.empty() && inserts.empty() && where.empty() &&
               filters.empty() && ground_preconditions.empty();
    }
};

struct UnboundVariable : std::runtime_error {
    explicit UnboundVariable(const std::string& v)
        : std::runtime_error("unbound variable ?" + v) {}
};

Term substitute(const Term& t, const Bindings& b);
Triple substitute(const Triple& t, const Bindings& b);

// All binding maps under which every pattern grounds to a triple of the
// snapshot and every filter holds. The empty pattern yields one empty
// binding.
std::vector<Bindings> match_pattern(const Snapshot& snapshot,
                                    const std::vector<Triple>& pattern,
                                    const std::vector<Filter>& filters = {},
                                    const Bindings& seed = {});

// Applies one update: where-evaluation extends the seed bindings, all
// grounded deletes are removed, then all grounded inserts added. The
// input snapshot is left untouched.
Snapshot apply_update(const Snapshot& snapshot, const UpdateOp& op,
                      const Bindings& bindings = {});

// Trace export: JSON document and the one-line-per-triple quad text form.
std::string trace_to_json(const Trace& trace);
Trace trace_from_json(const std::string& json_text);
std::string trace_to_quads(const Trace& trace);

} // namespace pao
