#include "pao/exec.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pao {

namespace {

struct EntailmentRules {
    std::map<std::string, std::set<std::string>> super_roles; // closed
    std::map<std::string, ClassExprPtr> domains;              // Named only
    std::map<std::string, ClassExprPtr> ranges;               // Named only

    explicit EntailmentRules(const std::vector<Axiom>& tbox) {
        for (const auto& ax : tbox) {
            if (ax.kind == Axiom::Kind::SubProperty)
                super_roles[ax.role].insert(ax.role2);
            if (ax.kind == Axiom::Kind::Domain &&
                ax.lhs->kind == ClassExpr::Kind::Named)
                domains[ax.role] = ax.lhs;
            if (ax.kind == Axiom::Kind::Range &&
                ax.lhs->kind == ClassExpr::Kind::Named)
                ranges[ax.role] = ax.lhs;
        }
        // transitive closure
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& [sub, supers] : super_roles)
                for (const auto& s : std::set<std::string>(supers))
                    if (auto it = super_roles.find(s); it != super_roles.end())
                        for (const auto& ss : it->second)
                            changed |= supers.insert(ss).second;
        }
    }
};

Term class_term(const ClassExprPtr& named) {
    return Term::iri(named->prefix, named->name);
}

// Fixed-point entailment over one snapshot; returns the added triples
// with their provenance notes.
std::vector<std::pair<Triple, std::string>> entail(Snapshot& snap,
                                                   const EntailmentRules& r) {
    std::vector<std::pair<Triple, std::string>> added;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<Triple, std::string>> pending;
        for (const auto& t : snap.triples) {
            if (t.predicate == type_predicate()) continue;
            const std::string& role = t.predicate.name;
            if (auto it = r.super_roles.find(role); it != r.super_roles.end())
                for (const auto& super : it->second) {
                    Triple s{t.subject, Term::iri("", super), t.object};
                    if (!snap.contains(s))
                        pending.emplace_back(
                            s, "Entailed by the subproperty axiom " + role +
                                   " => " + super + ".");
                }
            if (auto it = r.domains.find(role); it != r.domains.end()) {
                Triple s{t.subject, type_predicate(), class_term(it->second)};
                if (!snap.contains(s))
                    pending.emplace_back(s, "Entailed by domain of the "
                                            "property " + role + ".");
            }
            if (auto it = r.ranges.find(role); it != r.ranges.end()) {
                Triple s{t.object, type_predicate(), class_term(it->second)};
                if (!snap.contains(s))
                    pending.emplace_back(s, "Entailed by range of the "
                                            "property " + role + ".");
            }
        }
        for (auto& [t, note] : pending) {
            if (snap.triples.insert(t).second) {
                snap.implicit.insert(t);
                added.emplace_back(t, note);
                changed = true;
            }
        }
    }
    return added;
}

KnowledgeBase snapshot_kb(const Snapshot& snap,
                          const std::vector<Axiom>& tbox) {
    KnowledgeBase kb;
    kb.tbox = tbox;
    for (const auto& t : snap.triples) {
        if (t.predicate == type_predicate())
            kb.abox.assert_type(t.subject, ClassExpr::named(t.object.prefix,
                                                            t.object.name));
        else
            kb.abox.assert_role(t.subject, t.predicate.name, t.object);
    }
    return kb;
}

struct SimResult {
    Trace trace;
    std::vector<LabeledOp> implicit_ops;
    std::vector<std::pair<size_t, Triple>> missing; // step index, triple
};

SimResult simulate(const std::vector<LabeledOp>& ops,
                   const std::map<std::string, std::vector<LabeledOp>>& planned,
                   const EntailmentRules& rules, const std::vector<Axiom>& tbox,
                   const Reasoner* guard, bool strict) {
    SimResult out;
    Snapshot state;
    for (size_t k = 0; k < ops.size(); ++k) {
        const LabeledOp& lop = ops[k];
        for (const auto& pre : lop.op.ground_preconditions)
            if (!state.contains(pre)) {
                if (strict)
                    throw PreconditionUnsatisfiable(lop.label, pre.str());
                out.missing.emplace_back(k, pre);
            }
        if (!lop.op.where.empty() &&
            match_pattern(state, lop.op.where, lop.op.filters).empty()) {
            if (strict) throw WhereUnmatched(lop.label);
        }
        Snapshot next = apply_update(state, lop.op);
        next.label = lop.label;
        if (auto it = planned.find(lop.label); it != planned.end())
            for (const auto& pop : it->second) {
                for (const auto& t : pop.op.inserts) {
                    next.triples.insert(t);
                    next.implicit.insert(t);
                }
                out.implicit_ops.push_back(pop);
            }
        for (auto& [t, note] : entail(next, rules)) {
            LabeledOp imp;
            imp.label = lop.label;
            imp.op.inserts.push_back(t);
            imp.op.provenance = UpdateOp::Provenance::Entailed;
            imp.note = note;
            out.implicit_ops.push_back(std::move(imp));
        }
        if (strict && guard &&
            !guard->is_consistent(snapshot_kb(next, tbox)))
            throw StepInconsistent(lop.label);
        out.trace.snapshots.push_back(next);
        state = std::move(next);
    }
    return out;
}

void note_mentions(const Trace& trace, std::map<Term, size_t>& first_mention,
                   std::map<Term, size_t>& first_typed) {
    for (size_t k = 0; k < trace.snapshots.size(); ++k)
        for (const auto& t : trace.snapshots[k].triples) {
            auto note = [&](const Term& term) {
                if (term.kind == Term::Kind::Anon &&
                    !first_mention.count(term))
                    first_mention[term] = k;
            };
            note(t.subject);
            note(t.object);
            if (t.predicate == type_predicate() &&
                !first_typed.count(t.subject))
                first_typed[t.subject] = k;
        }
}

} // namespace

std::vector<LabeledOp> compile_atoms(
    const std::vector<ParaphraseAtom>& atoms,
    const std::vector<ProceduralTemplate>& templates) {
    std::vector<LabeledOp> ops;
    for (const auto& atom : atoms) {
        LabeledOp lop;
        lop.label = atom.label;
        if (atom.kind == ParaphraseAtom::Kind::Invocation) {
            if (atom.chosen_template < 0)
                throw TemplateError("atom " + atom.label +
                                    " has no resolved template");
            const ProceduralTemplate* tpl = find_template(
                templates,
                atom.template_candidates[size_t(atom.chosen_template)]);
            if (!tpl)
                throw TemplateError("unknown template for atom " + atom.label);
            std::map<std::string, Term> bindings;
            for (const auto& [slot, term] : atom.slots) bindings[slot] = term;
            lop.op = compile_invocation(*tpl, bindings);
        } else {
            lop.op = compile_assertion(atom);
        }
        ops.push_back(std::move(lop));
    }
    return ops;
}

ExecResult run(const std::vector<LabeledOp>& ops,
               const std::vector<Axiom>& tbox, const Reasoner& reasoner) {
    EntailmentRules rules(tbox);

    // Discovery pass: find ground preconditions the narrative never
    // establishes, then plant each at the earliest step where all of its
    // already-introduced constants are introduced and typed. Constants
    // the consuming step itself introduces need no earlier placement.
    std::map<std::string, std::vector<LabeledOp>> planned;
    std::set<Triple> planted;
    for (int round = 0;; ++round) {
        auto dry = simulate(ops, planned, rules, tbox, nullptr, false);
        if (dry.missing.empty()) break;
        if (round == 8)
            throw PreconditionUnsatisfiable(ops[dry.missing[0].first].label,
                                            dry.missing[0].second.str());
        std::map<Term, size_t> first_mention, first_typed;
        note_mentions(dry.trace, first_mention, first_typed);
        for (const auto& [k, triple] : dry.missing) {
            if (!planted.insert(triple).second)
                throw PreconditionUnsatisfiable(ops[k].label, triple.str());
            size_t placement = 0;
            bool anchored = false;
            for (const Term* c : {&triple.subject, &triple.object}) {
                if (c->kind != Term::Kind::Anon) continue;
                auto m = first_mention.find(*c);
                if (m == first_mention.end() || m->second >= k)
                    continue; // introduced by the consuming step itself
                size_t at = first_typed.count(*c) ? first_typed.at(*c)
                                                  : m->second;
                placement = std::max(placement, at);
                anchored = true;
            }
            // No earlier step can host the triple: every constant it
            // mentions first appears at or after the consuming step.
            if (!anchored || placement >= k)
                throw PreconditionUnsatisfiable(ops[k].label, triple.str());
            LabeledOp imp;
            imp.label = ops[placement].label;
            imp.op.inserts.push_back(triple);
            imp.op.provenance = UpdateOp::Provenance::Planned;
            imp.note = "Inserted by planning because of procedural template "
                       "precondition at step " + ops[k].label + ".";
            planned[imp.label].push_back(std::move(imp));
        }
    }

    auto final = simulate(ops, planned, rules, tbox, &reasoner, true);
    return {std::move(final.trace), std::move(final.implicit_ops)};
}

std::string render_update(const UpdateOp& op) {
    auto block = [](const char* kw, const std::vector<Triple>& ts) {
        if (ts.empty()) return std::string{};
        std::string out = std::string(kw) + " {";
        for (size_t i = 0; i < ts.size(); ++i)
            out += (i ? ". " : "") + ts[i].str();
        return out + "} ";
    };
    std::string out = block("DELETE", op.deletes) + block("INSERT", op.inserts);
    if (!op.where.empty() || !op.filters.empty()) {
        out += "WHERE {";
        for (size_t i = 0; i < op.where.size(); ++i)
            out += (i ? ". " : "") + op.where[i].str();
        for (const auto& f : op.filters)
            out += ". FILTER (" + f.left.str() + " != " + f.right.str() + ")";
        out += "} ";
    }
    if (out.empty()) return "(no-op)";
    out.pop_back();
    return out;
}

std::string exec_report(const std::vector<LabeledOp>& ops,
                        const ExecResult& result) {
    std::string out;
    for (const auto& lop : ops) {
        out += lop.label + "\t" + render_update(lop.op) + "\n";
        for (const auto& imp : result.implicit_ops)
            if (imp.label == lop.label)
                out += "\t\t" + render_update(imp.op) + "  " + imp.note + "\n";
    }
    return out;
}

} // namespace pao
