#include "pao/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

namespace pao {

namespace {

using K = ClassExpr::Kind;
using ExprSet = std::set<ClassExprPtr, ClassExprLess>;

std::string named_key(const ClassExprPtr& e) {
    return e->prefix + ":" + e->name;
}

ClassExprPtr mk_or(const ClassExprPtr& a, const ClassExprPtr& b) {
    if (a->kind == K::Bottom) return b;
    if (b->kind == K::Bottom) return a;
    if (a->kind == K::Top || b->kind == K::Top) return ClassExpr::top();
    return ClassExpr::disj({a, b});
}

void collect_named(const ClassExprPtr& e, ExprSet& out) {
    if (!e) return;
    if (e->kind == K::Named) out.insert(e);
    for (const auto& a : e->args) collect_named(a, out);
}

void collect_roles(const ClassExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == K::Exists || e->kind == K::Forall) out.insert(e->role);
    for (const auto& a : e->args) collect_roles(a, out);
}

// Preprocessed TBox: lazy-unfolding rules for named classes plus the
// residue of general axioms internalized into per-node disjunctions.
struct Compiled {
    std::map<std::string, std::vector<ClassExprPtr>> unfold;
    std::vector<ClassExprPtr> globals;
    std::map<std::string, std::set<std::string>> supers; // role closure
};

std::vector<ClassExprPtr> flatten_and(const ClassExprPtr& e) {
    std::vector<ClassExprPtr> out;
    std::function<void(const ClassExprPtr&)> go = [&](const ClassExprPtr& x) {
        if (x->kind == K::And)
            for (const auto& a : x->args) go(a);
        else
            out.push_back(x);
    };
    go(e);
    return out;
}

ClassExprPtr re_and(std::vector<ClassExprPtr> parts) {
    if (parts.empty()) return ClassExpr::top();
    if (parts.size() == 1) return parts[0];
    return ClassExpr::conj(std::move(parts));
}

// Absorption: GCIs with a named class on the left become unfolding rules,
// Or-left splits, And-left picks a named conjunct; everything else stays
// a global constraint.
void absorb(Compiled& c, const ClassExprPtr& l, const ClassExprPtr& r) {
    if (l->kind == K::Named) {
        c.unfold[named_key(l)].push_back(normalize(r));
        return;
    }
    if (l->kind == K::Or) {
        for (const auto& m : l->args) absorb(c, m, r);
        return;
    }
    if (l->kind == K::And) {
        auto parts = flatten_and(l);
        for (size_t i = 0; i < parts.size(); ++i) {
            if (parts[i]->kind == K::Or) {
                auto disjuncts = parts[i]->args;
                for (const auto& d : disjuncts) {
                    auto rest = parts;
                    rest[i] = d;
                    absorb(c, re_and(rest), r);
                }
                return;
            }
        }
        for (size_t i = 0; i < parts.size(); ++i) {
            if (parts[i]->kind == K::Named) {
                auto rest = parts;
                rest.erase(rest.begin() + i);
                auto residue =
                    mk_or(r, ClassExpr::negation(re_and(std::move(rest))));
                c.unfold[named_key(parts[i])].push_back(normalize(residue));
                return;
            }
        }
    }
    c.globals.push_back(normalize(mk_or(ClassExpr::negation(l), r)));
}

Compiled compile(const std::vector<Axiom>& tbox) {
    Compiled c;
    c.supers = Reasoner::role_closure(tbox);
    for (const auto& ax : tbox) {
        switch (ax.kind) {
        case Axiom::Kind::SubClass:
            absorb(c, ax.lhs, ax.rhs);
            break;
        case Axiom::Kind::Equivalent:
            absorb(c, ax.lhs, ax.rhs);
            absorb(c, ax.rhs, ax.lhs);
            break;
        case Axiom::Kind::Disjoint:
            absorb(c, ClassExpr::conj({ax.lhs, ax.rhs}), ClassExpr::bottom());
            break;
        case Axiom::Kind::SubProperty:
            break; // role closure only
        case Axiom::Kind::Domain:
            absorb(c, ClassExpr::exists(ax.role, false, ClassExpr::top()),
                   ax.lhs);
            break;
        case Axiom::Kind::Range:
            absorb(c, ClassExpr::exists(ax.role, true, ClassExpr::top()),
                   ax.lhs);
            break;
        }
    }
    return c;
}

struct Node {
    ExprSet label;
    int parent = -1; // tree predecessor, -1 for ABox roots
    bool root = false;
};

struct Edge {
    int from;
    int to;
    std::string role;
};

struct Tableau {
    const Compiled* kb = nullptr;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::deque<std::pair<int, ClassExprPtr>> todo;
    bool clash = false;

    bool sub_role(const std::string& s, const std::string& r) const {
        if (s == r) return true;
        auto it = kb->supers.find(s);
        return it != kb->supers.end() && it->second.count(r) > 0;
    }

    void add(int n, const ClassExprPtr& e) {
        if (clash) return;
        if (e->kind == K::Top) return;
        if (!nodes[n].label.insert(e).second) return;
        todo.emplace_back(n, e);
    }

    void add_globals(int n) {
        for (const auto& g : kb->globals) add(n, g);
    }

    bool has(int n, const ClassExprPtr& e) const {
        return nodes[n].label.count(e) > 0;
    }

    // Successor semantics with inverse handling: y is an r-neighbor of x
    // if there is an s-edge x->y with s [= r, or (inverse) an s-edge y->x.
    template <typename F>
    void for_neighbors(int n, const std::string& role, bool inverse,
                       F&& fn) const {
        for (const auto& e : edges) {
            if (!inverse && e.from == n && sub_role(e.role, role)) fn(e.to);
            if (inverse && e.to == n && sub_role(e.role, role)) fn(e.from);
        }
    }

    void propagate_foralls_over_edge(const Edge& e) {
        // forall(r) at the source reaches the target; forall(r, inverse)
        // at the target reaches the source.
        auto from_label = nodes[e.from].label; // copy: add() mutates
        for (const auto& c : from_label)
            if (c->kind == K::Forall && !c->inverse && sub_role(e.role, c->role))
                add(e.to, c->args[0]);
        auto to_label = nodes[e.to].label;
        for (const auto& c : to_label)
            if (c->kind == K::Forall && c->inverse && sub_role(e.role, c->role))
                add(e.from, c->args[0]);
    }

    void add_edge(int from, int to, const std::string& role) {
        edges.push_back({from, to, role});
        propagate_foralls_over_edge(edges.back());
    }

    bool blocked(int n) const {
        if (nodes[n].root) return false;
        const auto& label = nodes[n].label;
        for (int a = nodes[n].parent; a != -1; a = nodes[a].parent) {
            const auto& al = nodes[a].label;
            if (std::includes(al.begin(), al.end(), label.begin(), label.end(),
                              ClassExprLess{}))
                return true;
        }
        return false;
    }

    bool exists_satisfied(int n, const ClassExprPtr& e) const {
        bool found = false;
        bool any = e->args[0]->kind == K::Top; // Top is never stored in labels
        for_neighbors(n, e->role, e->inverse, [&](int m) {
            if (any || has(m, e->args[0])) found = true;
        });
        return found;
    }

    void saturate() {
        while (!todo.empty() && !clash) {
            auto [n, e] = todo.front();
            todo.pop_front();
            switch (e->kind) {
            case K::Bottom:
                clash = true;
                break;
            case K::Named:
                if (has(n, ClassExpr::negation(e))) {
                    clash = true;
                    break;
                }
                if (auto it = kb->unfold.find(named_key(e));
                    it != kb->unfold.end())
                    for (const auto& u : it->second) add(n, u);
                break;
            case K::Not: // NNF: argument is Named
                if (has(n, e->args[0])) clash = true;
                break;
            case K::And:
                for (const auto& a : e->args) add(n, a);
                break;
            case K::Or:
                break; // handled by the branching phase
            case K::Forall: {
                auto filler = e->args[0];
                std::vector<int> targets;
                for_neighbors(n, e->role, e->inverse,
                              [&](int m) { targets.push_back(m); });
                for (int m : targets) add(m, filler);
                break;
            }
            case K::Exists:
            case K::Top:
                break; // Exists handled after saturation
            }
        }
    }
};

class Solver {
public:
    Solver(const Compiled& kb, size_t budget) : kb_(kb), budget_(budget) {}

    bool solve(Tableau t, size_t depth = 0) {
        // Disjunction branching recurses without creating nodes, so cap
        // the recursion depth as part of the budget contract.
        if (depth > depth_limit_) throw BudgetExceeded();
        t.kb = &kb_;
        t.saturate();
        if (t.clash) return false;

        // Branch on the first unsatisfied disjunction, in source order.
        for (size_t n = 0; n < t.nodes.size(); ++n) {
            for (const auto& c : t.nodes[n].label) {
                if (c->kind != K::Or) continue;
                bool satisfied = false;
                for (const auto& d : c->args)
                    if (t.has(static_cast<int>(n), d)) satisfied = true;
                if (satisfied) continue;
                for (const auto& d : c->args) {
                    Tableau branch = t;
                    branch.kb = &kb_;
                    branch.add(static_cast<int>(n), d);
                    if (solve(std::move(branch), depth + 1)) return true;
                }
                return false;
            }
        }

        // Generate a successor for the first unsatisfied existential on an
        // unblocked node; subset blocking guarantees termination.
        for (size_t n = 0; n < t.nodes.size(); ++n) {
            for (const auto& c : t.nodes[n].label) {
                if (c->kind != K::Exists) continue;
                if (t.exists_satisfied(static_cast<int>(n), c)) continue;
                if (t.blocked(static_cast<int>(n))) continue;
                if (++nodes_created_ > budget_) throw BudgetExceeded();
                Node m;
                m.parent = static_cast<int>(n);
                t.nodes.push_back(std::move(m));
                int mid = static_cast<int>(t.nodes.size()) - 1;
                t.add(mid, c->args[0]);
                t.add_globals(mid);
                if (c->inverse)
                    t.add_edge(mid, static_cast<int>(n), c->role);
                else
                    t.add_edge(static_cast<int>(n), mid, c->role);
                return solve(std::move(t), depth + 1);
            }
        }
        return true; // fully expanded, clash-free: model found
    }

private:
    const Compiled& kb_;
    size_t budget_;
    size_t depth_limit_ = 8000;
    size_t nodes_created_ = 0;
};

bool run_tableau(const Compiled& kb, const ABox& abox, size_t budget) {
    Tableau t;
    t.kb = &kb;
    std::map<Term, int> ids;
    auto node_of = [&](const Term& x) {
        auto it = ids.find(x);
        if (it != ids.end()) return it->second;
        Node n;
        n.root = true;
        t.nodes.push_back(std::move(n));
        int id = static_cast<int>(t.nodes.size()) - 1;
        ids[x] = id;
        t.add_globals(id);
        return id;
    };
    for (const auto& x : abox.individuals) node_of(x);
    if (t.nodes.empty()) node_of(Term::anon(0)); // non-empty domain
    for (const auto& [x, c] : abox.types) t.add(node_of(x), normalize(c));
    for (const auto& [x, r, y] : abox.roles)
        t.add_edge(node_of(x), node_of(y), r);
    return Solver(kb, budget).solve(std::move(t));
}

} // namespace

std::map<std::string, std::set<std::string>>
Reasoner::role_closure(const std::vector<Axiom>& tbox) {
    std::map<std::string, std::set<std::string>> supers;
    std::set<std::string> roles;
    for (const auto& ax : tbox) {
        if (ax.kind == Axiom::Kind::SubProperty) {
            roles.insert(ax.role);
            roles.insert(ax.role2);
            supers[ax.role].insert(ax.role2);
        }
        if (ax.kind == Axiom::Kind::Domain || ax.kind == Axiom::Kind::Range)
            roles.insert(ax.role);
        if (ax.lhs) collect_roles(ax.lhs, roles);
        if (ax.rhs) collect_roles(ax.rhs, roles);
    }
    for (const auto& r : roles) supers[r].insert(r);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [r, sup] : supers) {
            auto snapshot = sup;
            for (const auto& s : snapshot)
                if (auto it = supers.find(s); it != supers.end())
                    for (const auto& s2 : it->second)
                        changed |= sup.insert(s2).second;
        }
    }
    return supers;
}

bool Reasoner::has_model(const KnowledgeBase& kb) const {
    Compiled c = compile(kb.tbox);
    return run_tableau(c, kb.abox, budget_);
}

bool Reasoner::is_satisfiable(const std::vector<Axiom>& tbox,
                              const ClassExprPtr& expr) const {
    Compiled c = compile(tbox);
    ABox abox;
    abox.assert_type(Term::anon(0), expr);
    return run_tableau(c, abox, budget_);
}

bool Reasoner::is_consistent(const KnowledgeBase& kb) const {
    Compiled c = compile(kb.tbox);
    if (!run_tableau(c, kb.abox, budget_)) return false;
    ExprSet named;
    for (const auto& ax : kb.tbox) {
        collect_named(ax.lhs, named);
        collect_named(ax.rhs, named);
    }
    for (const auto& cls : named) {
        ABox probe;
        probe.assert_type(Term::anon(0), cls);
        if (!run_tableau(c, probe, budget_)) return false;
    }
    return true;
}

namespace {

bool eval_expr(const ClassExprPtr& e, const Interpretation& I, int x) {
    switch (e->kind) {
    case K::Named: {
        auto it = I.classes.find({e->prefix, e->name});
        return it != I.classes.end() && it->second.count(x) > 0;
    }
    case K::Top: return true;
    case K::Bottom: return false;
    case K::Not: return !eval_expr(e->args[0], I, x);
    case K::And:
        for (const auto& a : e->args)
            if (!eval_expr(a, I, x)) return false;
        return true;
    case K::Or:
        for (const auto& a : e->args)
            if (eval_expr(a, I, x)) return true;
        return false;
    case K::Exists:
    case K::Forall: {
        const auto it = I.roles.find(e->role);
        bool is_exists = e->kind == K::Exists;
        for (int y = 0; y < I.domain_size; ++y) {
            bool edge = false;
            if (it != I.roles.end())
                edge = e->inverse ? it->second.count({y, x}) > 0
                                  : it->second.count({x, y}) > 0;
            if (!edge) continue;
            bool in_filler = eval_expr(e->args[0], I, y);
            if (is_exists && in_filler) return true;
            if (!is_exists && !in_filler) return false;
        }
        return !is_exists;
    }
    }
    return false;
}

bool axiom_holds(const Axiom& ax, const Interpretation& I) {
    switch (ax.kind) {
    case Axiom::Kind::SubClass:
        for (int x = 0; x < I.domain_size; ++x)
            if (eval_expr(ax.lhs, I, x) && !eval_expr(ax.rhs, I, x))
                return false;
        return true;
    case Axiom::Kind::Equivalent:
        for (int x = 0; x < I.domain_size; ++x)
            if (eval_expr(ax.lhs, I, x) != eval_expr(ax.rhs, I, x))
                return false;
        return true;
    case Axiom::Kind::Disjoint:
        for (int x = 0; x < I.domain_size; ++x)
            if (eval_expr(ax.lhs, I, x) && eval_expr(ax.rhs, I, x))
                return false;
        return true;
    case Axiom::Kind::SubProperty: {
        auto sub = I.roles.find(ax.role);
        if (sub == I.roles.end()) return true;
        auto super = I.roles.find(ax.role2);
        for (const auto& p : sub->second)
            if (super == I.roles.end() || super->second.count(p) == 0)
                return false;
        return true;
    }
    case Axiom::Kind::Domain: {
        auto it = I.roles.find(ax.role);
        if (it == I.roles.end()) return true;
        for (const auto& [x, y] : it->second)
            if (!eval_expr(ax.lhs, I, x)) return false;
        return true;
    }
    case Axiom::Kind::Range: {
        auto it = I.roles.find(ax.role);
        if (it == I.roles.end()) return true;
        for (const auto& [x, y] : it->second)
            if (!eval_expr(ax.lhs, I, y)) return false;
        return true;
    }
    }
    return false;
}

} // namespace

bool Reasoner::models(const KnowledgeBase& kb, const Interpretation& I) {
    for (const auto& ax : kb.tbox)
        if (!axiom_holds(ax, I)) return false;
    auto elem = [&I](const Term& t) {
        auto it = I.individuals.find(t);
        return it == I.individuals.end() ? 0 : it->second;
    };
    for (const auto& [x, c] : kb.abox.types)
        if (!eval_expr(c, I, elem(x))) return false;
    for (const auto& [x, r, y] : kb.abox.roles) {
        auto it = I.roles.find(r);
        if (it == I.roles.end() || it->second.count({elem(x), elem(y)}) == 0)
            return false;
    }
    return true;
}

TriState Reasoner::brute_force_consistent(const KnowledgeBase& kb,
                                          int max_domain,
                                          size_t interp_budget) const {
    if (max_domain > 4) throw std::invalid_argument("max_domain > 4");
    ExprSet named;
    std::set<std::string> roles;
    for (const auto& ax : kb.tbox) {
        collect_named(ax.lhs, named);
        collect_named(ax.rhs, named);
        if (ax.kind == Axiom::Kind::SubProperty) {
            roles.insert(ax.role);
            roles.insert(ax.role2);
        }
        if (ax.kind == Axiom::Kind::Domain || ax.kind == Axiom::Kind::Range)
            roles.insert(ax.role);
        if (ax.lhs) collect_roles(ax.lhs, roles);
        if (ax.rhs) collect_roles(ax.rhs, roles);
    }
    for (const auto& [x, c] : kb.abox.types) collect_named(c, named);
    for (const auto& [x, r, y] : kb.abox.roles) roles.insert(r);

    std::vector<ClassExprPtr> cls(named.begin(), named.end());
    std::vector<std::string> rls(roles.begin(), roles.end());
    std::vector<Term> inds(kb.abox.individuals.begin(),
                           kb.abox.individuals.end());

    for (int d = 1; d <= max_domain; ++d) {
        double count = std::pow(2.0, double(d) * cls.size()) *
                       std::pow(2.0, double(d) * d * rls.size()) *
                       std::pow(double(d), double(inds.size()));
        if (count > double(interp_budget)) throw BudgetExceeded();

        size_t class_bits = size_t(d) * cls.size();
        size_t role_bits = size_t(d) * d * rls.size();
        size_t ind_combos = 1;
        for (size_t i = 0; i < inds.size(); ++i) ind_combos *= size_t(d);

        for (size_t cm = 0; cm < (size_t(1) << class_bits); ++cm) {
            for (size_t rm = 0; rm < (size_t(1) << role_bits); ++rm) {
                for (size_t im = 0; im < ind_combos; ++im) {
                    Interpretation I;
                    I.domain_size = d;
                    for (size_t ci = 0; ci < cls.size(); ++ci)
                        for (int x = 0; x < d; ++x)
                            if (cm >> (ci * d + x) & 1)
                                I.classes[{cls[ci]->prefix, cls[ci]->name}]
                                    .insert(x);
                    for (size_t ri = 0; ri < rls.size(); ++ri)
                        for (int x = 0; x < d; ++x)
                            for (int y = 0; y < d; ++y)
                                if (rm >> (ri * d * d + x * d + y) & 1)
                                    I.roles[rls[ri]].insert({x, y});
                    size_t rest = im;
                    for (const auto& ind : inds) {
                        I.individuals[ind] = int(rest % size_t(d));
                        rest /= size_t(d);
                    }
                    if (models(kb, I)) return TriState::Sat;
                }
            }
        }
    }
    return TriState::UnsatUpToBound;
}

} // namespace pao
