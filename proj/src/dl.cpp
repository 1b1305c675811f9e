#include "pao/dl.hpp"

#include <algorithm>
#include <cassert>

namespace pao {

namespace {

ClassExprPtr make(ClassExpr e) {
    return std::make_shared<const ClassExpr>(std::move(e));
}

} // namespace

ClassExprPtr ClassExpr::named(std::string prefix, std::string name) {
    ClassExpr e;
    e.kind = Kind::Named;
    e.prefix = std::move(prefix);
    e.name = std::move(name);
    return make(std::move(e));
}

ClassExprPtr ClassExpr::top() {
    static ClassExprPtr t = make(ClassExpr{});
    return t;
}

ClassExprPtr ClassExpr::bottom() {
    ClassExpr e;
    e.kind = Kind::Bottom;
    static ClassExprPtr b = make(std::move(e));
    return b;
}

ClassExprPtr ClassExpr::negation(ClassExprPtr x) {
    ClassExpr e;
    e.kind = Kind::Not;
    e.args = {std::move(x)};
    return make(std::move(e));
}

ClassExprPtr ClassExpr::conj(std::vector<ClassExprPtr> args) {
    assert(args.size() >= 2);
    ClassExpr e;
    e.kind = Kind::And;
    e.args = std::move(args);
    return make(std::move(e));
}

ClassExprPtr ClassExpr::disj(std::vector<ClassExprPtr> args) {
    assert(args.size() >= 2);
    ClassExpr e;
    e.kind = Kind::Or;
    e.args = std::move(args);
    return make(std::move(e));
}

ClassExprPtr ClassExpr::exists(std::string role, bool inverse, ClassExprPtr f) {
    ClassExpr e;
    e.kind = Kind::Exists;
    e.role = std::move(role);
    e.inverse = inverse;
    e.args = {std::move(f)};
    return make(std::move(e));
}

ClassExprPtr ClassExpr::forall(std::string role, bool inverse, ClassExprPtr f) {
    ClassExpr e;
    e.kind = Kind::Forall;
    e.role = std::move(role);
    e.inverse = inverse;
    e.args = {std::move(f)};
    return make(std::move(e));
}

std::string ClassExpr::str() const {
    switch (kind) {
    case Kind::Named: return prefix.empty() ? name : prefix + ":" + name;
    case Kind::Top: return "Top";
    case Kind::Bottom: return "Bottom";
    case Kind::Not: return "not(" + args[0]->str() + ")";
    case Kind::And: {
        std::string s = "and(";
        for (size_t i = 0; i < args.size(); ++i)
            s += (i ? ", " : "") + args[i]->str();
        return s + ")";
    }
    case Kind::Or: {
        std::string s = "or(";
        for (size_t i = 0; i < args.size(); ++i)
            s += (i ? ", " : "") + args[i]->str();
        return s + ")";
    }
    case Kind::Exists:
        return "exists(" + role + (inverse ? "^-" : "") + ", " +
               args[0]->str() + ")";
    case Kind::Forall:
        return "forall(" + role + (inverse ? "^-" : "") + ", " +
               args[0]->str() + ")";
    }
    return {};
}

int compare(const ClassExprPtr& a, const ClassExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    if (int c = a->prefix.compare(b->prefix)) return c;
    if (int c = a->name.compare(b->name)) return c;
    if (int c = a->role.compare(b->role)) return c;
    if (a->inverse != b->inverse) return a->inverse ? 1 : -1;
    if (a->args.size() != b->args.size())
        return a->args.size() < b->args.size() ? -1 : 1;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (int c = compare(a->args[i], b->args[i])) return c;
    return 0;
}

bool equal(const ClassExprPtr& a, const ClassExprPtr& b) {
    return compare(a, b) == 0;
}

namespace {

ClassExprPtr nnf(const ClassExprPtr& e, bool negated) {
    using K = ClassExpr::Kind;
    switch (e->kind) {
    case K::Named:
        return negated ? ClassExpr::negation(e) : e;
    case K::Top:
        return negated ? ClassExpr::bottom() : ClassExpr::top();
    case K::Bottom:
        return negated ? ClassExpr::top() : ClassExpr::bottom();
    case K::Not:
        return nnf(e->args[0], !negated);
    case K::And:
    case K::Or: {
        std::vector<ClassExprPtr> args;
        args.reserve(e->args.size());
        for (const auto& a : e->args) args.push_back(nnf(a, negated));
        bool is_and = (e->kind == K::And) != negated;
        return is_and ? ClassExpr::conj(std::move(args))
                      : ClassExpr::disj(std::move(args));
    }
    case K::Exists: {
        auto f = nnf(e->args[0], negated);
        return negated ? ClassExpr::forall(e->role, e->inverse, std::move(f))
                       : ClassExpr::exists(e->role, e->inverse, std::move(f));
    }
    case K::Forall: {
        auto f = nnf(e->args[0], negated);
        return negated ? ClassExpr::exists(e->role, e->inverse, std::move(f))
                       : ClassExpr::forall(e->role, e->inverse, std::move(f));
    }
    }
    return e;
}

} // namespace

ClassExprPtr normalize(const ClassExprPtr& e) { return nnf(e, false); }

std::string Axiom::str() const {
    switch (kind) {
    case Kind::SubClass: return lhs->str() + " [= " + rhs->str();
    case Kind::Equivalent: return lhs->str() + " == " + rhs->str();
    case Kind::Disjoint: return lhs->str() + " disjoint " + rhs->str();
    case Kind::SubProperty: return role + " [= " + role2;
    case Kind::Domain: return "domain(" + role + ") = " + lhs->str();
    case Kind::Range: return "range(" + role + ") = " + lhs->str();
    }
    return {};
}

ClassExprPtr expand_brace_list(const std::vector<std::string>& prefixes,
                               const std::string& local,
                               const std::vector<MicroOntology>& loaded) {
    std::vector<ClassExprPtr> members;
    for (const auto& p : prefixes) {
        bool known = std::any_of(loaded.begin(), loaded.end(),
                                 [&p](const auto& o) { return o.prefix == p; });
        if (!known) throw UnknownPrefix(p);
        members.push_back(ClassExpr::named(p, local));
    }
    if (members.empty()) throw UnknownPrefix("{}");
    if (members.size() == 1) return members[0];
    return ClassExpr::disj(std::move(members));
}

std::vector<Axiom> property_axioms(const MicroOntology& onto) {
    std::vector<Axiom> out;
    for (const auto& p : onto.properties) {
        if (p.domain) out.push_back(Axiom::domain(p.name, *p.domain));
        if (p.range) out.push_back(Axiom::range(p.name, *p.range));
    }
    return out;
}

} // namespace pao
