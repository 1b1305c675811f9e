#pragma once
// Description-logic class expressions, axioms, micro-ontologies and ABoxes.
//
// The fragment is ALCI plus a role hierarchy and domain/range axioms:
// exactly what the micro-ontology corpus needs. Expressions are immutable
// shared trees with a total structural order so they can live in sets.

#include "pao/rdf.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pao {

class ClassExpr;
using ClassExprPtr = std::shared_ptr<const ClassExpr>;

class ClassExpr {
public:
    enum class Kind { Named, Top, Bottom, Not, And, Or, Exists, Forall };

    Kind kind = Kind::Top;
    std::string prefix; // Named
    std::string name;   // Named
    std::string role;   // Exists / Forall
    bool inverse = false;
    std::vector<ClassExprPtr> args; // Not: 1; And/Or: >= 2; Exists/Forall: 1

    static ClassExprPtr named(std::string prefix, std::string name);
    static ClassExprPtr top();
    static ClassExprPtr bottom();
    static ClassExprPtr negation(ClassExprPtr e);
    static ClassExprPtr conj(std::vector<ClassExprPtr> args);
    static ClassExprPtr disj(std::vector<ClassExprPtr> args);
    static ClassExprPtr exists(std::string role, bool inverse, ClassExprPtr f);
    static ClassExprPtr forall(std::string role, bool inverse, ClassExprPtr f);

    std::string str() const;
};

// Total structural order; 0 = equal.
int compare(const ClassExprPtr& a, const ClassExprPtr& b);
bool equal(const ClassExprPtr& a, const ClassExprPtr& b);

struct ClassExprLess {
    bool operator()(const ClassExprPtr& a, const ClassExprPtr& b) const {
        return compare(a, b) < 0;
    }
};

// Negation normal form: Not applies only to Named, negated existentials
// become universal restrictions.
ClassExprPtr normalize(const ClassExprPtr& e);

struct Axiom {
    enum class Kind { SubClass, Equivalent, Disjoint, SubProperty, Domain, Range };

    Kind kind;
    ClassExprPtr lhs; // SubClass/Equivalent/Disjoint, Domain/Range filler
    ClassExprPtr rhs;
    std::string role;  // SubProperty sub-role, Domain/Range role
    std::string role2; // SubProperty super-role

    static Axiom sub_class(ClassExprPtr l, ClassExprPtr r) {
        return {Kind::SubClass, std::move(l), std::move(r), "", ""};
    }
    static Axiom equivalent(ClassExprPtr l, ClassExprPtr r) {
        return {Kind::Equivalent, std::move(l), std::move(r), "", ""};
    }
    static Axiom disjoint(ClassExprPtr l, ClassExprPtr r) {
        return {Kind::Disjoint, std::move(l), std::move(r), "", ""};
    }
    static Axiom sub_property(std::string sub, std::string super) {
        return {Kind::SubProperty, nullptr, nullptr, std::move(sub), std::move(super)};
    }
    static Axiom domain(std::string role, ClassExprPtr c) {
        return {Kind::Domain, std::move(c), nullptr, std::move(role), ""};
    }
    static Axiom range(std::string role, ClassExprPtr c) {
        return {Kind::Range, std::move(c), nullptr, std::move(role), ""};
    }

    std::string str() const;
};

struct PropertyDecl {
    std::string name;
    std::optional<ClassExprPtr> domain;
    std::optional<ClassExprPtr> range;
    bool universal = false; // unrestricted domain and range
};

struct MicroOntology {
    std::string prefix; // short namespace id, e.g. "we"
    std::string iri;
    std::string title; // e.g. "ColdWarEasternEurope"
    std::vector<Axiom> axioms;
    std::vector<PropertyDecl> properties;
};

struct ABox {
    std::set<Term> individuals;
    std::vector<std::pair<Term, ClassExprPtr>> types;
    std::vector<std::tuple<Term, std::string, Term>> roles;

    void assert_type(const Term& x, ClassExprPtr c) {
        individuals.insert(x);
        types.emplace_back(x, std::move(c));
    }
    void assert_role(const Term& x, const std::string& r, const Term& y) {
        individuals.insert(x);
        individuals.insert(y);
        roles.emplace_back(x, r, y);
    }
};

struct KnowledgeBase {
    std::vector<Axiom> tbox;
    ABox abox;
};

struct UnknownPrefix : std::runtime_error {
    explicit UnknownPrefix(const std::string& p)
        : std::runtime_error("unknown ontology prefix '" + p + "'") {}
};

// Brace-list expansion: {we,ee}:country -> Or(we:country, ee:country),
// a single prefix yields the plain named class. Each prefix must name a
// loaded micro-ontology.
ClassExprPtr expand_brace_list(const std::vector<std::string>& prefixes,
                               const std::string& local,
                               const std::vector<MicroOntology>& loaded);

// Domain/Range axioms implied by property declarations.
std::vector<Axiom> property_axioms(const MicroOntology& onto);

} // namespace pao
