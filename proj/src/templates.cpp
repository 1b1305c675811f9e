#include "pao/templates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace pao {

namespace {

struct Sexp {
    bool is_atom = false;
    std::string text;
    std::vector<Sexp> kids;
};

// Tokens: parens, and atoms; commas count as whitespace, ';' comments.
std::vector<std::string> sexp_tokens(const std::string& text) {
    std::vector<std::string> toks;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            ++i;
        } else if (c == '(' || c == ')') {
            toks.emplace_back(1, c);
            ++i;
        } else {
            size_t start = i;
            while (i < text.size() && text[i] != '(' && text[i] != ')' &&
                   text[i] != ',' && text[i] != ';' &&
                   !std::isspace(static_cast<unsigned char>(text[i])))
                ++i;
            toks.push_back(text.substr(start, i - start));
        }
    }
    return toks;
}

Sexp parse_sexp(const std::vector<std::string>& toks, size_t& i) {
    if (i >= toks.size()) throw TemplateError("unexpected end of template file");
    if (toks[i] == "(") {
        Sexp list;
        ++i;
        while (i < toks.size() && toks[i] != ")")
            list.kids.push_back(parse_sexp(toks, i));
        if (i >= toks.size()) throw TemplateError("missing ')'");
        ++i;
        return list;
    }
    if (toks[i] == ")") throw TemplateError("unexpected ')'");
    Sexp atom;
    atom.is_atom = true;
    atom.text = toks[i++];
    return atom;
}

// Canonical variable name: drop the '?', fold '-' into '_' (the corpus
// writes ?co-resident and ?co_resident for the same parameter).
std::string canon_var(const std::string& raw) {
    std::string v = raw;
    if (!v.empty() && v[0] == '?') v = v.substr(1);
    std::replace(v.begin(), v.end(), '-', '_');
    return v;
}

bool is_var_atom(const Sexp& s) {
    return s.is_atom && !s.text.empty() && s.text[0] == '?';
}

void collect_literals(const Sexp& s, bool negated,
                      std::vector<TemplateLiteral>& literals,
                      std::vector<InequalityConstraint>& inequalities) {
    if (s.is_atom) throw TemplateError("expected a literal, got '" + s.text + "'");
    if (s.kids.empty()) return; // () -- empty condition
    const Sexp& head = s.kids[0];
    if (!head.is_atom)
        throw TemplateError("literal must start with a predicate name");
    if (head.text == "and") {
        if (negated) throw TemplateError("(not (and ...)) is not supported");
        for (size_t k = 1; k < s.kids.size(); ++k)
            collect_literals(s.kids[k], false, literals, inequalities);
        return;
    }
    if (head.text == "not") {
        if (s.kids.size() != 2) throw TemplateError("(not ...) takes one literal");
        collect_literals(s.kids[1], !negated, literals, inequalities);
        return;
    }
    if (head.text == "=") {
        if (!negated)
            throw TemplateError("only negated equality constraints are supported");
        if (s.kids.size() != 3 || !is_var_atom(s.kids[1]) ||
            !is_var_atom(s.kids[2]))
            throw TemplateError("(= ...) takes two variables");
        inequalities.push_back(
            {canon_var(s.kids[1].text), canon_var(s.kids[2].text)});
        return;
    }
    TemplateLiteral lit;
    lit.negated = negated;
    lit.property = head.text;
    for (size_t k = 1; k < s.kids.size(); ++k) {
        if (!s.kids[k].is_atom)
            throw TemplateError("literal arguments must be atoms");
        lit.args.push_back(canon_var(s.kids[k].text));
    }
    literals.push_back(std::move(lit));
}

} // namespace

const std::string* ProceduralTemplate::parameter_for(
    const std::string& slot) const {
    for (const auto& [s, p] : roles)
        if (s == slot) return &p;
    return nullptr;
}

bool ProceduralTemplate::covers_slots(
    const std::vector<std::string>& slots) const {
    return std::all_of(slots.begin(), slots.end(), [&](const auto& s) {
        return parameter_for(s) != nullptr;
    });
}

std::vector<ProceduralTemplate> parse_templates(const std::string& text) {
    auto toks = sexp_tokens(text);
    std::vector<ProceduralTemplate> out;
    size_t i = 0;
    while (i < toks.size()) {
        if (toks[i] != "Procedure:")
            throw TemplateError("expected 'Procedure:', got '" + toks[i] + "'");
        ++i;
        if (i >= toks.size() || toks[i] == "(" || toks[i][0] == ':')
            throw TemplateError("Procedure: needs a name");
        ProceduralTemplate tpl;
        tpl.name = toks[i++];
        for (const auto& t : out)
            if (t.name == tpl.name) throw DuplicateTemplateName(tpl.name);

        while (i < toks.size() && toks[i] != "Procedure:") {
            std::string kw = toks[i];
            if (kw.empty() || kw[0] != ':')
                throw TemplateError("expected a :section, got '" + kw + "'");
            ++i;
            // A section's body is every s-expression up to the next keyword.
            std::vector<Sexp> body;
            while (i < toks.size() && toks[i] == "(")
                body.push_back(parse_sexp(toks, i));
            auto single = [&]() -> const Sexp& {
                if (body.size() != 1)
                    throw TemplateError(kw + " takes one parenthesized form");
                return body[0];
            };
            if (kw == ":parameters") {
                for (const auto& p : single().kids) {
                    if (!is_var_atom(p))
                        throw TemplateError(":parameters entries must be ?vars");
                    tpl.parameters.push_back(canon_var(p.text));
                }
            } else if (kw == ":precondition") {
                collect_literals(single(), false, tpl.precondition,
                                 tpl.inequalities);
            } else if (kw == ":effect") {
                std::vector<InequalityConstraint> stray;
                collect_literals(single(), false, tpl.effects, stray);
                if (!stray.empty())
                    throw TemplateError("equality constraints belong in "
                                        ":precondition");
            } else if (kw == ":lexicalUnits") {
                for (const auto& u : single().kids) {
                    if (!u.is_atom)
                        throw TemplateError(":lexicalUnits entries must be words");
                    tpl.lexical_units.push_back(u.text);
                }
            } else if (kw == ":roles") {
                for (const auto& pair : body) {
                    if (pair.kids.size() != 2 || !pair.kids[0].is_atom ||
                        !is_var_atom(pair.kids[1]))
                        throw TemplateError(
                            ":roles entries are (slot ?parameter) pairs");
                    tpl.roles.emplace_back(pair.kids[0].text,
                                           canon_var(pair.kids[1].text));
                }
            } else {
                throw TemplateError("unknown section '" + kw + "'");
            }
        }
        for (const auto& [slot, param] : tpl.roles)
            if (std::find(tpl.parameters.begin(), tpl.parameters.end(),
                          param) == tpl.parameters.end())
                throw TemplateError("role slot '" + slot +
                                    "' names unknown parameter ?" + param);
        out.push_back(std::move(tpl));
    }
    return out;
}

std::vector<ProceduralTemplate> load_template_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw TemplateError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_templates(buf.str());
}

const ProceduralTemplate* find_template(
    const std::vector<ProceduralTemplate>& templates, const std::string& name) {
    for (const auto& t : templates)
        if (t.name == name) return &t;
    return nullptr;
}

UpdateOp compile_invocation(const ProceduralTemplate& tpl,
                            const std::map<std::string, Term>& slot_bindings) {
    std::map<std::string, Term> values; // parameter -> ground term
    for (const auto& [slot, term] : slot_bindings) {
        const std::string* param = tpl.parameter_for(slot);
        if (!param) throw MissingRole(slot);
        values[*param] = term;
    }

    auto resolve = [&](const std::string& var) {
        auto it = values.find(var);
        return it != values.end() ? it->second : Term::var(var);
    };
    auto to_triple = [&](const TemplateLiteral& lit) {
        if (lit.args.size() != 2)
            throw TemplateError("property '" + lit.property +
                                "' needs exactly two arguments");
        return Triple{resolve(lit.args[0]), Term::iri("", lit.property),
                      resolve(lit.args[1])};
    };

    // Variables a positive precondition can bind at execution time.
    std::set<std::string> where_bound;
    for (const auto& lit : tpl.precondition)
        if (!lit.negated)
            for (const auto& a : lit.args)
                if (!values.count(a)) where_bound.insert(a);

    UpdateOp op;
    for (const auto& lit : tpl.precondition) {
        if (lit.negated)
            throw TemplateError("negated preconditions are not supported");
        Triple t = to_triple(lit);
        if (t.has_vars())
            op.where.push_back(t);
        else
            op.ground_preconditions.push_back(t);
    }
    for (const auto& ineq : tpl.inequalities)
        op.filters.push_back({resolve(ineq.left), resolve(ineq.right)});
    for (const auto& lit : tpl.effects) {
        for (const auto& a : lit.args)
            if (!values.count(a) && !where_bound.count(a))
                throw UnboundEffectVariable(a);
        (lit.negated ? op.deletes : op.inserts).push_back(to_triple(lit));
    }
    return op;
}

UpdateOp compile_assertion(const ParaphraseAtom& atom) {
    UpdateOp op;
    switch (atom.kind) {
    case ParaphraseAtom::Kind::Type: {
        if (atom.chosen_sense < 0)
            throw TemplateError("cannot compile an unresolved type assertion");
        const auto& s = atom.senses[size_t(atom.chosen_sense)];
        op.inserts.push_back(
            {atom.subject, type_predicate(), Term::iri(s.prefix, s.name)});
        break;
    }
    case ParaphraseAtom::Kind::Property:
        op.inserts.push_back(
            {atom.subject, Term::iri("", atom.property), atom.object});
        break;
    case ParaphraseAtom::Kind::NegatedExistential:
        break; // constrains disambiguation only; nothing enters the trace
    case ParaphraseAtom::Kind::Invocation:
        throw TemplateError("invocations compile via compile_invocation");
    }
    return op;
}

} // namespace pao
