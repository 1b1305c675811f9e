#pragma once
// Procedural verb templates: the PDDL-flavored frame files linking verbs
// to insert/delete update semantics, and their compilation into UpdateOps.

#include "pao/cnl.hpp"
#include "pao/rdf.hpp"

#include <map>
#include <string>
#include <vector>

namespace pao {

struct TemplateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicateTemplateName : TemplateError {
    explicit DuplicateTemplateName(const std::string& n)
        : TemplateError("duplicate template name '" + n + "'") {}
};
struct MissingRole : TemplateError {
    explicit MissingRole(const std::string& slot)
        : TemplateError("no template parameter for slot '" + slot + "'") {}
};
struct UnboundEffectVariable : TemplateError {
    explicit UnboundEffectVariable(const std::string& v)
        : TemplateError("effect variable ?" + v + " has no binding source") {}
};

// One literal of a precondition or effect: (stores ?source ?theme) or its
// (not ...) form. Arguments are canonical variable names ('-' folded to
// '_', so ?co-resident and ?co_resident name the same variable).
struct TemplateLiteral {
    bool negated = false;
    std::string property;
    std::vector<std::string> args;
};

struct InequalityConstraint {
    std::string left;
    std::string right;
};

struct ProceduralTemplate {
    std::string name;
    std::vector<std::string> parameters;
    std::vector<TemplateLiteral> precondition;
    std::vector<InequalityConstraint> inequalities;
    std::vector<TemplateLiteral> effects;
    std::vector<std::string> lexical_units;
    // syntactic slot ("subject", "object", or a preposition) -> parameter
    std::vector<std::pair<std::string, std::string>> roles;

    const std::string* parameter_for(const std::string& slot) const;
    bool covers_slots(const std::vector<std::string>& slots) const;
};

// Parses the template format with its :roles section; ';' comments.
std::vector<ProceduralTemplate> parse_templates(const std::string& text);
std::vector<ProceduralTemplate> load_template_file(const std::string& path);

const ProceduralTemplate* find_template(
    const std::vector<ProceduralTemplate>& templates, const std::string& name);

// Compiles one disambiguated invocation. Slot-bound parameters ground to
// discourse ids; unbound (existential) variables stay as where-pattern
// variables; ground positive precondition atoms become executor-checked
// (and plannable) preconditions.
UpdateOp compile_invocation(const ProceduralTemplate& tpl,
                            const std::map<std::string, Term>& slot_bindings);

// Compiles a type/property assertion atom to its single INSERT; negated
// existentials yield an empty op (they constrain WSD, not the trace).
UpdateOp compile_assertion(const ParaphraseAtom& atom);

} // namespace pao
