#pragma once
// Execution of compiled update sequences into a stepwise snapshot trace,
// with per-step entailment, precondition planning, and consistency guards.

#include "pao/cnl.hpp"
#include "pao/rdf.hpp"
#include "pao/reasoner.hpp"
#include "pao/templates.hpp"

#include <string>
#include <vector>

namespace pao {

struct ExecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WhereUnmatched : ExecError {
    explicit WhereUnmatched(const std::string& label)
        : ExecError("step " + label +
                    ": WHERE pattern matches nothing in the current state") {}
};
struct PreconditionUnsatisfiable : ExecError {
    explicit PreconditionUnsatisfiable(const std::string& label,
                                       const std::string& triple)
        : ExecError("step " + label + ": precondition " + triple +
                    " cannot be satisfied, even by planning") {}
};
struct StepInconsistent : ExecError {
    explicit StepInconsistent(const std::string& label)
        : ExecError("step " + label +
                    ": state is inconsistent with the ontology") {}
};

struct LabeledOp {
    std::string label;
    UpdateOp op;
    std::string note; // provenance remark for implicit ops
};

struct ExecResult {
    Trace trace;
    std::vector<LabeledOp> implicit_ops; // planned + entailed, by label
};

// One labeled op per paraphrase atom (assertions and invocations alike);
// atoms must be fully resolved.
std::vector<LabeledOp> compile_atoms(
    const std::vector<ParaphraseAtom>& atoms,
    const std::vector<ProceduralTemplate>& templates);

// Executes the ops in order. Ground preconditions missing from the state
// are satisfied retroactively by planting the triple at the earliest step
// where all its previously-introduced constants are introduced and typed.
// Each step closes under SubProperty/Domain/Range entailment and must
// stay consistent with the tbox.
ExecResult run(const std::vector<LabeledOp>& ops,
               const std::vector<Axiom>& tbox, const Reasoner& reasoner);

std::string render_update(const UpdateOp& op);

// Two-column report: explicit statement per step, implicit statements
// (with provenance notes) alongside.
std::string exec_report(const std::vector<LabeledOp>& ops,
                        const ExecResult& result);

} // namespace pao
