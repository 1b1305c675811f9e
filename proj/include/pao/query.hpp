#pragma once
// Temporal SELECT queries over a snapshot trace: every graph pattern is
// scoped to a step selector (a step variable, a bounded offset from it,
// "any", "min", or an explicit step label), so one query can correlate
// the states of different narrative moments.

#include "pao/dl.hpp"
#include "pao/rdf.hpp"

#include <string>
#include <vector>

namespace pao {

struct QueryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepSelector {
    enum class Kind { StepVar, Offset, Any, Min, Label };

    Kind kind = Kind::Any;
    std::string var;   // StepVar/Offset
    int offset = 0;    // Offset, 1..3
    std::string label; // Label
};

struct QueryBlock {
    StepSelector selector;
    std::vector<Triple> patterns;
    std::vector<Filter> filters;
};

struct TemporalQuery {
    bool star = false;
    std::vector<std::string> projection; // without '?', empty when star
    std::vector<QueryBlock> blocks;

    // The shared step variable, empty when no selector introduces one.
    std::string step_var() const;
    // Whether the projection exposes the step variable; step-variable
    // queries that do are answered against per-step typings, all others
    // against the trace-wide union of typings.
    bool projects_step() const;
};

TemporalQuery parse_query(const std::string& text);
std::vector<TemporalQuery> parse_queries(const std::string& text);

struct AnswerSet {
    std::vector<std::string> vars;  // projected, without '?'
    std::vector<Bindings> rows;     // deduplicated, sorted
    bool nonempty() const { return !rows.empty(); }
};

// Joins the blocks over shared variables. Role patterns match only the
// selected step; rdf:type patterns additionally see every class a term
// is a member of at any step unless the query projects the step
// variable. Named classes match through the SubClass/Equivalent closure.
AnswerSet evaluate(const TemporalQuery& query, const Trace& trace,
                   const std::vector<Axiom>& tbox);

// "yes"/"no" for SELECT *, otherwise one "?x = v" line per row.
std::string render_answers(const TemporalQuery& query, const AnswerSet& a);
std::string answers_to_json(const TemporalQuery& query, const AnswerSet& a);

} // namespace pao
