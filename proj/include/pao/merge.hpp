#pragma once
// Word-sense partitioning: merging monosemous micro-ontologies into one
// sense inventory by probing cross-ontology SubClass insertions between
// same-named classes and keeping only the consistent ones.

#include "pao/cnl.hpp"
#include "pao/dl.hpp"
#include "pao/reasoner.hpp"
#include "pao/templates.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace pao {

struct InconsistentInput : std::runtime_error {
    explicit InconsistentInput(const std::string& what)
        : std::runtime_error(what) {}
};
struct MergeInconsistent : std::runtime_error {
    explicit MergeInconsistent(const std::string& what)
        : std::runtime_error(what) {}
};

// One probe of the stage-1 loop: did inserting sub ⊑ super survive the
// consistency check?
struct InsertionLogEntry {
    std::string lexeme;
    std::string sub;   // qualified name
    std::string super; // qualified name
    bool kept = false;
    std::string reason;
};

struct SenseGroup {
    std::string lexeme;                // lowercase
    std::vector<std::string> members;  // qualified names, sorted
    std::string display;               // bare lexeme or MWU
};

// Dashed report edge: one sense group subsumed by another group of the
// same lexeme (SubClass kept in one direction only).
struct CrossSubsumption {
    std::string lexeme;
    std::string sub_display;
    std::string super_display;
};

struct SenseInventory {
    std::vector<MicroOntology> ontologies;
    std::vector<Axiom> merged_tbox; // union + kept insertions
    std::vector<Axiom> inserted;    // kept SubClass/Equivalent axioms only
    std::vector<SenseGroup> groups;
    std::vector<CrossSubsumption> cross_subsumptions;
    std::vector<InsertionLogEntry> log;
    std::map<std::string, std::string> aliases; // qualified name -> display

    const SenseGroup* group_of(const std::string& qualified) const;
    const MicroOntology* ontology(const std::string& prefix) const;
};

// The pairwise-probe partitioning procedure. `aliases` optionally
// overrides generated MWU names.
SenseInventory partition_senses(
    const std::vector<MicroOntology>& ontologies, const Reasoner& reasoner,
    const std::map<std::string, std::string>& aliases = {});

// Display name for one sense group: bare lexeme when the lexeme lives in
// a single group, otherwise an MWU from the lexicographically-first
// prefix's ontology title (subject to alias overrides).
std::string mint_mwu(const SenseGroup& group, size_t groups_of_lexeme,
                     const SenseInventory& inventory);

// Group-aware lexicon: one noun sense per sense group (represented by its
// first member), plus template verbs and harvested properties.
Lexicon build_lexicon(const SenseInventory& inventory,
                      const std::vector<ProceduralTemplate>& templates);

// Human-readable and machine-readable merge reports.
std::string merge_report(const SenseInventory& inventory);
std::string inventory_to_json(const SenseInventory& inventory);
SenseInventory inventory_from_json(const std::string& json_text,
                                   const Reasoner& reasoner);

} // namespace pao
