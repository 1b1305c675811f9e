#pragma once
// Tableau-based consistency and satisfiability for the ALCI-with-role-
// hierarchy fragment, plus a bounded brute-force model finder used as an
// independent test oracle.
//
// is_consistent answers the question the merging procedure actually asks
// of an OWL reasoner: the knowledge base must have a model AND no named
// class may be unsatisfiable (an incoherent merge is exactly what word
// sense partitioning must detect, even with an empty ABox).

#include "pao/dl.hpp"

#include <map>
#include <set>
#include <string>

namespace pao {

struct UnsupportedAxiom : std::runtime_error {
    explicit UnsupportedAxiom(const std::string& what)
        : std::runtime_error("unsupported axiom: " + what) {}
};

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("reasoner node budget exceeded") {}
};

enum class TriState { Sat, UnsatUpToBound, Unknown };

// A finite interpretation over domain {0..domain_size-1}. Class and role
// extensions default to empty; individuals default to element 0.
struct Interpretation {
    int domain_size = 1;
    std::map<std::pair<std::string, std::string>, std::set<int>> classes;
    std::map<std::string, std::set<std::pair<int, int>>> roles;
    std::map<Term, int> individuals;
};

class Reasoner {
public:
    explicit Reasoner(size_t node_budget = 100000) : budget_(node_budget) {}

    // Model existence plus coherence of every named class in the TBox.
    bool is_consistent(const KnowledgeBase& kb) const;

    // Plain ABox consistency (no coherence requirement).
    bool has_model(const KnowledgeBase& kb) const;

    bool is_satisfiable(const std::vector<Axiom>& tbox,
                        const ClassExprPtr& expr) const;

    // Enumerates all interpretations over domains of size 1..max_domain.
    // One-sided: Sat is definitive, UnsatUpToBound is not. Enumeration
    // beyond the configured interpretation budget throws BudgetExceeded.
    TriState brute_force_consistent(const KnowledgeBase& kb, int max_domain,
                                    size_t interp_budget = 4000000) const;

    // Checks a hand-constructed interpretation against the kb.
    static bool models(const KnowledgeBase& kb, const Interpretation& interp);

    // Reflexive-transitive closure of the SubProperty axioms.
    static std::map<std::string, std::set<std::string>>
    role_closure(const std::vector<Axiom>& tbox);

private:
    size_t budget_;
};

} // namespace pao
