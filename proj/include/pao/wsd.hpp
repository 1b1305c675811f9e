#pragma once
// Word-sense disambiguation of factual parses against a sense inventory:
// reasoner-backed sense hints, recency/compatibility anaphora resolution,
// and the batch/interactive choice protocol.

#include "pao/cnl.hpp"
#include "pao/merge.hpp"
#include "pao/reasoner.hpp"
#include "pao/templates.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pao {

struct NoAntecedent : std::runtime_error {
    explicit NoAntecedent(const std::string& site)
        : std::runtime_error("no antecedent candidate for " + site) {}
};

enum class Hint { Valid, Invalid, Unknown };

struct SenseCandidate {
    std::string id; // sense display, template name, or discourse id
    Hint hint = Hint::Unknown;
};

struct AmbiguityItem {
    enum class Kind { NounSense, VerbSense, Antecedent };

    std::string site; // "germany@5", "take@13", "she@12"
    Kind kind = Kind::NounSense;
    size_t token = 0;
    std::vector<SenseCandidate> candidates;
    std::string resolution; // empty while unresolved
    bool resolved() const { return !resolution.empty(); }
};

// Returns the chosen candidate id for an item the hints left open.
using ChoiceCallback = std::function<std::string(const AmbiguityItem&)>;

struct DisambiguationResult {
    FactualParse parse; // fully resolved when complete() holds
    std::vector<AmbiguityItem> items;

    bool complete() const;
};

// Choices file: lines of `site = candidate`, '#' comments.
std::map<std::string, std::string> parse_choices(const std::string& text);

std::string ambiguity_report(const std::vector<AmbiguityItem>& items);

// Runs hinting over every ambiguity site, applies explicit choices first,
// then auto-resolution (single valid candidate), then the callback. Sites
// that remain open are reported in the result; rendering such a parse
// raises UnresolvedAmbiguity.
DisambiguationResult disambiguate(
    const FactualParse& parse, const SenseInventory& inventory,
    const std::vector<ProceduralTemplate>& templates, const Reasoner& reasoner,
    const std::map<std::string, std::string>& choices = {},
    const ChoiceCallback& callback = nullptr);

} // namespace pao
