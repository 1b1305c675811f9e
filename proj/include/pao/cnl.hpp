#pragma once
// Controlled-language front end: micro-ontology file loading, the
// ontological sentence grammar (axioms), the factual/narrative grammar
// (paraphrase atoms with discourse ids), and paraphrase rendering.
//
// Ontological texts are monosemous within one micro-ontology; factual
// texts carry candidate sense sets that the wsd module resolves.

#include "pao/dl.hpp"
#include "pao/rdf.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace pao {

struct ParseError : std::runtime_error {
    size_t sentence = 0;
    ParseError(size_t sentence_index, const std::string& msg)
        : std::runtime_error("sentence " + std::to_string(sentence_index + 1) +
                             ": " + msg),
          sentence(sentence_index) {}
};

struct UnknownWord : ParseError {
    std::string word;
    UnknownWord(size_t sentence_index, const std::string& w)
        : ParseError(sentence_index, "unknown word '" + w + "'"), word(w) {}
};

struct UnresolvedAmbiguity : std::runtime_error {
    explicit UnresolvedAmbiguity(const std::string& sites)
        : std::runtime_error("unresolved ambiguity at: " + sites) {}
};

// --- Morphology -----------------------------------------------------------
// The narrative corpus is simple-present third-person-singular, so the
// morphology is three small rules plus an irregular table.

std::string verb_lemma(const std::string& surface_3sg);   // takes -> take
std::string verb_3sg(const std::string& lemma);           // carry -> carries
std::string participle_to_3sg(const std::string& p);      // involved -> involves

// --- Ontology loading -----------------------------------------------------
// File format: first line `@prefix <id> <iri> "<Title>"`, optional
// `@property <name> [domain C] [range C] [universal]` lines, then
// ontological CNL sentences one line each; `#` starts a comment. Two
// mirrored SubClass sentences on one line collapse to one Equivalent.

std::vector<Axiom> parse_ontological(const std::string& text,
                                     const std::string& prefix,
                                     const std::vector<MicroOntology>& loaded);

MicroOntology parse_ontology(const std::string& text,
                             const std::vector<MicroOntology>& already_loaded);

// Loads files in order; later files may reference earlier prefixes.
std::vector<MicroOntology> load_ontology_files(
    const std::vector<std::string>& paths);

// --- Lexicon --------------------------------------------------------------

struct NounSense {
    std::string prefix;  // representative qualified class
    std::string name;
    std::string display; // bare lexeme, or MWU when the lexeme is polysemous

    auto operator<=>(const NounSense&) const = default;
    std::string qualified() const { return prefix + ":" + name; }
};

struct Lexicon {
    struct PronounRule {
        std::string constraint; // class lexeme, e.g. "human"
        bool negated = false;
    };

    std::map<std::string, std::vector<NounSense>> nouns; // lowercase lexeme
    std::map<std::string, std::vector<std::string>> template_verbs; // lemma
    std::set<std::string> property_verbs;              // surface names
    std::map<std::string, std::string> has_properties; // lexeme -> hasX
    std::map<std::string, NounSense> property_ranges;  // hasX -> range class
    std::map<std::string, PronounRule> pronouns;

    const std::vector<NounSense>* noun_senses(const std::string& word) const;
};

// MWU surface form: "food" + "Basket" -> "food-basket" (second part
// follows the case style of the first), "ColdWarEasternEurope" +
// "Germany" -> "ColdWarEasternEurope-Germany".
std::string mwu_name(const std::string& title, const std::string& local);

// Lexicon over plain (unmerged) ontologies: every qualified class is its
// own sense; displays fall back to prefix:name when a lexeme repeats.
// The merge module builds the group-aware variant from a SenseInventory.
Lexicon lexicon_from_ontologies(const std::vector<MicroOntology>& ontologies);

// Registers one procedural template's lexical units as verb senses.
void add_template_verbs(Lexicon& lexicon, const std::string& template_name,
                        const std::vector<std::string>& lexical_units);

// --- Factual parsing ------------------------------------------------------

struct DiscourseEntity {
    Term id;
    std::string surface; // head word as written
    size_t token = 0;    // head token index (discourse-id source)
    std::vector<NounSense> senses;
    int chosen = -1;     // resolved sense; auto-set when monosemous

    bool typed() const { return chosen >= 0; }
};

struct AnaphorSite {
    enum class Kind { Pronoun, Definite };

    std::string placeholder; // variable name standing in for the referent
    Kind kind = Kind::Pronoun;
    std::string surface;     // "she", "it", "the farmhouse"
    std::string noun;        // definite: lexeme to match
    size_t token = 0;
    Lexicon::PronounRule rule; // pronoun compatibility constraint
    Term resolution;
    bool resolved = false;
};

struct ParaphraseAtom {
    enum class Kind { Type, Property, Invocation, NegatedExistential };

    std::string label;
    Kind kind = Kind::Type;
    Term subject; // discourse id, or placeholder variable pre-resolution

    // Type assertion
    std::vector<NounSense> senses;
    int chosen_sense = -1;
    std::string surface; // noun as written (MWU second part in rendering)
    size_t token = 0;    // head token (ambiguity site id)

    // Property assertion
    std::string property;
    Term object;

    // Template invocation
    std::string verb_surface;
    std::string verb_lemma_;
    std::vector<std::string> template_candidates;
    int chosen_template = -1;
    std::vector<std::pair<std::string, Term>> slots; // subject/object/preps
    size_t verb_token = 0;

    // Negated existential ("that is not involved by a NATO")
    std::string role;
    bool inverse = true;
    std::vector<NounSense> object_senses;
    int chosen_object_sense = -1;
    std::string object_surface;

    bool resolved() const;
};

struct FactualParse {
    std::vector<ParaphraseAtom> atoms;
    std::vector<DiscourseEntity> entities;
    std::vector<AnaphorSite> anaphors;
    std::vector<std::string> tokens; // "" marks an elided-subject position
    std::set<size_t> sentence_ends; // token indices closing a sentence

    DiscourseEntity* entity(const Term& id);
    const DiscourseEntity* entity(const Term& id) const;
};

FactualParse parse_factual(const std::string& text, const Lexicon& lexicon);

// Paraphrase rendering, one line per atom; throws UnresolvedAmbiguity
// when any sense, template, or referent is still open.
std::string render_paraphrase(const FactualParse& parse);

// The original text with MWUs and antecedents inlined
// ("She-LittleRedRidingHood removing-takes a food-basket from the ...").
std::string render_resolved(const FactualParse& parse);

} // namespace pao
