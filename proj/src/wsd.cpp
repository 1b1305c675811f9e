#include "pao/wsd.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pao {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

ClassExprPtr sense_expr(const NounSense& s) {
    return ClassExpr::named(s.prefix, s.name);
}

ClassExprPtr senses_expr(const std::vector<NounSense>& senses, int chosen) {
    if (chosen >= 0) return sense_expr(senses[size_t(chosen)]);
    if (senses.empty()) return nullptr;
    if (senses.size() == 1) return sense_expr(senses[0]);
    std::vector<ClassExprPtr> alts;
    for (const auto& s : senses) alts.push_back(sense_expr(s));
    return ClassExpr::disj(std::move(alts));
}

// All sense groups of one lexeme as a single class expression.
ClassExprPtr lexeme_expr(const SenseInventory& inventory,
                         const std::string& lexeme) {
    std::vector<ClassExprPtr> alts;
    for (const auto& g : inventory.groups) {
        if (g.lexeme != lexeme) continue;
        const auto& rep = g.members.front();
        auto colon = rep.find(':');
        alts.push_back(
            ClassExpr::named(rep.substr(0, colon), rep.substr(colon + 1)));
    }
    if (alts.empty()) return nullptr;
    return alts.size() == 1 ? alts[0] : ClassExpr::disj(std::move(alts));
}

struct Resolver {
    const SenseInventory& inventory;
    const std::vector<ProceduralTemplate>& templates;
    const Reasoner& reasoner;
    const std::map<std::string, std::string>& choices;
    const ChoiceCallback& callback;
    FactualParse parse;
    std::vector<AmbiguityItem> items;

    // ABox translation of the current (partially resolved) parse. Typed
    // atoms and entity senses contribute; `loose` additionally types
    // unresolved entities with the disjunction of their candidate senses.
    KnowledgeBase current_kb(bool loose) const {
        KnowledgeBase kb;
        kb.tbox = inventory.merged_tbox;
        for (const auto& a : parse.atoms) {
            switch (a.kind) {
            case ParaphraseAtom::Kind::Type:
                if (a.chosen_sense >= 0 && !a.subject.is_var())
                    kb.abox.assert_type(a.subject,
                                        sense_expr(a.senses[size_t(
                                            a.chosen_sense)]));
                break;
            case ParaphraseAtom::Kind::Property:
                if (!a.subject.is_var() && !a.object.is_var())
                    kb.abox.assert_role(a.subject, a.property, a.object);
                break;
            case ParaphraseAtom::Kind::NegatedExistential:
                if (a.chosen_object_sense >= 0 && !a.subject.is_var())
                    kb.abox.assert_type(
                        a.subject,
                        ClassExpr::negation(ClassExpr::exists(
                            a.role, a.inverse,
                            sense_expr(a.object_senses[size_t(
                                a.chosen_object_sense)]))));
                break;
            case ParaphraseAtom::Kind::Invocation:
                break; // procedural; not part of the static ABox
            }
        }
        for (const auto& e : parse.entities) {
            if (e.senses.empty()) continue;
            if (e.typed())
                kb.abox.assert_type(e.id, sense_expr(e.senses[size_t(e.chosen)]));
            else if (loose)
                kb.abox.assert_type(e.id, senses_expr(e.senses, -1));
        }
        return kb;
    }

    Hint probe(KnowledgeBase kb, const Term& x, const ClassExprPtr& type) const {
        kb.abox.assert_type(x, type);
        try {
            return reasoner.is_consistent(kb) ? Hint::Valid : Hint::Invalid;
        } catch (const BudgetExceeded&) {
            return Hint::Unknown;
        }
    }

    const std::string* choice_for(const std::string& site) const {
        auto it = choices.find(site);
        return it == choices.end() ? nullptr : &it->second;
    }

    // Matches a user-supplied candidate id against the candidate list;
    // noun senses also answer to their qualified name or bare prefix.
    std::string match_candidate(const AmbiguityItem& item,
                               const std::vector<NounSense>* senses,
                               const std::string& value) const {
        for (const auto& c : item.candidates)
            if (c.id == value) return c.id;
        if (senses) {
            for (size_t i = 0; i < senses->size(); ++i) {
                const auto& s = (*senses)[i];
                if (value == s.qualified() || value == s.prefix)
                    return item.candidates[i].id;
            }
        }
        throw std::runtime_error("choice '" + value +
                                 "' matches no candidate of " + item.site);
    }

    void resolve_item(AmbiguityItem& item, const std::vector<NounSense>* senses,
                      bool pick_most_recent_valid) {
        if (const std::string* v = choice_for(item.site)) {
            item.resolution = match_candidate(item, senses, *v);
            return;
        }
        std::vector<const SenseCandidate*> valid;
        for (const auto& c : item.candidates)
            if (c.hint == Hint::Valid) valid.push_back(&c);
        if (valid.size() == 1) {
            item.resolution = valid.front()->id;
            return;
        }
        if (pick_most_recent_valid && !valid.empty()) {
            item.resolution = valid.front()->id;
            return;
        }
        if (callback && !item.candidates.empty())
            item.resolution = match_candidate(item, senses, callback(item));
    }

    void substitute(const std::string& placeholder, const Term& value) {
        auto fix = [&](Term& t) {
            if (t.is_var() && t.name == placeholder) t = value;
        };
        for (auto& a : parse.atoms) {
            fix(a.subject);
            fix(a.object);
            for (auto& [slot, term] : a.slots) fix(term);
        }
    }

    void resolve_anaphors() {
        std::vector<AnaphorSite*> sites;
        for (auto& s : parse.anaphors) sites.push_back(&s);
        std::sort(sites.begin(), sites.end(),
                  [](auto* a, auto* b) { return a->token < b->token; });
        for (AnaphorSite* site : sites) {
            AmbiguityItem item;
            item.kind = AmbiguityItem::Kind::Antecedent;
            item.token = site->token;
            item.site = (site->kind == AnaphorSite::Kind::Definite
                             ? site->noun
                             : lower(site->surface)) +
                        "@" + std::to_string(site->token);

            // Mentions preceding the site, most recent first.
            std::vector<const DiscourseEntity*> mentions;
            for (const auto& e : parse.entities)
                if (e.token < site->token) mentions.push_back(&e);
            std::sort(mentions.begin(), mentions.end(),
                      [](auto* a, auto* b) { return a->token > b->token; });

            bool negated = false;
            if (site->kind == AnaphorSite::Kind::Definite) {
                // A definite re-mention answers to its own lexeme first;
                // class compatibility is the fallback.
                std::vector<const DiscourseEntity*> by_lexeme;
                for (auto* e : mentions)
                    if (lower(e->surface) == site->noun) by_lexeme.push_back(e);
                if (!by_lexeme.empty()) {
                    for (auto* e : by_lexeme)
                        item.candidates.push_back({e->id.str(), Hint::Valid});
                } else {
                    auto constraint = lexeme_expr(inventory, site->noun);
                    auto kb = current_kb(true);
                    for (auto* e : mentions) {
                        Hint h = constraint ? probe(kb, e->id, constraint)
                                            : Hint::Unknown;
                        if (h != Hint::Invalid)
                            item.candidates.push_back({e->id.str(), h});
                    }
                }
            } else {
                auto constraint = lexeme_expr(inventory, site->rule.constraint);
                negated = site->rule.negated;
                auto kb = current_kb(true);
                for (auto* e : mentions) {
                    Hint h = Hint::Unknown;
                    if (constraint) {
                        h = probe(kb, e->id, constraint);
                        if (negated)
                            h = h == Hint::Valid    ? Hint::Invalid
                                : h == Hint::Invalid ? Hint::Valid
                                                     : Hint::Unknown;
                    }
                    if (h == Hint::Valid) item.candidates.push_back({e->id.str(), h});
                }
            }
            if (item.candidates.empty()) throw NoAntecedent(item.site);

            // "it" deliberately follows plain recency; only the personal
            // pronouns surface as ambiguity sites.
            resolve_item(item, nullptr, negated);
            if (item.resolved()) {
                site->resolution = Term::parse(item.resolution);
                site->resolved = true;
                substitute(site->placeholder, site->resolution);
            }
            items.push_back(std::move(item));
        }
    }

    void resolve_noun_site(ParaphraseAtom& atom, bool object_side) {
        auto& senses = object_side ? atom.object_senses : atom.senses;
        auto& chosen = object_side ? atom.chosen_object_sense : atom.chosen_sense;
        const auto& surface = object_side ? atom.object_surface : atom.surface;
        const Term& subject = atom.subject;

        AmbiguityItem item;
        item.kind = AmbiguityItem::Kind::NounSense;
        item.token = atom.token;
        item.site = lower(surface) + "@" + std::to_string(atom.token);
        auto base = current_kb(false);
        for (const auto& s : senses) {
            ClassExprPtr type =
                object_side ? ClassExpr::negation(ClassExpr::exists(
                                  atom.role, atom.inverse, sense_expr(s)))
                            : sense_expr(s);
            Hint h = subject.is_var() ? Hint::Unknown
                                      : probe(base, subject, type);
            item.candidates.push_back({s.display, h});
        }
        resolve_item(item, &senses, false);
        if (item.resolved()) {
            for (size_t i = 0; i < senses.size(); ++i)
                if (senses[i].display == item.resolution) chosen = int(i);
            if (!object_side) {
                if (auto* e = parse.entity(subject); e && e->senses == senses)
                    e->chosen = chosen;
            }
        }
        items.push_back(std::move(item));
    }

    void resolve_verb_site(ParaphraseAtom& atom) {
        AmbiguityItem item;
        item.kind = AmbiguityItem::Kind::VerbSense;
        item.token = atom.verb_token;
        item.site = atom.verb_lemma_ + "@" + std::to_string(atom.verb_token);
        std::vector<std::string> slots;
        for (const auto& [slot, term] : atom.slots) slots.push_back(slot);
        for (const auto& name : atom.template_candidates) {
            const ProceduralTemplate* tpl = find_template(templates, name);
            bool covers = tpl && tpl->covers_slots(slots);
            item.candidates.push_back(
                {name, covers ? Hint::Valid : Hint::Invalid});
        }
        resolve_item(item, nullptr, false);
        if (item.resolved()) {
            for (size_t i = 0; i < atom.template_candidates.size(); ++i)
                if (atom.template_candidates[i] == item.resolution)
                    atom.chosen_template = int(i);
        }
        items.push_back(std::move(item));
    }

    DisambiguationResult run() {
        resolve_anaphors();
        for (auto& atom : parse.atoms) {
            if (atom.kind == ParaphraseAtom::Kind::Type &&
                atom.chosen_sense < 0 && atom.senses.size() > 1)
                resolve_noun_site(atom, false);
            if (atom.kind == ParaphraseAtom::Kind::NegatedExistential &&
                atom.chosen_object_sense < 0 && atom.object_senses.size() > 1)
                resolve_noun_site(atom, true);
        }
        for (auto& atom : parse.atoms)
            if (atom.kind == ParaphraseAtom::Kind::Invocation &&
                atom.chosen_template < 0)
                resolve_verb_site(atom);
        std::stable_sort(items.begin(), items.end(),
                         [](const AmbiguityItem& a, const AmbiguityItem& b) {
                             return a.token < b.token;
                         });
        return {std::move(parse), std::move(items)};
    }
};

} // namespace

bool DisambiguationResult::complete() const {
    for (const auto& i : items)
        if (!i.resolved()) return false;
    for (const auto& a : parse.atoms)
        if (!a.resolved()) return false;
    for (const auto& s : parse.anaphors)
        if (!s.resolved) return false;
    return true;
}

std::map<std::string, std::string> parse_choices(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        auto eq = line.find('=');
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{}
                                          : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(line).empty())
                throw std::runtime_error("choices line " +
                                         std::to_string(lineno) +
                                         ": expected 'site = candidate'");
            continue;
        }
        auto site = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (site.empty() || value.empty())
            throw std::runtime_error("choices line " + std::to_string(lineno) +
                                     ": expected 'site = candidate'");
        out[site] = value;
    }
    return out;
}

std::string ambiguity_report(const std::vector<AmbiguityItem>& items) {
    std::string out;
    for (const auto& item : items) {
        out += item.site + ":";
        for (const auto& c : item.candidates) {
            out += " " + c.id;
            out += c.hint == Hint::Valid     ? " [valid]"
                   : c.hint == Hint::Invalid ? " [invalid]"
                                             : " [?]";
        }
        out += item.resolved() ? " -> " + item.resolution : " -> unresolved";
        out += "\n";
    }
    return out;
}

DisambiguationResult disambiguate(
    const FactualParse& parse, const SenseInventory& inventory,
    const std::vector<ProceduralTemplate>& templates, const Reasoner& reasoner,
    const std::map<std::string, std::string>& choices,
    const ChoiceCallback& callback) {
    Resolver r{inventory, templates, reasoner, choices, callback, parse, {}};
    return r.run();
}

} // namespace pao
