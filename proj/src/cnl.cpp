#include "pao/cnl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace pao {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_article(const std::string& t) {
    auto l = lower(t);
    return l == "a" || l == "an";
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

} // namespace

// --- Morphology -----------------------------------------------------------

std::string verb_lemma(const std::string& s) {
    if (s == "has") return "have";
    if (s == "is") return "be";
    if (s.size() > 3 && s.ends_with("ies"))
        return s.substr(0, s.size() - 3) + "y";
    if (s.size() > 1 && s.ends_with("s") && !s.ends_with("ss"))
        return s.substr(0, s.size() - 1);
    return s;
}

std::string verb_3sg(const std::string& lemma) {
    if (lemma == "have") return "has";
    auto vowel = [](char c) { return std::string("aeiou").find(c) != std::string::npos; };
    if (lemma.size() > 1 && lemma.back() == 'y' &&
        !vowel(lemma[lemma.size() - 2]))
        return lemma.substr(0, lemma.size() - 1) + "ies";
    if (lemma.ends_with("s") || lemma.ends_with("x") || lemma.ends_with("z") ||
        lemma.ends_with("ch") || lemma.ends_with("sh") || lemma.ends_with("o"))
        return lemma + "es";
    return lemma + "s";
}

std::string participle_to_3sg(const std::string& p) {
    if (p.size() > 3 && p.ends_with("ied"))
        return p.substr(0, p.size() - 3) + "ies";
    if (p.size() > 2 && p.ends_with("ed")) {
        std::string stem = p.substr(0, p.size() - 2);
        // involved -> involve, stored -> store; contained keeps its stem.
        if (stem.ends_with("v") || stem.ends_with("r")) stem += "e";
        return verb_3sg(stem);
    }
    return verb_3sg(p);
}

std::string mwu_name(const std::string& title, const std::string& local) {
    std::string second = local;
    if (!title.empty() && !second.empty() &&
        std::islower(static_cast<unsigned char>(title[0])))
        second[0] = char(std::tolower(static_cast<unsigned char>(second[0])));
    return title + "-" + second;
}

// --- Ontological sentence grammar ----------------------------------------

namespace {

// Class reference token: "Name", "we:NATO", or "{we,ee,eu,lg}:country".
ClassExprPtr parse_qname(const std::string& tok, const std::string& home,
                         const std::vector<MicroOntology>& known) {
    if (tok.starts_with("{")) {
        auto close = tok.find("}:");
        if (close == std::string::npos)
            throw std::runtime_error("malformed brace list '" + tok + "'");
        std::vector<std::string> prefixes;
        std::string inside = tok.substr(1, close - 1);
        size_t start = 0;
        while (start <= inside.size()) {
            auto comma = inside.find(',', start);
            if (comma == std::string::npos) comma = inside.size();
            prefixes.push_back(inside.substr(start, comma - start));
            start = comma + 1;
        }
        return expand_brace_list(prefixes, tok.substr(close + 2), known);
    }
    auto colon = tok.find(':');
    if (colon != std::string::npos)
        return expand_brace_list({tok.substr(0, colon)}, tok.substr(colon + 1),
                                 known);
    return ClassExpr::named(home, tok);
}

class OntoSentence {
public:
    OntoSentence(std::vector<std::string> tokens, size_t index,
                 std::string home, const std::vector<MicroOntology>& known)
        : t_(std::move(tokens)), index_(index), home_(std::move(home)),
          known_(known) {}

    Axiom parse() {
        const std::string head = peek();
        Axiom ax = [&] {
            if (head == "If") return parse_if();
            if (head == "Every") return parse_every();
            if (head == "No") return parse_no();
            if (head == "Everything") return parse_everything();
            fail("expected Every/No/Everything/If, got '" + head + "'");
        }();
        if (i_ != t_.size()) fail("trailing tokens after '" + t_[i_ - 1] + "'");
        return ax;
    }

private:
    std::vector<std::string> t_;
    size_t i_ = 0;
    size_t index_;
    std::string home_;
    const std::vector<MicroOntology>& known_;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(index_, msg);
    }
    const std::string& peek() const {
        static const std::string end = "<end>";
        return i_ < t_.size() ? t_[i_] : end;
    }
    std::string next() {
        if (i_ >= t_.size()) fail("unexpected end of sentence");
        return t_[i_++];
    }
    bool accept(const std::string& w) {
        if (peek() != w) return false;
        ++i_;
        return true;
    }
    void expect(const std::string& w) {
        if (!accept(w)) fail("expected '" + w + "', got '" + peek() + "'");
    }
    bool accept_article() { return accept("a") || accept("an"); }

    Axiom parse_if() {
        // If X contains Y then X stores Y.  ->  SubProperty
        expect("If");
        std::string x1 = next(), v = next(), y1 = next();
        expect("then");
        std::string x2 = next(), w = next(), y2 = next();
        if (x1 != x2 || y1 != y2)
            fail("If-then sentence must repeat the same variables");
        return Axiom::sub_property(v, w);
    }

    Axiom parse_every() {
        expect("Every");
        auto lhs = class_np();
        if (peek() != "is") {
            // Every X VERBs a Y.
            std::string v = next();
            auto obj = parse_object();
            return Axiom::sub_class(lhs, ClassExpr::exists(v, false, obj));
        }
        expect("is");
        return Axiom::sub_class(lhs, complement());
    }

    Axiom parse_no() {
        expect("No");
        auto lhs = class_np_rel();
        expect("is");
        if (accept_article()) return Axiom::disjoint(lhs, class_np_rel());
        // No X is VERBed by a Y.
        std::string part = next();
        expect("by");
        auto obj = parse_object();
        return Axiom::disjoint(
            lhs, ClassExpr::exists(participle_to_3sg(part), true, obj));
    }

    Axiom parse_everything() {
        expect("Everything");
        expect("that");
        auto lhs = rel_pred();
        expect("is");
        accept_article();
        if (accept("something")) return Axiom::sub_class(lhs, ClassExpr::top());
        return Axiom::sub_class(lhs, class_np_rel());
    }

    // Complement after "is": a class (with relative clauses), "something",
    // or a passive verb phrase.
    ClassExprPtr complement() {
        if (accept_article()) return class_np_rel();
        if (accept("something")) {
            if (accept("that")) return rel_clause_body();
            return ClassExpr::top();
        }
        bool neg = accept("not");
        std::string part = next();
        expect("by");
        auto e = ClassExpr::exists(participle_to_3sg(part), true,
                                   parse_object());
        return neg ? ClassExpr::negation(e) : e;
    }

    ClassExprPtr class_np() { return parse_qname(next(), home_, known_); }

    ClassExprPtr class_np_rel() {
        auto head = class_np();
        if (!accept("that")) return head;
        return ClassExpr::conj({head, rel_clause_body()});
    }

    // Relative-clause predicates after an already-consumed "that";
    // "or that" / "and that" chains combine the predicates.
    ClassExprPtr rel_clause_body() {
        std::vector<ClassExprPtr> preds = {rel_pred()};
        bool disjunctive = false;
        while (peek() == "or" || peek() == "and") {
            disjunctive = next() == "or";
            expect("that");
            preds.push_back(rel_pred());
        }
        if (preds.size() == 1) return preds[0];
        return disjunctive ? ClassExpr::disj(std::move(preds))
                           : ClassExpr::conj(std::move(preds));
    }

    ClassExprPtr rel_pred() {
        if (accept("is")) {
            bool neg = accept("not");
            ClassExprPtr e;
            if (accept_article()) {
                e = class_np_rel();
            } else if (accept("something")) {
                e = ClassExpr::top();
            } else {
                std::string part = next();
                expect("by");
                e = ClassExpr::exists(participle_to_3sg(part), true,
                                      parse_object());
            }
            return neg ? ClassExpr::negation(e) : e;
        }
        // Active verb: "that has a roof", "that contains something".
        std::string v = next();
        return ClassExpr::exists(v, false, parse_object());
    }

    ClassExprPtr parse_object() {
        if (accept("something")) {
            if (accept("that")) return rel_clause_body();
            return ClassExpr::top();
        }
        accept_article();
        return class_np_rel();
    }
};

// Splits a line into period-terminated sentences of word tokens.
std::vector<std::vector<std::string>> line_sentences(const std::string& line) {
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::string> current;
    for (auto& raw : split_ws(line)) {
        std::string w = raw;
        bool ends = false;
        while (!w.empty() && w.back() == '.') {
            w.pop_back();
            ends = true;
        }
        if (!w.empty()) current.push_back(w);
        if (ends && !current.empty()) {
            sentences.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

bool is_named(const ClassExprPtr& e) {
    return e->kind == ClassExpr::Kind::Named;
}

std::string strip_comment(const std::string& line) {
    auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

} // namespace

std::vector<Axiom> parse_ontological(const std::string& text,
                                     const std::string& prefix,
                                     const std::vector<MicroOntology>& loaded) {
    // The home ontology may reference itself before registration.
    std::vector<MicroOntology> known = loaded;
    if (std::none_of(known.begin(), known.end(),
                     [&](const auto& o) { return o.prefix == prefix; })) {
        MicroOntology self;
        self.prefix = prefix;
        known.push_back(self);
    }

    std::vector<Axiom> axioms;
    size_t sentence_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = strip_comment(line);
        if (split_ws(line).empty()) continue;
        std::vector<Axiom> line_axioms;
        for (auto& sent : line_sentences(line))
            line_axioms.push_back(
                OntoSentence(sent, sentence_no++, prefix, known).parse());
        // Two mirrored SubClass sentences on one line mean equivalence.
        if (line_axioms.size() == 2 &&
            line_axioms[0].kind == Axiom::Kind::SubClass &&
            line_axioms[1].kind == Axiom::Kind::SubClass &&
            is_named(line_axioms[0].lhs) && is_named(line_axioms[0].rhs) &&
            equal(line_axioms[0].lhs, line_axioms[1].rhs) &&
            equal(line_axioms[0].rhs, line_axioms[1].lhs)) {
            axioms.push_back(
                Axiom::equivalent(line_axioms[0].lhs, line_axioms[0].rhs));
        } else {
            for (auto& ax : line_axioms) axioms.push_back(std::move(ax));
        }
    }
    return axioms;
}

namespace {

PropertyDecl parse_property_line(const std::vector<std::string>& toks,
                                 const std::string& home,
                                 const std::vector<MicroOntology>& known) {
    PropertyDecl decl;
    if (toks.size() < 2)
        throw std::runtime_error("@property needs a name");
    decl.name = toks[1];
    size_t i = 2;
    while (i < toks.size()) {
        if (toks[i] == "universal") {
            decl.universal = true;
            ++i;
        } else if (toks[i] == "domain" && i + 1 < toks.size()) {
            decl.domain = parse_qname(toks[i + 1], home, known);
            i += 2;
        } else if (toks[i] == "range" && i + 1 < toks.size()) {
            decl.range = parse_qname(toks[i + 1], home, known);
            i += 2;
        } else {
            throw std::runtime_error("bad @property clause '" + toks[i] + "'");
        }
    }
    return decl;
}

} // namespace

MicroOntology parse_ontology(const std::string& text,
                             const std::vector<MicroOntology>& already_loaded) {
    MicroOntology onto;
    std::string body;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string bare = strip_comment(line);
        auto toks = split_ws(bare);
        if (toks.empty()) continue;
        if (toks[0] == "@prefix") {
            if (toks.size() < 3)
                throw std::runtime_error("@prefix needs id and iri");
            onto.prefix = toks[1];
            onto.iri = toks[2];
            auto q1 = bare.find('"');
            auto q2 = bare.rfind('"');
            onto.title = (q1 != std::string::npos && q2 > q1)
                             ? bare.substr(q1 + 1, q2 - q1 - 1)
                             : onto.prefix;
        } else if (toks[0] == "@property") {
            std::vector<MicroOntology> known = already_loaded;
            known.push_back(onto);
            onto.properties.push_back(
                parse_property_line(toks, onto.prefix, known));
        } else {
            body += bare + "\n";
        }
    }
    if (onto.prefix.empty())
        throw std::runtime_error("ontology file lacks an @prefix line");
    onto.axioms = parse_ontological(body, onto.prefix, already_loaded);
    return onto;
}

std::vector<MicroOntology> load_ontology_files(
    const std::vector<std::string>& paths) {
    std::vector<std::string> texts;
    for (const auto& path : paths) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open '" + path + "'");
        std::stringstream buf;
        buf << f.rdbuf();
        texts.push_back(buf.str());
    }
    // Pre-register every @prefix so cross-references between the files
    // resolve regardless of the order they were given in.
    std::vector<MicroOntology> stubs;
    for (const auto& text : texts) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            auto toks = split_ws(strip_comment(line));
            if (toks.size() >= 3 && toks[0] == "@prefix") {
                MicroOntology stub;
                stub.prefix = toks[1];
                stub.iri = toks[2];
                stubs.push_back(std::move(stub));
            }
        }
    }
    std::vector<MicroOntology> out;
    for (const auto& text : texts) out.push_back(parse_ontology(text, stubs));
    return out;
}

// --- Lexicon --------------------------------------------------------------

const std::vector<NounSense>* Lexicon::noun_senses(
    const std::string& word) const {
    auto it = nouns.find(lower(word));
    return it == nouns.end() ? nullptr : &it->second;
}

namespace {

void walk_named(const ClassExprPtr& e,
                const std::function<void(const ClassExprPtr&)>& fn) {
    if (!e) return;
    if (e->kind == ClassExpr::Kind::Named) fn(e);
    for (const auto& a : e->args) walk_named(a, fn);
}

void walk_roles(const ClassExprPtr& e, std::set<std::string>& roles) {
    if (!e) return;
    if (e->kind == ClassExpr::Kind::Exists ||
        e->kind == ClassExpr::Kind::Forall)
        roles.insert(e->role);
    for (const auto& a : e->args) walk_roles(a, roles);
}

void register_properties(Lexicon& lex, const MicroOntology& onto) {
    for (const auto& ax : onto.axioms) {
        std::set<std::string> roles;
        walk_roles(ax.lhs, roles);
        walk_roles(ax.rhs, roles);
        if (ax.kind == Axiom::Kind::SubProperty) {
            roles.insert(ax.role);
            roles.insert(ax.role2);
        }
        for (const auto& r : roles) lex.property_verbs.insert(r);
    }
    for (const auto& p : onto.properties) {
        lex.property_verbs.insert(p.name);
        if (p.name.starts_with("has") && p.name.size() > 3 &&
            std::isupper(static_cast<unsigned char>(p.name[3]))) {
            lex.has_properties[lower(p.name.substr(3))] = p.name;
        }
        if (p.range && (*p.range)->kind == ClassExpr::Kind::Named) {
            NounSense s{(*p.range)->prefix, (*p.range)->name, (*p.range)->name};
            lex.property_ranges[p.name] = s;
        }
    }
}

void default_pronouns(Lexicon& lex) {
    for (const char* p : {"she", "he", "her", "his"})
        lex.pronouns[p] = {"human", false};
    lex.pronouns["it"] = {"human", true};
}

} // namespace

Lexicon lexicon_from_ontologies(const std::vector<MicroOntology>& ontologies) {
    Lexicon lex;
    std::map<std::string, std::set<std::pair<std::string, std::string>>> found;
    std::map<std::string, std::string> titles;
    for (const auto& onto : ontologies) {
        titles[onto.prefix] = onto.title;
        auto collect = [&](const ClassExprPtr& e) {
            if (e->prefix == onto.prefix)
                found[lower(e->name)].insert({e->prefix, e->name});
        };
        for (const auto& ax : onto.axioms) {
            walk_named(ax.lhs, collect);
            walk_named(ax.rhs, collect);
        }
        for (const auto& p : onto.properties) {
            if (p.domain) walk_named(*p.domain, collect);
            if (p.range) walk_named(*p.range, collect);
        }
        register_properties(lex, onto);
    }
    for (const auto& [lexeme, classes] : found) {
        for (const auto& [prefix, name] : classes) {
            NounSense s{prefix, name,
                        classes.size() > 1 ? mwu_name(titles[prefix], name)
                                           : name};
            lex.nouns[lexeme].push_back(s);
        }
    }
    default_pronouns(lex);
    return lex;
}

void add_template_verbs(Lexicon& lexicon, const std::string& template_name,
                        const std::vector<std::string>& lexical_units) {
    for (const auto& lu : lexical_units)
        lexicon.template_verbs[lu].push_back(template_name);
}

// --- Factual parsing ------------------------------------------------------

bool ParaphraseAtom::resolved() const {
    if (subject.is_var() || object.is_var()) return false;
    for (const auto& [slot, term] : slots)
        if (term.is_var()) return false;
    switch (kind) {
    case Kind::Type: return chosen_sense >= 0;
    case Kind::Property: return true;
    case Kind::Invocation: return chosen_template >= 0;
    case Kind::NegatedExistential: return chosen_object_sense >= 0;
    }
    return false;
}

DiscourseEntity* FactualParse::entity(const Term& id) {
    for (auto& e : entities)
        if (e.id == id) return &e;
    return nullptr;
}
const DiscourseEntity* FactualParse::entity(const Term& id) const {
    for (const auto& e : entities)
        if (e.id == id) return &e;
    return nullptr;
}

namespace {

struct FTok {
    std::string text;
    size_t head = 0; // discourse-token index of the word's head segment
    bool sentence_end = false;
};

// Token weight: CamelCase compounds (mixed case with internal capitals)
// count one per capitalized segment, which is what makes
// "LittleRedRidingHood" occupy tokens 1-4 and mint obj4.
size_t token_weight(const std::string& w) {
    bool has_lower = std::any_of(w.begin(), w.end(), [](unsigned char c) {
        return std::islower(c);
    });
    if (!has_lower) return 1;
    size_t caps = 0;
    for (size_t i = 1; i < w.size(); ++i)
        if (std::isupper(static_cast<unsigned char>(w[i]))) ++caps;
    return 1 + caps;
}

bool verb_like(const Lexicon& lex, const std::string& w) {
    return lex.template_verbs.count(verb_lemma(w)) > 0 ||
           lex.property_verbs.count(w) > 0 || w.find('-') != std::string::npos;
}

std::vector<FTok> tokenize_factual(const std::string& text,
                                   const Lexicon& lex) {
    std::vector<FTok> toks;
    size_t counter = 0;
    std::string prev;
    for (auto& raw : split_ws(text)) {
        std::string w = raw;
        bool ends = false;
        while (!w.empty() && (w.back() == '.' || w.back() == ',')) {
            if (w.back() == '.') ends = true;
            w.pop_back();
        }
        if (!w.empty()) {
            // An elided subject after VP-coordinating "and" occupies one
            // silent token position.
            if (lower(prev) == "and" && verb_like(lex, w)) ++counter;
            counter += token_weight(w);
            toks.push_back({w, counter, false});
            prev = w;
        }
        if (ends && !toks.empty()) {
            toks.back().sentence_end = true;
            prev.clear();
        }
    }
    return toks;
}

const std::set<std::string> kPrepositions = {"in",   "with", "from", "to",
                                             "at",   "on",   "into"};

class FactParser {
public:
    FactParser(const std::string& text, const Lexicon& lex) : lex_(lex) {
        toks_ = tokenize_factual(text, lex);
        size_t total = toks_.empty() ? 0 : toks_.back().head;
        out_.tokens.assign(total + 1, "");
        for (const auto& t : toks_) {
            out_.tokens[t.head] = t.text;
            if (t.sentence_end) out_.sentence_ends.insert(t.head);
        }
    }

    FactualParse run() {
        while (pos_ < toks_.size()) {
            parse_sentence();
            ++sentence_no_;
        }
        assign_labels();
        return std::move(out_);
    }

private:
    const Lexicon& lex_;
    std::vector<FTok> toks_;
    size_t pos_ = 0;
    size_t sentence_no_ = 0;
    int next_ref_ = 0;
    std::map<std::string, Term> aliases_; // X1-style tags
    FactualParse out_;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(sentence_no_, msg);
    }
    bool at_end() const { return pos_ >= toks_.size(); }
    const FTok& cur() {
        if (at_end()) fail("unexpected end of text");
        return toks_[pos_];
    }
    std::string peek(size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead].text : "";
    }
    FTok next() {
        auto t = cur();
        ++pos_;
        return t;
    }
    bool accept(const std::string& w) {
        if (at_end() || lower(toks_[pos_].text) != lower(w)) return false;
        ++pos_;
        return true;
    }

    static bool is_tag(const std::string& w) {
        return w.size() >= 2 && w[0] == 'X' &&
               w.find_first_not_of("0123456789", 1) == std::string::npos;
    }

    // Discourse-id reference ("obj4"; "Obj4" at sentence starts).
    static bool is_obj_ref(const std::string& w) {
        auto l = lower(w);
        return l.size() > 3 && l.rfind("obj", 0) == 0 &&
               l.find_first_not_of("0123456789", 3) == std::string::npos;
    }

    bool np_start(const std::string& w) const {
        auto l = lower(w);
        if (is_article(w) || l == "the" || l == "her" || l == "his") return true;
        if (lex_.pronouns.count(l)) return true;
        if (is_obj_ref(w)) return true;
        if (is_tag(w)) return true;
        if (lex_.noun_senses(w)) return true;
        return mwu_sense(w) != nullptr;
    }

    const NounSense* mwu_sense(const std::string& w) const {
        if (w.find('-') == std::string::npos) return nullptr;
        for (const auto& [lexeme, senses] : lex_.nouns)
            for (const auto& s : senses)
                if (s.display == w) return &s;
        return nullptr;
    }

    Term fresh_ref() {
        return Term::var("ref" + std::to_string(next_ref_++));
    }

    // Deferred per-NP atoms: a type assertion, a possessive property, or a
    // negated existential; flushed after the clause's verb atom.
    std::vector<ParaphraseAtom> pending_;

    struct NPRef {
        Term term;
        bool minted = false;
        std::vector<NounSense> senses; // class-only NPs (no discourse id)
        std::string surface;
        size_t head = 0;
    };

    std::vector<NounSense> lookup_noun(const std::string& w) {
        if (const auto* s = lex_.noun_senses(w)) return *s;
        if (const auto* s = mwu_sense(w)) return {*s};
        throw UnknownWord(sentence_no_, w);
    }

    DiscourseEntity& mint(const std::string& surface, size_t head,
                          std::vector<NounSense> senses) {
        DiscourseEntity e;
        e.id = Term::anon(int64_t(head));
        e.surface = surface;
        e.token = head;
        e.senses = std::move(senses);
        if (e.senses.size() == 1) e.chosen = 0;
        out_.entities.push_back(std::move(e));
        return out_.entities.back();
    }

    ParaphraseAtom type_atom(const Term& id, std::vector<NounSense> senses,
                             const std::string& surface, size_t head) {
        ParaphraseAtom a;
        a.kind = ParaphraseAtom::Kind::Type;
        a.subject = id;
        a.senses = std::move(senses);
        if (a.senses.size() == 1) a.chosen_sense = 0;
        a.surface = surface;
        a.token = head;
        return a;
    }

    // "that is not VERBed by a Noun" or "that VERBs a Noun".
    void parse_np_rel_clause(const Term& subject) {
        // caller consumed "that"
        if (accept("is")) {
            bool neg = accept("not");
            std::string part = next().text;
            if (!accept("by")) fail("expected 'by' after '" + part + "'");
            accept("a") || accept("an");
            auto obj = next();
            auto senses = lookup_noun(obj.text);
            if (neg) {
                ParaphraseAtom a;
                a.kind = ParaphraseAtom::Kind::NegatedExistential;
                a.subject = subject;
                a.role = participle_to_3sg(part);
                a.inverse = true;
                a.object_senses = senses;
                if (a.object_senses.size() == 1) a.chosen_object_sense = 0;
                a.object_surface = obj.text;
                a.token = obj.head;
                pending_.push_back(std::move(a));
            } else {
                // positive passive: Y VERBs subject
                auto np = mint(obj.text, obj.head, senses);
                pending_.push_back(type_atom(np.id, np.senses, obj.text,
                                             obj.head));
                ParaphraseAtom a;
                a.kind = ParaphraseAtom::Kind::Property;
                a.subject = np.id;
                a.property = participle_to_3sg(part);
                a.object = subject;
                pending_.push_back(std::move(a));
            }
            return;
        }
        // active verb
        std::string v = next().text;
        if (!lex_.property_verbs.count(v))
            fail("unknown property verb '" + v + "' in relative clause");
        auto obj_np = parse_np(subject);
        ParaphraseAtom a;
        a.kind = ParaphraseAtom::Kind::Property;
        a.subject = subject;
        a.property = v;
        a.object = obj_np.term;
        pending_.push_back(std::move(a));
    }

    NPRef parse_np(const Term& clause_subject, bool allow_rel = true) {
        const FTok first = cur();
        const std::string fl = lower(first.text);

        if (is_article(first.text)) {
            next();
            auto noun = next();
            auto senses = lookup_noun(noun.text);
            // mint() returns a reference into a vector; copy out what we
            // need before relative clauses can mint further entities.
            auto& e = mint(noun.text, noun.head, senses);
            Term id = e.id;
            auto esenses = e.senses;
            if (!at_end() && is_tag(peek())) aliases_[next().text] = id;
            pending_.push_back(type_atom(id, esenses, noun.text, noun.head));
            if (allow_rel && accept("that")) parse_np_rel_clause(id);
            return {id, true, esenses, noun.text, noun.head};
        }
        if (fl == "the") {
            next();
            auto noun = next();
            auto senses = lookup_noun(noun.text);
            if (!at_end() && is_tag(peek())) {
                auto tag = next().text;
                auto it = aliases_.find(tag);
                if (it == aliases_.end()) fail("unknown tag " + tag);
                return {it->second, false, senses, noun.text, noun.head};
            }
            AnaphorSite site;
            site.placeholder = "ref" + std::to_string(next_ref_);
            Term ph = fresh_ref();
            site.kind = AnaphorSite::Kind::Definite;
            site.surface = "the " + noun.text;
            site.noun = lower(noun.text);
            site.token = noun.head;
            out_.anaphors.push_back(site);
            return {ph, false, senses, noun.text, noun.head};
        }
        if ((fl == "her" || fl == "his") && !at_end() &&
            pos_ + 1 < toks_.size() &&
            lex_.has_properties.count(lower(peek(1)))) {
            next();
            auto noun = next();
            auto prop = lex_.has_properties.at(lower(noun.text));
            std::vector<NounSense> senses;
            if (auto it = lex_.property_ranges.find(prop);
                it != lex_.property_ranges.end())
                senses.push_back(it->second);
            auto& e = mint(noun.text, noun.head, senses);
            ParaphraseAtom a;
            a.kind = ParaphraseAtom::Kind::Property;
            a.subject = clause_subject;
            a.property = prop;
            a.object = e.id;
            pending_.push_back(std::move(a));
            return {e.id, true, e.senses, noun.text, noun.head};
        }
        if (lex_.pronouns.count(fl)) {
            auto tok = next();
            AnaphorSite site;
            site.placeholder = "ref" + std::to_string(next_ref_);
            Term ph = fresh_ref();
            site.kind = AnaphorSite::Kind::Pronoun;
            site.surface = fl;
            site.token = tok.head;
            site.rule = lex_.pronouns.at(fl);
            out_.anaphors.push_back(site);
            return {ph, false, {}, fl, tok.head};
        }
        if (is_obj_ref(first.text)) {
            auto tok = next();
            Term id = Term::parse(lower(tok.text)); // Obj4 and obj4 alike
            if (!out_.entity(id)) mint_existing(id, tok);
            return {id, false, {}, tok.text, tok.head};
        }
        // Proper noun or MWU: reuse an entity with the same surface.
        auto tok = next();
        auto senses = lookup_noun(tok.text);
        for (auto& e : out_.entities)
            if (e.surface == tok.text)
                return {e.id, false, e.senses, tok.text, tok.head};
        auto& e = mint(tok.text, tok.head, senses);
        Term id = e.id;
        auto esenses = e.senses;
        pending_.push_back(type_atom(id, esenses, tok.text, tok.head));
        if (allow_rel && accept("that")) parse_np_rel_clause(id);
        return {id, true, esenses, tok.text, tok.head};
    }

    void mint_existing(const Term& id, const FTok& tok) {
        DiscourseEntity e;
        e.id = id;
        e.surface = tok.text;
        e.token = tok.head;
        out_.entities.push_back(std::move(e));
    }

    void flush_pending() {
        for (auto& a : pending_) out_.atoms.push_back(std::move(a));
        pending_.clear();
    }

    void parse_vp(const Term& subject) {
        auto vtok = next();
        std::string v = vtok.text;

        if (lower(v) == "is") {
            // copula: "Obj4 is a LittleRedRidingHood."
            accept("a") || accept("an");
            auto noun = next();
            auto senses = lookup_noun(noun.text);
            auto atom = type_atom(subject, senses, noun.text, noun.head);
            if (auto* e = out_.entity(subject); e && e->senses.empty()) {
                e->senses = senses;
                if (senses.size() == 1) e->chosen = 0;
            }
            out_.atoms.push_back(std::move(atom));
            flush_pending();
            return;
        }

        std::string mwu_template;
        if (auto dash = v.find('-');
            dash != std::string::npos && !lex_.property_verbs.count(v)) {
            mwu_template = v.substr(0, dash);
            v = v.substr(dash + 1);
        }
        std::string lemma = verb_lemma(v);

        ParaphraseAtom atom;
        bool invocation = lex_.template_verbs.count(lemma) > 0;
        if (invocation) {
            atom.kind = ParaphraseAtom::Kind::Invocation;
            atom.subject = subject;
            atom.verb_surface = v;
            atom.verb_lemma_ = lemma;
            atom.verb_token = vtok.head;
            atom.template_candidates = lex_.template_verbs.at(lemma);
            if (!mwu_template.empty()) {
                for (size_t k = 0; k < atom.template_candidates.size(); ++k)
                    if (lower(atom.template_candidates[k]) ==
                        lower(mwu_template))
                        atom.chosen_template = int(k);
                if (atom.chosen_template < 0)
                    fail("no template named '" + mwu_template + "'");
            } else if (atom.template_candidates.size() == 1) {
                atom.chosen_template = 0;
            }
            atom.slots.emplace_back("subject", subject);
        } else if (lex_.property_verbs.count(vtok.text)) {
            atom.kind = ParaphraseAtom::Kind::Property;
            atom.subject = subject;
            atom.property = vtok.text;
        } else {
            throw UnknownWord(sentence_no_, vtok.text);
        }

        // direct object
        if (!at_end() && !sentence_boundary() &&
            !kPrepositions.count(lower(peek())) && np_start(peek())) {
            auto obj = parse_np(subject);
            if (invocation)
                atom.slots.emplace_back("object", obj.term);
            else
                atom.object = obj.term;
        }
        // prepositional phrases
        while (!at_end() && !sentence_boundary() &&
               kPrepositions.count(lower(peek()))) {
            auto prep = lower(next().text);
            auto np = parse_np(subject);
            if (!invocation)
                fail("unexpected preposition '" + prep +
                     "' after property verb");
            atom.slots.emplace_back(prep, np.term);
        }

        if (atom.kind == ParaphraseAtom::Kind::Property &&
            atom.object.kind == Term::Kind::Iri && atom.object.name.empty())
            fail("property verb '" + vtok.text + "' needs an object");

        out_.atoms.push_back(std::move(atom));
        flush_pending();
    }

    bool sentence_boundary() const {
        return pos_ > 0 && toks_[pos_ - 1].sentence_end;
    }

    void parse_sentence() {
        if (lower(peek()) == "there" && lower(peek(1)) == "is") {
            next();
            next();
            parse_np(Term{});
            flush_pending();
            if (!sentence_boundary()) fail("expected end of sentence");
            return;
        }
        if (lower(peek()) == "it" && lower(peek(1)) == "is" &&
            lower(peek(2)) == "false" && lower(peek(3)) == "that") {
            pos_ += 4;
            accept("a") || accept("an");
            auto cls = next();
            auto cls_senses = lookup_noun(cls.text);
            auto v = next();
            auto obj = parse_np(Term{});
            ParaphraseAtom a;
            a.kind = ParaphraseAtom::Kind::NegatedExistential;
            a.subject = obj.term;
            a.role = v.text;
            a.inverse = true;
            a.object_senses = cls_senses;
            if (a.object_senses.size() == 1) a.chosen_object_sense = 0;
            a.object_surface = cls.text;
            a.token = cls.head;
            out_.atoms.push_back(std::move(a));
            flush_pending();
            if (!sentence_boundary()) fail("expected end of sentence");
            return;
        }

        auto subj = parse_np(Term{});
        // Subject introductions precede the clause's verb atom
        // ("Obj4 is a LittleRedRidingHood" renders before the invocation).
        flush_pending();
        parse_vp(subj.term);
        while (!sentence_boundary() && accept("and")) parse_vp(subj.term);
        if (!sentence_boundary()) fail("expected end of sentence");
    }

    void assign_labels() {
        for (size_t i = 0; i < out_.atoms.size(); ++i) {
            std::string label;
            size_t n = i;
            do {
                label.insert(label.begin(), char('A' + n % 26));
                n = n / 26;
            } while (n-- > 0);
            out_.atoms[i].label = label;
        }
    }
};

} // namespace

FactualParse parse_factual(const std::string& text, const Lexicon& lexicon) {
    return FactParser(text, lexicon).run();
}

// --- Rendering ------------------------------------------------------------

namespace {

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = char(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string article_for(const std::string& w) {
    return (!w.empty() &&
            std::string("aeiouAEIOU").find(w[0]) != std::string::npos)
               ? "an"
               : "a";
}

std::string type_display(const ParaphraseAtom& a) {
    if (a.senses.size() > 1) return a.senses[size_t(a.chosen_sense)].display;
    return a.surface;
}

std::string verb_display(const ParaphraseAtom& a) {
    if (a.template_candidates.size() > 1)
        return lower(a.template_candidates[size_t(a.chosen_template)]) + "-" +
               a.verb_surface;
    return a.verb_surface;
}

void require_resolved(const FactualParse& parse) {
    std::string open;
    for (const auto& a : parse.atoms)
        if (!a.resolved()) open += (open.empty() ? "" : ", ") + a.label;
    for (const auto& s : parse.anaphors)
        if (!s.resolved)
            open += (open.empty() ? "" : ", ") + s.surface + "@" +
                    std::to_string(s.token);
    if (!open.empty()) throw UnresolvedAmbiguity(open);
}

} // namespace

std::string render_paraphrase(const FactualParse& parse) {
    require_resolved(parse);
    std::string out;
    for (const auto& a : parse.atoms) {
        std::string line;
        switch (a.kind) {
        case ParaphraseAtom::Kind::Type: {
            auto d = type_display(a);
            line = capitalize(a.subject.str()) + " is " + article_for(d) +
                   " " + d + ".";
            break;
        }
        case ParaphraseAtom::Kind::Property:
            line = capitalize(a.subject.str()) + " " + a.property + " " +
                   a.object.str() + ".";
            break;
        case ParaphraseAtom::Kind::Invocation: {
            line = capitalize(a.subject.str()) + " " + verb_display(a);
            for (const auto& [slot, term] : a.slots) {
                if (slot == "subject") continue;
                if (slot == "object")
                    line += " " + term.str();
                else
                    line += " " + slot + " " + term.str();
            }
            line += ".";
            break;
        }
        case ParaphraseAtom::Kind::NegatedExistential: {
            std::string d =
                a.object_senses.size() > 1
                    ? a.object_senses[size_t(a.chosen_object_sense)].display
                    : a.object_surface;
            line = "It is false that " + article_for(d) + " " + d + " " +
                   a.role + " " + a.subject.str() + ".";
            break;
        }
        }
        out += line + "\n";
    }
    return out;
}

std::string render_resolved(const FactualParse& parse) {
    require_resolved(parse);
    std::vector<std::string> toks = parse.tokens;
    for (const auto& a : parse.atoms) {
        if (a.kind == ParaphraseAtom::Kind::Type && a.senses.size() > 1)
            toks[a.token] = a.senses[size_t(a.chosen_sense)].display;
        if (a.kind == ParaphraseAtom::Kind::NegatedExistential &&
            a.object_senses.size() > 1)
            toks[a.token] =
                a.object_senses[size_t(a.chosen_object_sense)].display;
        if (a.kind == ParaphraseAtom::Kind::Invocation &&
            a.template_candidates.size() > 1)
            toks[a.verb_token] = verb_display(a);
    }
    for (const auto& s : parse.anaphors) {
        if (s.kind != AnaphorSite::Kind::Pronoun) continue;
        std::string who = s.resolution.str();
        if (const auto* e = parse.entity(s.resolution); e && e->typed())
            who = e->senses[size_t(e->chosen)].display;
        toks[s.token] += "-" + who;
    }
    std::string out;
    for (size_t i = 1; i < toks.size(); ++i) {
        if (toks[i].empty()) continue;
        if (!out.empty()) out += " ";
        out += toks[i];
        if (parse.sentence_ends.count(i)) out += ".";
    }
    return out;
}

} // namespace pao
