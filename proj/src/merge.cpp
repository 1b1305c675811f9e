#include "pao/merge.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace pao {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct SenseClass {
    std::string prefix;
    std::string name;

    std::string qualified() const { return prefix + ":" + name; }
};

// Class declaration occurrences: Named expressions carrying the home
// prefix. Foreign-prefix references in bridging ontologies do not count.
void collect_own_classes(const MicroOntology& onto,
                         std::map<std::string, std::set<std::pair<
                             std::string, std::string>>>& by_lexeme) {
    std::function<void(const ClassExprPtr&)> walk =
        [&](const ClassExprPtr& e) {
            if (!e) return;
            if (e->kind == ClassExpr::Kind::Named && e->prefix == onto.prefix)
                by_lexeme[lower(e->name)].insert({e->prefix, e->name});
            for (const auto& a : e->args) walk(a);
        };
    for (const auto& ax : onto.axioms) {
        walk(ax.lhs);
        walk(ax.rhs);
    }
    for (const auto& p : onto.properties) {
        if (p.domain) walk(*p.domain);
        if (p.range) walk(*p.range);
    }
}

struct UnionFind {
    std::map<std::string, std::string> parent;

    std::string find(const std::string& x) {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return it->second = find(it->second);
    }
    void unite(const std::string& a, const std::string& b) {
        parent[find(a)] = find(b);
    }
};

} // namespace

const SenseGroup* SenseInventory::group_of(const std::string& qualified) const {
    for (const auto& g : groups)
        if (std::find(g.members.begin(), g.members.end(), qualified) !=
            g.members.end())
            return &g;
    return nullptr;
}

const MicroOntology* SenseInventory::ontology(const std::string& prefix) const {
    for (const auto& o : ontologies)
        if (o.prefix == prefix) return &o;
    return nullptr;
}

std::string mint_mwu(const SenseGroup& group, size_t groups_of_lexeme,
                     const SenseInventory& inventory) {
    for (const auto& member : group.members) {
        auto it = inventory.aliases.find(member);
        if (it != inventory.aliases.end()) return it->second;
    }
    auto split = [](const std::string& q) {
        auto colon = q.find(':');
        return std::pair{q.substr(0, colon), q.substr(colon + 1)};
    };
    auto [first_prefix, local] = split(group.members.front());
    if (groups_of_lexeme <= 1) return local;
    const MicroOntology* onto = inventory.ontology(first_prefix);
    return mwu_name(onto ? onto->title : first_prefix, local);
}

SenseInventory partition_senses(
    const std::vector<MicroOntology>& ontologies, const Reasoner& reasoner,
    const std::map<std::string, std::string>& aliases) {
    SenseInventory inv;
    inv.ontologies = ontologies;
    inv.aliases = aliases;

    // Stage 0: each input must be individually consistent, then the plain
    // union must be as well.
    for (const auto& onto : ontologies) {
        KnowledgeBase kb;
        kb.tbox = onto.axioms;
        for (auto& ax : property_axioms(onto)) kb.tbox.push_back(ax);
        if (!reasoner.is_consistent(kb))
            throw InconsistentInput("micro-ontology '" + onto.prefix +
                                    "' is inconsistent on its own");
    }
    for (const auto& onto : ontologies) {
        for (const auto& ax : onto.axioms) inv.merged_tbox.push_back(ax);
        for (auto& ax : property_axioms(onto)) inv.merged_tbox.push_back(ax);
    }
    {
        KnowledgeBase kb;
        kb.tbox = inv.merged_tbox;
        if (!reasoner.is_consistent(kb))
            throw InconsistentInput(
                "the plain union of the micro-ontologies is inconsistent");
    }

    std::map<std::string, std::set<std::pair<std::string, std::string>>>
        by_lexeme;
    for (const auto& onto : ontologies) collect_own_classes(onto, by_lexeme);

    // Stage 1: probe SubClass insertions between same-named classes, in
    // lexicographic order (local name, then the two prefixes), trying
    // X ⊑ Y before Y ⊑ X.
    struct Probe {
        std::string lexeme;
        SenseClass sub, super;
    };
    std::vector<Probe> probes;
    for (const auto& [lexeme, classes] : by_lexeme) {
        std::vector<SenseClass> cs;
        for (const auto& [p, n] : classes) cs.push_back({p, n});
        std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) {
            return std::tie(a.name, a.prefix) < std::tie(b.name, b.prefix);
        });
        for (size_t i = 0; i < cs.size(); ++i)
            for (size_t j = i + 1; j < cs.size(); ++j) {
                probes.push_back({lexeme, cs[i], cs[j]});
                probes.push_back({lexeme, cs[j], cs[i]});
            }
    }
    std::sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) {
        auto key = [](const Probe& p) {
            // Unordered-pair key first, then direction (X ⊑ Y precedes).
            auto lo = std::min(p.sub.qualified(), p.super.qualified());
            auto hi = std::max(p.sub.qualified(), p.super.qualified());
            return std::tuple{std::min(p.sub.name, p.super.name), lo, hi,
                              p.sub.qualified()};
        };
        return key(a) < key(b);
    });

    std::set<std::pair<std::string, std::string>> kept;
    for (const auto& probe : probes) {
        Axiom candidate = Axiom::sub_class(
            ClassExpr::named(probe.sub.prefix, probe.sub.name),
            ClassExpr::named(probe.super.prefix, probe.super.name));
        KnowledgeBase kb;
        kb.tbox = inv.merged_tbox;
        kb.tbox.push_back(candidate);
        bool ok = reasoner.is_consistent(kb);
        InsertionLogEntry entry;
        entry.lexeme = probe.lexeme;
        entry.sub = probe.sub.qualified();
        entry.super = probe.super.qualified();
        entry.kept = ok;
        entry.reason = ok ? "merged ontology stays consistent"
                          : "insertion makes a class unsatisfiable";
        if (ok) {
            inv.merged_tbox.push_back(candidate);
            inv.inserted.push_back(candidate);
            kept.insert({entry.sub, entry.super});
        }
        inv.log.push_back(std::move(entry));
    }

    // Stage 2: record equivalence for pairs kept in both directions.
    std::vector<std::pair<std::string, std::string>> equivalent_pairs;
    for (const auto& [sub, super] : kept)
        if (sub < super && kept.count({super, sub})) {
            equivalent_pairs.emplace_back(sub, super);
            auto colon1 = sub.find(':');
            auto colon2 = super.find(':');
            inv.inserted.push_back(Axiom::equivalent(
                ClassExpr::named(sub.substr(0, colon1),
                                 sub.substr(colon1 + 1)),
                ClassExpr::named(super.substr(0, colon2),
                                 super.substr(colon2 + 1))));
        }

    // Stage 3: the accumulated result must itself be consistent.
    {
        KnowledgeBase kb;
        kb.tbox = inv.merged_tbox;
        if (!reasoner.is_consistent(kb))
            throw MergeInconsistent(
                "merged ontology inconsistent after insertion stage");
    }

    // Stage 4: sense groups = connected components of the inserted
    // equivalences; every owned class gets a group.
    UnionFind uf;
    for (const auto& [a, b] : equivalent_pairs) uf.unite(a, b);
    std::map<std::string, std::vector<std::string>> components;
    for (const auto& [lexeme, classes] : by_lexeme)
        for (const auto& [p, n] : classes) {
            std::string q = p + ":" + n;
            components[uf.find(q)].push_back(q);
        }
    for (auto& [root, members] : components) {
        std::sort(members.begin(), members.end());
        SenseGroup g;
        g.lexeme = lower(members.front().substr(members.front().find(':') + 1));
        g.members = members;
        inv.groups.push_back(std::move(g));
    }
    std::sort(inv.groups.begin(), inv.groups.end(),
              [](const SenseGroup& a, const SenseGroup& b) {
                  return std::tie(a.lexeme, a.members) <
                         std::tie(b.lexeme, b.members);
              });
    std::map<std::string, size_t> groups_per_lexeme;
    for (const auto& g : inv.groups) ++groups_per_lexeme[g.lexeme];
    for (auto& g : inv.groups)
        g.display = mint_mwu(g, groups_per_lexeme[g.lexeme], inv);

    // One-directional kept subsumptions become dashed cross-group edges.
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (const auto& [sub, super] : kept) {
        if (kept.count({super, sub})) continue;
        const SenseGroup* gs = inv.group_of(sub);
        const SenseGroup* gp = inv.group_of(super);
        if (!gs || !gp || gs == gp) continue;
        if (seen.insert({gs->lexeme, gs->display, gp->display}).second)
            inv.cross_subsumptions.push_back(
                {gs->lexeme, gs->display, gp->display});
    }
    return inv;
}

Lexicon build_lexicon(const SenseInventory& inventory,
                      const std::vector<ProceduralTemplate>& templates) {
    Lexicon lex = lexicon_from_ontologies(inventory.ontologies);
    lex.nouns.clear();
    for (const auto& g : inventory.groups) {
        const std::string& rep = g.members.front();
        auto colon = rep.find(':');
        lex.nouns[g.lexeme].push_back(
            {rep.substr(0, colon), rep.substr(colon + 1), g.display});
    }
    for (const auto& tpl : templates)
        add_template_verbs(lex, tpl.name, tpl.lexical_units);
    return lex;
}

std::string merge_report(const SenseInventory& inventory) {
    std::string out;
    out += "== Sense groups ==\n";
    for (const auto& g : inventory.groups) {
        out += g.display + " = {";
        for (size_t i = 0; i < g.members.size(); ++i)
            out += (i ? ", " : "") + g.members[i];
        out += "}\n";
    }
    out += "== Cross-sense subsumptions (dashed edges) ==\n";
    for (const auto& c : inventory.cross_subsumptions)
        out += c.sub_display + " -> " + c.super_display + "\n";
    out += "== Insertion log ==\n";
    for (const auto& e : inventory.log)
        out += std::string(e.kept ? "kept    " : "rejected") + "  " + e.sub +
               " subClassOf " + e.super + "  (" + e.reason + ")\n";
    return out;
}

namespace {

json expr_to_json(const ClassExprPtr& e) {
    json j;
    switch (e->kind) {
    case ClassExpr::Kind::Named:
        j["named"] = e->prefix + ":" + e->name;
        break;
    case ClassExpr::Kind::Top: j["top"] = true; break;
    case ClassExpr::Kind::Bottom: j["bottom"] = true; break;
    case ClassExpr::Kind::Not: j["not"] = expr_to_json(e->args[0]); break;
    case ClassExpr::Kind::And:
    case ClassExpr::Kind::Or: {
        json kids = json::array();
        for (const auto& a : e->args) kids.push_back(expr_to_json(a));
        j[e->kind == ClassExpr::Kind::And ? "and" : "or"] = kids;
        break;
    }
    case ClassExpr::Kind::Exists:
    case ClassExpr::Kind::Forall:
        j[e->kind == ClassExpr::Kind::Exists ? "exists" : "forall"] = {
            {"role", e->role},
            {"inverse", e->inverse},
            {"filler", expr_to_json(e->args[0])}};
        break;
    }
    return j;
}

ClassExprPtr expr_from_json(const json& j) {
    if (j.contains("named")) {
        std::string q = j["named"];
        auto colon = q.find(':');
        return ClassExpr::named(q.substr(0, colon), q.substr(colon + 1));
    }
    if (j.contains("top")) return ClassExpr::top();
    if (j.contains("bottom")) return ClassExpr::bottom();
    if (j.contains("not")) return ClassExpr::negation(expr_from_json(j["not"]));
    for (const char* k : {"and", "or"}) {
        if (!j.contains(k)) continue;
        std::vector<ClassExprPtr> kids;
        for (const auto& c : j[k]) kids.push_back(expr_from_json(c));
        return k == std::string("and") ? ClassExpr::conj(std::move(kids))
                                       : ClassExpr::disj(std::move(kids));
    }
    for (const char* k : {"exists", "forall"}) {
        if (!j.contains(k)) continue;
        const auto& q = j[k];
        auto filler = expr_from_json(q["filler"]);
        return k == std::string("exists")
                   ? ClassExpr::exists(q["role"], q["inverse"], filler)
                   : ClassExpr::forall(q["role"], q["inverse"], filler);
    }
    throw std::runtime_error("unrecognized class expression in inventory file");
}

json axiom_to_json(const Axiom& ax) {
    json j;
    switch (ax.kind) {
    case Axiom::Kind::SubClass: j["kind"] = "subclass"; break;
    case Axiom::Kind::Equivalent: j["kind"] = "equivalent"; break;
    case Axiom::Kind::Disjoint: j["kind"] = "disjoint"; break;
    case Axiom::Kind::SubProperty: j["kind"] = "subproperty"; break;
    case Axiom::Kind::Domain: j["kind"] = "domain"; break;
    case Axiom::Kind::Range: j["kind"] = "range"; break;
    }
    if (ax.lhs) j["lhs"] = expr_to_json(ax.lhs);
    if (ax.rhs) j["rhs"] = expr_to_json(ax.rhs);
    if (!ax.role.empty()) j["role"] = ax.role;
    if (!ax.role2.empty()) j["role2"] = ax.role2;
    return j;
}

Axiom axiom_from_json(const json& j) {
    std::string kind = j["kind"];
    if (kind == "subproperty")
        return Axiom::sub_property(j["role"], j["role2"]);
    if (kind == "domain") return Axiom::domain(j["role"], expr_from_json(j["lhs"]));
    if (kind == "range") return Axiom::range(j["role"], expr_from_json(j["lhs"]));
    auto lhs = expr_from_json(j["lhs"]);
    auto rhs = expr_from_json(j["rhs"]);
    if (kind == "subclass") return Axiom::sub_class(lhs, rhs);
    if (kind == "equivalent") return Axiom::equivalent(lhs, rhs);
    if (kind == "disjoint") return Axiom::disjoint(lhs, rhs);
    throw std::runtime_error("unrecognized axiom kind '" + kind + "'");
}

} // namespace

std::string inventory_to_json(const SenseInventory& inventory) {
    json j;
    j["ontologies"] = json::array();
    for (const auto& onto : inventory.ontologies) {
        json o;
        o["prefix"] = onto.prefix;
        o["iri"] = onto.iri;
        o["title"] = onto.title;
        o["axioms"] = json::array();
        for (const auto& ax : onto.axioms) o["axioms"].push_back(axiom_to_json(ax));
        o["properties"] = json::array();
        for (const auto& p : onto.properties) {
            json pj;
            pj["name"] = p.name;
            pj["universal"] = p.universal;
            if (p.domain) pj["domain"] = expr_to_json(*p.domain);
            if (p.range) pj["range"] = expr_to_json(*p.range);
            o["properties"].push_back(pj);
        }
        j["ontologies"].push_back(o);
    }
    j["aliases"] = inventory.aliases;
    j["groups"] = json::array();
    for (const auto& g : inventory.groups)
        j["groups"].push_back(
            {{"lexeme", g.lexeme}, {"members", g.members},
             {"display", g.display}});
    j["inserted"] = json::array();
    for (const auto& ax : inventory.inserted)
        j["inserted"].push_back(axiom_to_json(ax));
    return j.dump(2);
}

SenseInventory inventory_from_json(const std::string& json_text,
                                   const Reasoner& reasoner) {
    json j = json::parse(json_text);
    std::vector<MicroOntology> ontologies;
    for (const auto& o : j["ontologies"]) {
        MicroOntology onto;
        onto.prefix = o["prefix"];
        onto.iri = o["iri"];
        onto.title = o["title"];
        for (const auto& ax : o["axioms"])
            onto.axioms.push_back(axiom_from_json(ax));
        for (const auto& pj : o["properties"]) {
            PropertyDecl p;
            p.name = pj["name"];
            p.universal = pj["universal"];
            if (pj.contains("domain")) p.domain = expr_from_json(pj["domain"]);
            if (pj.contains("range")) p.range = expr_from_json(pj["range"]);
            onto.properties.push_back(std::move(p));
        }
        ontologies.push_back(std::move(onto));
    }
    std::map<std::string, std::string> aliases =
        j.value("aliases", std::map<std::string, std::string>{});
    // The partitioning procedure is deterministic, so re-running it on the
    // stored inputs reproduces the stored groups exactly.
    return partition_senses(ontologies, reasoner, aliases);
}

} // namespace pao
