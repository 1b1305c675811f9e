#include "doctest.h"

#include "pao/templates.hpp"

using namespace pao;

namespace {

std::string fx(const std::string& rel) {
    return std::string(FIXTURE_DIR) + "/" + rel;
}

Triple t(const std::string& s, const std::string& p, const std::string& o) {
    return {Term::parse(s), Term::iri("", p), Term::parse(o)};
}

} // namespace

TEST_CASE("template file parsing") {
    auto tpls = load_template_file(fx("lrrh/templates.tpl"));
    REQUIRE(tpls.size() == 3);

    const auto& residence = tpls[0];
    CHECK(residence.name == "Residence");
    CHECK(residence.parameters ==
          std::vector<std::string>{"resident", "co_resident", "location"});
    CHECK(residence.precondition.empty());
    REQUIRE(residence.effects.size() == 2);
    CHECK(!residence.effects[0].negated);
    // ?co-resident in :parameters and ?co_resident in :effect are the
    // same canonical variable.
    CHECK(residence.effects[1].args ==
          std::vector<std::string>{"location", "co_resident"});
    CHECK(residence.lexical_units ==
          std::vector<std::string>{"camp", "inhabit", "live", "lodge",
                                   "reside", "stay"});
    CHECK(*residence.parameter_for("with") == "co_resident");
    CHECK(residence.covers_slots({"subject", "in", "with"}));
    CHECK(!residence.covers_slots({"subject", "object", "from"}));

    const auto& removing = tpls[1];
    REQUIRE(removing.precondition.size() == 1);
    CHECK(removing.precondition[0].property == "stores");
    CHECK(removing.precondition[0].args ==
          std::vector<std::string>{"source", "theme"});
    REQUIRE(removing.effects.size() == 2);
    CHECK(removing.effects[1].negated);

    const auto& bringing = tpls[2];
    CHECK(bringing.precondition.size() == 2);
    REQUIRE(bringing.inequalities.size() == 1);
    CHECK(bringing.inequalities[0].left == "a");
    CHECK(bringing.inequalities[0].right == "goal");
    CHECK(bringing.effects.size() == 4);
    CHECK(find_template(tpls, "Removing") == &tpls[1]);
    CHECK(find_template(tpls, "Sleeping") == nullptr);
}

TEST_CASE("template parse errors") {
    CHECK_THROWS_AS(
        parse_templates("Procedure: A\n:parameters (?x)\n"
                        "Procedure: A\n:parameters (?y)\n"),
        DuplicateTemplateName);
    CHECK_THROWS_AS(parse_templates(":parameters (?x)"), TemplateError);
    CHECK_THROWS_AS(
        parse_templates("Procedure: A\n:roles (subject ?ghost)\n"),
        TemplateError);
}

TEST_CASE("invocation compilation matches the hand-written update ops") {
    auto tpls = load_template_file(fx("lrrh/templates.tpl"));

    SUBCASE("Residence: all parameters slot-bound, pure inserts") {
        auto op = compile_invocation(tpls[0], {{"subject", Term::anon(4)},
                                               {"in", Term::anon(8)},
                                               {"with", Term::anon(11)}});
        CHECK(op.inserts == std::vector<Triple>{t("obj8", "stores", "obj4"),
                                                t("obj8", "stores", "obj11")});
        CHECK(op.deletes.empty());
        CHECK(op.where.empty());
        CHECK(op.ground_preconditions.empty());
    }
    SUBCASE("Removing: ground precondition plus delete/insert pair") {
        auto op = compile_invocation(tpls[1], {{"subject", Term::anon(4)},
                                               {"object", Term::anon(15)},
                                               {"from", Term::anon(8)}});
        CHECK(op.ground_preconditions ==
              std::vector<Triple>{t("obj8", "stores", "obj15")});
        CHECK(op.deletes == std::vector<Triple>{t("obj8", "stores", "obj15")});
        CHECK(op.inserts == std::vector<Triple>{t("obj4", "stores", "obj15")});
    }
    SUBCASE("Bringing: existential variable stays in the where pattern") {
        auto op = compile_invocation(tpls[2], {{"subject", Term::anon(4)},
                                               {"object", Term::anon(15)},
                                               {"to", Term::anon(25)}});
        CHECK(op.ground_preconditions ==
              std::vector<Triple>{t("obj4", "stores", "obj15")});
        CHECK(op.where == std::vector<Triple>{t("?a", "stores", "obj4")});
        REQUIRE(op.filters.size() == 1);
        CHECK(op.filters[0].left == Term::var("a"));
        CHECK(op.filters[0].right == Term::anon(25));
        CHECK(op.inserts == std::vector<Triple>{t("obj25", "stores", "obj15"),
                                                t("obj25", "stores", "obj4")});
        CHECK(op.deletes == std::vector<Triple>{t("obj4", "stores", "obj15"),
                                                t("?a", "stores", "obj4")});
    }
    SUBCASE("unknown slot and unbound effect variable are rejected") {
        CHECK_THROWS_AS(
            (void)compile_invocation(tpls[1], {{"onto", Term::anon(1)}}),
            MissingRole);
        auto broken = tpls[0];
        broken.effects.push_back({false, "stores", {"resident", "phantom"}});
        CHECK_THROWS_AS(
            (void)compile_invocation(broken, {{"subject", Term::anon(4)},
                                              {"in", Term::anon(8)},
                                              {"with", Term::anon(11)}}),
            UnboundEffectVariable);
    }
}

TEST_CASE("assertion compilation") {
    ParaphraseAtom type;
    type.kind = ParaphraseAtom::Kind::Type;
    type.subject = Term::anon(4);
    type.senses = {{"pp", "LittleRedRidingHood", "LittleRedRidingHood"}};
    type.chosen_sense = 0;
    auto op = compile_assertion(type);
    CHECK(op.inserts ==
          std::vector<Triple>{{Term::anon(4), type_predicate(),
                               Term::iri("pp", "LittleRedRidingHood")}});

    ParaphraseAtom prop;
    prop.kind = ParaphraseAtom::Kind::Property;
    prop.subject = Term::anon(4);
    prop.property = "hasMother";
    prop.object = Term::anon(11);
    CHECK(compile_assertion(prop).inserts ==
          std::vector<Triple>{t("obj4", "hasMother", "obj11")});

    ParaphraseAtom neg;
    neg.kind = ParaphraseAtom::Kind::NegatedExistential;
    neg.subject = Term::anon(5);
    CHECK(compile_assertion(neg).empty());

    ParaphraseAtom unresolved;
    unresolved.kind = ParaphraseAtom::Kind::Type;
    CHECK_THROWS_AS((void)compile_assertion(unresolved), TemplateError);
}
