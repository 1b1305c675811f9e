// Command-line front door: merge ontologies into a sense inventory, run a
// factual text through disambiguation and execution, query the trace.

#include "CLI11.hpp"

#include "pao/exec.hpp"
#include "pao/merge.hpp"
#include "pao/query.hpp"
#include "pao/wsd.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitInconsistent = 2;
constexpr int kExitAmbiguous = 3;
constexpr int kExitPlanning = 4;

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << content;
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        spill(path, content);
}

const char* hint_tag(pao::Hint h) {
    switch (h) {
    case pao::Hint::Valid: return "[valid]";
    case pao::Hint::Invalid: return "[invalid]";
    default: return "[?]";
    }
}

// Numbered prompt on stderr; accepts an index or a candidate id on stdin.
std::string prompt_choice(const pao::AmbiguityItem& item) {
    std::cerr << "Ambiguity at " << item.site << ":\n";
    for (size_t i = 0; i < item.candidates.size(); ++i)
        std::cerr << "  " << (i + 1) << ") " << item.candidates[i].id << " "
                  << hint_tag(item.candidates[i].hint) << "\n";
    std::cerr << "> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line))
        throw pao::UnresolvedAmbiguity(item.site);
    std::istringstream is(line);
    std::string answer;
    is >> answer;
    size_t idx = 0;
    try {
        idx = std::stoul(answer);
    } catch (const std::exception&) {
        return answer;
    }
    if (idx < 1 || idx > item.candidates.size())
        throw pao::UnresolvedAmbiguity(item.site);
    return item.candidates[idx - 1].id;
}

struct MergeArgs {
    std::vector<std::string> ontologies;
    std::string report_path;
    std::string inventory_path;
};

int cmd_merge(const MergeArgs& a, const pao::Reasoner& reasoner) {
    auto ontos = pao::load_ontology_files(a.ontologies);
    auto inventory = pao::partition_senses(ontos, reasoner);
    write_or_print(a.report_path, pao::merge_report(inventory));
    if (!a.inventory_path.empty())
        spill(a.inventory_path, pao::inventory_to_json(inventory));
    return kExitOk;
}

struct RunArgs {
    std::string text_path;
    std::string inventory_path;
    std::vector<std::string> ontologies;
    std::string templates_path;
    std::string choices_path;
    bool interactive = false;
    std::string trace_out;
    std::string report_path;
};

int cmd_run(const RunArgs& a, const pao::Reasoner& reasoner) {
    pao::SenseInventory inventory =
        a.inventory_path.empty()
            ? pao::partition_senses(pao::load_ontology_files(a.ontologies),
                                    reasoner)
            : pao::inventory_from_json(slurp(a.inventory_path), reasoner);
    std::vector<pao::ProceduralTemplate> templates;
    if (!a.templates_path.empty())
        templates = pao::load_template_file(a.templates_path);

    auto lexicon = pao::build_lexicon(inventory, templates);
    auto parse = pao::parse_factual(slurp(a.text_path), lexicon);
    std::map<std::string, std::string> choices;
    if (!a.choices_path.empty())
        choices = pao::parse_choices(slurp(a.choices_path));
    pao::ChoiceCallback callback;
    if (a.interactive) callback = prompt_choice;

    auto r = pao::disambiguate(parse, inventory, templates, reasoner, choices,
                               callback);
    if (!r.complete()) {
        std::vector<pao::AmbiguityItem> open;
        for (const auto& item : r.items)
            if (!item.resolved()) open.push_back(item);
        std::cerr << "unresolved ambiguities:\n" << ambiguity_report(open);
        return kExitAmbiguous;
    }

    std::cout << pao::render_paraphrase(r.parse);
    auto ops = pao::compile_atoms(r.parse.atoms, templates);
    auto result = pao::run(ops, inventory.merged_tbox, reasoner);
    if (!a.report_path.empty())
        spill(a.report_path, pao::exec_report(ops, result));
    if (!a.trace_out.empty())
        spill(a.trace_out, pao::trace_to_json(result.trace));
    return kExitOk;
}

struct QueryArgs {
    std::string trace_path;
    std::string query_path;
    std::string inventory_path;
};

int cmd_query(const QueryArgs& a, const pao::Reasoner& reasoner) {
    auto trace = pao::trace_from_json(slurp(a.trace_path));
    if (trace.empty())
        throw pao::QueryError("the trace has no steps to query");
    auto queries = pao::parse_queries(slurp(a.query_path));
    // Subclass-aware type matching needs the merged TBox; without an
    // inventory, classes match only by exact name.
    std::vector<pao::Axiom> tbox;
    if (!a.inventory_path.empty())
        tbox = pao::inventory_from_json(slurp(a.inventory_path), reasoner)
                   .merged_tbox;
    bool first = true;
    for (const auto& q : queries) {
        if (!first) std::cout << "\n";
        first = false;
        std::cout << pao::render_answers(q, pao::evaluate(q, trace, tbox));
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"controlled-natural-language toolkit: sense merging, "
                 "disambiguation, execution and temporal queries"};
    app.require_subcommand(1);

    MergeArgs ma;
    auto* merge = app.add_subcommand(
        "merge", "partition word senses across micro-ontologies");
    merge->add_option("ontologies", ma.ontologies, "ontology files")
        ->required()
        ->check(CLI::ExistingFile);
    merge->add_option("--report", ma.report_path, "write the report here");
    merge->add_option("--inventory", ma.inventory_path,
                      "write the inventory JSON here");

    RunArgs ra;
    auto* runc = app.add_subcommand(
        "run", "disambiguate a factual text and execute it into a trace");
    runc->add_option("text", ra.text_path, "factual text file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* inv_opt =
        runc->add_option("--inventory", ra.inventory_path,
                         "sense inventory JSON produced by merge");
    runc->add_option("--ontology", ra.ontologies,
                     "ontology files to merge on the fly")
        ->excludes(inv_opt);
    runc->add_option("--templates", ra.templates_path,
                     "procedural template file");
    auto* choices_opt = runc->add_option("--choices", ra.choices_path,
                                         "recorded choices file");
    runc->add_flag("--interactive", ra.interactive,
                   "prompt for open ambiguities")
        ->excludes(choices_opt);
    runc->add_option("--trace-out", ra.trace_out, "write the trace JSON here");
    runc->add_option("--report", ra.report_path,
                     "write the operation report here");

    QueryArgs qa;
    auto* query = app.add_subcommand("query", "answer temporal queries "
                                              "against a saved trace");
    query->add_option("trace", qa.trace_path, "trace JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    query->add_option("queries", qa.query_path, "query file")
        ->required()
        ->check(CLI::ExistingFile);
    query->add_option("--inventory", qa.inventory_path,
                      "sense inventory JSON for subclass-aware matching");

    CLI11_PARSE(app, argc, argv);

    pao::Reasoner reasoner;
    try {
        if (merge->parsed()) return cmd_merge(ma, reasoner);
        if (runc->parsed()) return cmd_run(ra, reasoner);
        return cmd_query(qa, reasoner);
    } catch (const pao::StepInconsistent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconsistent;
    } catch (const pao::ExecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPlanning;
    } catch (const pao::InconsistentInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconsistent;
    } catch (const pao::MergeInconsistent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconsistent;
    } catch (const pao::UnresolvedAmbiguity& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAmbiguous;
    } catch (const pao::NoAntecedent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAmbiguous;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
