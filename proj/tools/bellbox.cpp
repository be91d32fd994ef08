// bellbox: generate behaviors, check polytope memberships, classify and
// decompose assignments, and run repository-backed Bell-experiment
// simulations.
//
// Exit codes: 0 success / property holds, 1 property fails, 2 usage or parse
// error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bell/experiment.hpp"
#include "bell/io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitUsage = 2;

std::string party_letter(int p) { return std::string(1, static_cast<char>('A' + p)); }

void print_context_table(std::ostream& out, const bell::DeterministicAssignment& assignment) {
    const bell::Scenario& sc = assignment.scenario();
    out << " ";
    for (int p = 0; p < sc.parties(); ++p) out << "x" << party_letter(p) << " ";
    out << "| ";
    for (int p = 0; p < sc.parties(); ++p) out << "a" << party_letter(p) << " ";
    out << "\n";
    for (bell::JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        out << " ";
        for (int v : sc.unpack_inputs(x)) out << " " << v << " ";
        out << "| ";
        for (int v : sc.unpack_outputs(assignment.output_index(x))) out << " " << v << " ";
        out << "\n";
    }
}

bell::Behavior load_behavior(const std::string& path) {
    return bell::behavior_from_json(bell::read_text_file(path));
}

void maybe_print_chsh(const bell::Behavior& behavior) {
    if (behavior.scenario() == bell::uniform_scenario(2, 2, 2)) {
        std::cout.precision(10);
        std::cout << "S = " << bell::chsh_value(behavior) << "\n";
    }
}

std::array<bell::Real, 4> parse_angles(const std::string& text) {
    std::array<bell::Real, 4> angles{};
    std::stringstream stream(text);
    std::string item;
    int i = 0;
    while (std::getline(stream, item, ',')) {
        if (i >= 4) throw bell::ParseError("--angles needs exactly four values");
        angles[i++] = std::stod(item);
    }
    if (i != 4) throw bell::ParseError("--angles needs exactly four values");
    return angles;
}

// ---- gen ----------------------------------------------------------------

int cmd_gen(const std::string& kind, const std::string& out_path, const std::string& angles_text,
            const std::string& assignment_path) {
    bell::Behavior behavior = bell::make_pr_box();
    if (kind == "pr") {
        behavior = bell::make_pr_box();
    } else if (kind == "tsirelson") {
        behavior = bell::make_tsirelson();
    } else if (kind == "singlet") {
        std::array<bell::Real, 4> angles = bell::singlet_chsh_angles();
        if (!angles_text.empty()) angles = parse_angles(angles_text);
        behavior = bell::make_singlet_behavior({angles[0], angles[1]}, {angles[2], angles[3]});
    } else if (kind == "assignment") {
        if (assignment_path.empty()) {
            throw bell::ParseError("gen assignment needs --file <assignment.json>");
        }
        behavior = bell::behavior_from_assignment(
            bell::assignment_from_json(bell::read_text_file(assignment_path)));
    } else {
        throw bell::ParseError("unknown gen kind: " + kind);
    }
    const std::string path = out_path.empty() ? kind + ".json" : out_path;
    bell::write_text_file(path, bell::behavior_to_json(behavior));
    std::cout << "wrote " << path << "\n";
    maybe_print_chsh(behavior);
    return kExitHolds;
}

// ---- check --------------------------------------------------------------

int cmd_check(const std::string& path, const std::string& what, const std::string& order_text,
              bell::Real tol) {
    const bell::Behavior behavior = load_behavior(path);
    const bell::Scenario& sc = behavior.scenario();
    if (what == "normalized") {
        const bell::ValidationReport report = bell::validate(behavior, tol);
        if (report.normalized && report.entries_in_range) {
            std::cout << "normalized: yes (worst deviation " << report.worst_deviation << ")\n";
            return kExitHolds;
        }
        std::cout << "normalized: no (worst deviation " << report.worst_deviation << ")\n";
        return kExitFails;
    }
    if (what == "no-signaling") {
        try {
            const bell::NoSignalingReport report = bell::is_no_signaling(behavior, tol);
            if (report.holds) {
                std::cout << "no-signaling: yes (worst violation " << report.worst_violation
                          << ")\n";
                return kExitHolds;
            }
            const bell::NoSignalingWitness& w = *report.witness;
            std::cout << "no-signaling: no; party " << party_letter(w.party)
                      << "'s input flip moves the other parties' marginal by " << w.deviation
                      << " between joint inputs " << w.input_a << " and " << w.input_b << "\n";
            return kExitFails;
        } catch (const bell::InvalidBehavior& e) {
            std::cout << "no-signaling: no; " << e.what() << "\n";
            return kExitFails;
        }
    }
    if (what == "local-2222") {
        if (bell::in_local_polytope_2222(behavior, tol)) {
            std::cout << "local-2222: yes\n";
            return kExitHolds;
        }
        std::cout << "local-2222: no; CHSH value " << bell::chsh_value(behavior)
                  << " (some facet exceeds 2)\n";
        return kExitFails;
    }
    if (what == "ordered") {
        if (order_text.empty()) {
            throw bell::ParseError("check ordered needs --order (e.g. --order B,A)");
        }
        const bell::Ordering order = bell::parse_ordering(order_text, sc.parties());
        if (bell::in_ordered_polytope(behavior, order, tol)) {
            std::cout << "ordered(" << bell::format_ordering(order) << "): yes\n";
            return kExitHolds;
        }
        std::cout << "ordered(" << bell::format_ordering(order)
                  << "): no; some prefix marginal depends on a later party's input\n";
        return kExitFails;
    }
    throw bell::ParseError("unknown check: " + what +
                           " (expected normalized|no-signaling|local-2222|ordered)");
}

// ---- classify -------------------------------------------------------------

int cmd_classify(const std::string& path) {
    const bell::DeterministicAssignment assignment =
        bell::assignment_from_json(bell::read_text_file(path));
    const bell::SignalingGraph graph = bell::dependency_graph(assignment);
    std::cout << "edges:";
    if (graph.edges.empty()) std::cout << " (none)";
    for (auto& [i, j] : graph.edges) {
        std::cout << " " << party_letter(i) << "->" << party_letter(j);
    }
    std::cout << "\n";
    const bell::AssignmentClass cls = bell::classify(assignment);
    switch (cls.kind) {
        case bell::AssignmentKind::Local: std::cout << "kind: local\n"; break;
        case bell::AssignmentKind::Ordered: std::cout << "kind: ordered\n"; break;
        case bell::AssignmentKind::Cyclic: std::cout << "kind: cyclic\n"; break;
    }
    std::cout << "compatible orders:";
    if (cls.compatible_orders.empty()) std::cout << " (none)";
    for (const bell::Ordering& order : cls.compatible_orders) {
        std::cout << " " << bell::format_ordering(order);
    }
    if (cls.orders_truncated) std::cout << " ... (truncated)";
    std::cout << "\n";
    return kExitHolds;
}

// ---- decompose ------------------------------------------------------------

int cmd_decompose(const std::string& path, const std::string& order_text,
                  const std::string& out_path) {
    const bell::Behavior behavior = load_behavior(path);
    const bell::Ordering order =
        bell::parse_ordering(order_text, behavior.scenario().parties());
    try {
        const bell::Decomposition decomposition = bell::decompose_ordered(behavior, order);
        const std::string out = out_path.empty() ? "decomposition.json" : out_path;
        bell::write_text_file(out, bell::decomposition_to_json(decomposition));
        std::cout << "wrote " << out << " (" << decomposition.terms.size() << " terms, order "
                  << bell::format_ordering(order) << ")\n";
        return kExitHolds;
    } catch (const bell::NotNoSignaling& e) {
        std::cout << "cannot decompose: " << e.what() << "\n";
        return kExitFails;
    }
}

// ---- simulate ---------------------------------------------------------------

json load_json_or_path(const json& value, const fs::path& base, const char* what) {
    if (value.is_string()) {
        const fs::path path = base / value.get<std::string>();
        return json::parse(bell::read_text_file(path.string()));
    }
    if (value.is_object()) return value;
    throw bell::ParseError(std::string(what) + " must be an object or a file path");
}

bell::ExperimentConfig config_from_json(const json& doc, const fs::path& base) {
    bell::ExperimentConfig config{
        bell::behavior_from_json(load_json_or_path(doc.at("behavior"), base, "behavior").dump()),
        {},
        0,
        bell::UpgradedMode{},
        bell::PolicyKind::Force,
        0};
    const bell::Scenario& sc = config.behavior.scenario();

    for (const json& spec : doc.at("agents")) {
        bell::AgentSpec agent;
        agent.party = spec.at("party").get<int>();
        agent.input_dist = spec.at("input_dist").get<std::vector<bell::Real>>();
        const json& timing = spec.at("timing");
        const std::string kind = timing.at("kind").get<std::string>();
        if (kind == "fixed") {
            agent.timing = bell::TimingDist::fixed(timing.at("t").get<bell::Real>());
        } else if (kind == "uniform") {
            agent.timing = bell::TimingDist::uniform(timing.at("min").get<bell::Real>(),
                                                     timing.at("max").get<bell::Real>());
        } else {
            throw bell::ParseError("timing kind must be fixed or uniform");
        }
        config.agents.push_back(std::move(agent));
    }

    const std::string mode = doc.value("mode", std::string("upgraded"));
    if (mode == "upgraded") {
        config.mode = bell::UpgradedMode{};
    } else if (mode == "naive-assignment") {
        if (!doc.contains("assignment")) {
            throw bell::ParseError("naive-assignment mode needs an \"assignment\" entry");
        }
        config.mode = bell::NaiveAssignmentMode{bell::assignment_from_json(
            load_json_or_path(doc.at("assignment"), base, "assignment").dump())};
    } else if (mode == "naive-decomposition") {
        config.mode = bell::NaiveDecompositionMode{bell::parse_ordering(
            doc.value("order", std::string("")), sc.parties())};
    } else {
        throw bell::ParseError("mode must be upgraded|naive-assignment|naive-decomposition");
    }

    const std::string policy = doc.value("policy", std::string("force"));
    if (policy == "force") {
        config.policy = bell::PolicyKind::Force;
    } else if (policy == "block") {
        config.policy = bell::PolicyKind::Block;
    } else {
        throw bell::ParseError("policy must be force or block");
    }
    config.rounds = doc.value("rounds", std::uint64_t{0});
    config.seed = doc.value("seed", std::uint64_t{0});
    return config;
}

void print_report_summary(const bell::StatsReport& report) {
    std::cout.precision(6);
    std::cout << "rounds: " << report.rounds << " (aborted " << report.aborted_rounds
              << ", violations " << report.violation_rounds << ", forced "
              << report.forced_rounds << ")\n";
    if (report.insufficient_data) {
        std::cout << "insufficient data: some contexts were never sampled\n";
    }
    if (report.chsh) {
        std::cout << "chsh: " << *report.chsh << " +- " << *report.chsh_stderr << "\n";
    }
    if (report.inputs_vs_lambda) {
        std::cout << "chi2 inputs vs lambda: stat " << report.inputs_vs_lambda->chi2 << ", p "
                  << report.inputs_vs_lambda->p_value
                  << (report.inputs_vs_lambda->low_power ? " (low power)" : "") << "\n";
    }
    if (report.inputs_vs_ordering) {
        std::cout << "chi2 inputs vs ordering: stat " << report.inputs_vs_ordering->chi2 << ", p "
                  << report.inputs_vs_ordering->p_value
                  << (report.inputs_vs_ordering->low_power ? " (low power)" : "") << "\n";
    }
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<std::uint64_t> rounds, const std::string& mode,
                 const std::string& order_text, const std::string& out_dir, int threads,
                 const std::string& dump_repo_path) {
    const fs::path base = fs::path(config_path).parent_path();
    json doc = json::parse(bell::read_text_file(config_path));
    if (!mode.empty()) doc["mode"] = mode;
    if (!order_text.empty()) doc["order"] = order_text;
    bell::ExperimentConfig config = config_from_json(doc, base);
    if (seed) {
        config.seed = *seed;
    } else if (!doc.contains("seed")) {
        std::cerr << "note: no --seed given and none in the config, using seed 0\n";
    }
    if (rounds) config.rounds = *rounds;

    if (!dump_repo_path.empty()) {
        const bell::Repository repo =
            bell::build_repository(config.behavior, config.mode, config.seed);
        bell::write_text_file(dump_repo_path, bell::repository_to_json(repo));
    }

    const bell::ExperimentResult result = bell::run_experiment(config, threads);

    fs::create_directories(out_dir);
    {
        std::ofstream stats(fs::path(out_dir) / "stats.csv");
        bell::write_stats_csv(stats, result.report);
    }
    {
        std::ofstream logs(fs::path(out_dir) / "logs.jsonl");
        bell::write_logs_jsonl(logs, result.logs);
    }
    std::cout << "wrote " << (fs::path(out_dir) / "stats.csv").string() << " and "
              << (fs::path(out_dir) / "logs.jsonl").string() << "\n";
    print_report_summary(result.report);
    return kExitHolds;
}

// ---- demo -------------------------------------------------------------------

bell::ExperimentConfig two_party_config(bell::Behavior behavior, bell::TimingDist timing_a,
                                        bell::TimingDist timing_b, std::uint64_t rounds,
                                        std::uint64_t seed) {
    bell::ExperimentConfig config{std::move(behavior),
                                  {},
                                  rounds,
                                  bell::UpgradedMode{},
                                  bell::PolicyKind::Force,
                                  seed};
    config.agents.push_back(bell::AgentSpec{0, {0.5, 0.5}, timing_a});
    config.agents.push_back(bell::AgentSpec{1, {0.5, 0.5}, timing_b});
    return config;
}

int demo_naive_signaling(std::uint64_t rounds, std::uint64_t seed) {
    const bell::DeterministicAssignment stored = bell::make_and_signaling_assignment(0, 1);
    std::cout << "A repository that replays this one signaling assignment every round,\n"
              << "with B measuring first and inputs chosen uniformly:\n\n";
    print_context_table(std::cout, stored);

    bell::ExperimentConfig config =
        two_party_config(bell::behavior_from_assignment(stored), bell::TimingDist::fixed(1.0),
                         bell::TimingDist::fixed(0.0), rounds, seed);
    config.mode = bell::NaiveAssignmentMode{stored};
    const bell::ExperimentResult result = bell::run_experiment(config);

    std::cout << "\n";
    print_report_summary(result.report);
    std::cout << "forced rate per party: A " << result.report.forced_rate[0] << ", B "
              << result.report.forced_rate[1] << "\n";

    std::vector<bell::RoundLog> y1_rounds;
    std::uint64_t matched = 0;
    for (const bell::RoundLog& log : result.logs) {
        if (log.inputs[1] != 1) continue;
        y1_rounds.push_back(log);
        if (log.inputs[0] == log.outcomes[1]) ++matched;
    }
    if (!y1_rounds.empty()) {
        std::cout << "rounds with yB=1: " << y1_rounds.size() << "; A's input equals B's outcome in "
                  << matched << " of them ("
                  << static_cast<double>(matched) / y1_rounds.size() * 100 << "%)\n";
        std::cout << "MI(B outcome; A input | yB=1): "
                  << bell::mutual_information(y1_rounds, "outcome:1", "input:0") << " bits\n";
        std::cout << "B learns A's input whenever yB=1, and A's choice is no longer free.\n";
    } else {
        std::cout << "insufficient data: no rounds with yB=1\n";
    }
    return kExitHolds;
}

int demo_upgraded_fix(std::uint64_t rounds, std::uint64_t seed) {
    // Same per-round content, but the stored context now includes the time
    // ordering: each ordering gets an assignment that only signals forward.
    const bell::DeterministicAssignment a_first = bell::make_and_signaling_assignment(0, 1);
    const bell::DeterministicAssignment b_first = bell::make_and_signaling_assignment(1, 0);
    std::cout << "The same repository upgraded: the context includes the time order.\n\n";
    std::cout << " xA xB  time order | aA aB\n";
    std::cout << "  0  0  any        |  0  0\n";
    std::cout << "  0  1  any        |  0  0\n";
    std::cout << "  1  0  any        |  0  0\n";
    std::cout << "  1  1  tA<=tB     |  0  1\n";
    std::cout << "  1  1  tA>tB      |  1  0\n\n";

    std::map<bell::Ordering, bell::Decomposition> per_order;
    per_order.emplace(bell::Ordering({0, 1}),
                      bell::Decomposition{bell::Ordering({0, 1}), {{1.0, a_first}}});
    per_order.emplace(bell::Ordering({1, 0}),
                      bell::Decomposition{bell::Ordering({1, 0}), {{1.0, b_first}}});
    const bell::Repository repo = bell::repository_from_orders(
        bell::behavior_from_assignment(a_first), std::move(per_order), seed);

    bell::ExperimentConfig config = two_party_config(
        bell::behavior_from_assignment(a_first), bell::TimingDist::uniform(0.0, 1.0),
        bell::TimingDist::uniform(0.0, 1.0), rounds, seed);
    const bell::ExperimentResult result = bell::run_experiment_with(repo, config);

    print_report_summary(result.report);
    if (result.report.rounds == 0) {
        std::cout << "insufficient data: no rounds requested\n";
        return kExitHolds;
    }
    std::cout << "violations: " << result.report.violation_rounds
              << " (the ordering-aware context never forces an input)\n";
    const bell::Real mi =
        bell::mutual_information(result.logs, "inputs", "ordering");
    std::cout << "MI(inputs; ordering): " << mi << " bits\n";
    return kExitHolds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavior algebra, time-ordered decompositions and repository simulations "
                 "for multi-agent Bell experiments"};
    app.require_subcommand(1);

    std::string gen_kind, gen_out, gen_angles, gen_file;
    CLI::App* gen = app.add_subcommand("gen", "generate a behavior file");
    gen->add_option("kind", gen_kind, "pr|tsirelson|singlet|assignment")->required();
    gen->add_option("-o,--out", gen_out, "output path (default <kind>.json)");
    gen->add_option("--angles", gen_angles, "singlet angles a0,a1,b0,b1 (radians)");
    gen->add_option("--file", gen_file, "assignment JSON (for kind=assignment)");

    std::string check_path, check_what, check_order;
    double check_tol = bell::kEpsNorm;
    CLI::App* check = app.add_subcommand("check", "check a property of a behavior file");
    check->add_option("file", check_path, "behavior JSON")->required();
    check->add_option("what", check_what, "normalized|no-signaling|local-2222|ordered")
        ->required();
    check->add_option("--order", check_order, "ordering for the ordered check, e.g. B,A");
    check->add_option("--tol", check_tol, "tolerance (default 1e-9)");

    std::string classify_path;
    CLI::App* classify = app.add_subcommand("classify", "classify an assignment file");
    classify->add_option("file", classify_path, "assignment JSON")->required();

    std::string dec_path, dec_order, dec_out;
    CLI::App* decompose =
        app.add_subcommand("decompose", "decompose a behavior along an ordering");
    decompose->add_option("file", dec_path, "behavior JSON")->required();
    decompose->add_option("--order", dec_order, "ordering, e.g. A,B")->required();
    decompose->add_option("-o,--out", dec_out, "output path (default decomposition.json)");

    std::string sim_config, sim_out = "out", sim_dump, sim_mode, sim_order;
    std::optional<std::uint64_t> sim_seed, sim_rounds;
    int sim_threads = 1;
    CLI::App* simulate = app.add_subcommand("simulate", "run a configured experiment");
    simulate->add_option("--config", sim_config, "experiment config JSON")->required();
    simulate->add_option("--seed", sim_seed, "64-bit decimal seed");
    simulate->add_option("--rounds", sim_rounds, "number of rounds");
    simulate->add_option("--mode", sim_mode,
                         "override: upgraded|naive-assignment|naive-decomposition");
    simulate->add_option("--order", sim_order,
                         "fixed ordering for naive-decomposition, e.g. A,B");
    simulate->add_option("--out", sim_out, "output directory (default ./out)");
    simulate->add_option("--threads", sim_threads, "worker threads (default 1)");
    simulate->add_option("--dump-repository", sim_dump, "write the repository audit JSON here");

    std::string demo_name;
    std::uint64_t demo_rounds = 100000;
    std::optional<std::uint64_t> demo_seed;
    CLI::App* demo = app.add_subcommand("demo", "run a built-in demonstration");
    demo->add_option("name", demo_name, "naive-signaling|upgraded-fix")->required();
    demo->add_option("--rounds", demo_rounds, "number of rounds (default 100000)");
    demo->add_option("--seed", demo_seed, "64-bit decimal seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_kind, gen_out, gen_angles, gen_file);
        if (check->parsed()) return cmd_check(check_path, check_what, check_order, check_tol);
        if (classify->parsed()) return cmd_classify(classify_path);
        if (decompose->parsed()) return cmd_decompose(dec_path, dec_order, dec_out);
        if (simulate->parsed()) {
            return cmd_simulate(sim_config, sim_seed, sim_rounds, sim_mode, sim_order, sim_out,
                                sim_threads, sim_dump);
        }
        if (demo->parsed()) {
            if (!demo_seed) std::cerr << "note: no --seed given, using seed 0\n";
            const std::uint64_t seed = demo_seed.value_or(0);
            if (demo_name == "naive-signaling") return demo_naive_signaling(demo_rounds, seed);
            if (demo_name == "upgraded-fix") return demo_upgraded_fix(demo_rounds, seed);
            throw bell::ParseError("unknown demo: " + demo_name);
        }
    } catch (const bell::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
