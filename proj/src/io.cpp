#include "bell/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <limits>
#include <sstream>

namespace bell {

using nlohmann::json;

namespace {

json scenario_header(const Scenario& sc) {
    return json{{"parties", sc.parties()},
                {"inputs", sc.input_cards()},
                {"outputs", sc.output_cards()}};
}

Scenario scenario_from_header(const json& j, const char* what) {
    try {
        const int parties = j.at("parties").get<int>();
        auto inputs = j.at("inputs").get<std::vector<int>>();
        auto outputs = j.at("outputs").get<std::vector<int>>();
        if (static_cast<int>(inputs.size()) != parties ||
            static_cast<int>(outputs.size()) != parties) {
            throw ParseError(std::string(what) +
                             ": cardinality lists must have one entry per party");
        }
        return Scenario(std::move(inputs), std::move(outputs));
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

json assignment_table_json(const DeterministicAssignment& assignment) {
    const Scenario& sc = assignment.scenario();
    json rows = json::array();
    for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        rows.push_back(json::array(
            {sc.unpack_inputs(x), sc.unpack_outputs(assignment.output_index(x))}));
    }
    return rows;
}

std::vector<JointIndex> assignment_table_from_json(const json& rows, const Scenario& sc,
                                                   const char* what) {
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(sc.joint_inputs())) {
        throw ParseError(std::string(what) + ": table must list every joint input exactly once");
    }
    std::vector<JointIndex> table(static_cast<std::size_t>(sc.joint_inputs()), -1);
    for (const json& row : rows) {
        if (!row.is_array() || row.size() != 2) {
            throw ParseError(std::string(what) + ": each table row must be [[inputs],[outputs]]");
        }
        auto in_digits = row[0].get<std::vector<int>>();
        auto out_digits = row[1].get<std::vector<int>>();
        if (static_cast<int>(in_digits.size()) != sc.parties() ||
            static_cast<int>(out_digits.size()) != sc.parties()) {
            throw ParseError(std::string(what) + ": table row has the wrong number of parties");
        }
        for (int p = 0; p < sc.parties(); ++p) {
            if (in_digits[p] < 0 || in_digits[p] >= sc.input_card(p) || out_digits[p] < 0 ||
                out_digits[p] >= sc.output_card(p)) {
                throw ParseError(std::string(what) + ": table row value out of range");
            }
        }
        const JointIndex x = sc.pack_inputs(in_digits);
        if (table[static_cast<std::size_t>(x)] != -1) {
            throw ParseError(std::string(what) + ": duplicate joint input in table");
        }
        table[static_cast<std::size_t>(x)] = sc.pack_outputs(out_digits);
    }
    return table;
}

}  // namespace

std::string behavior_to_json(const Behavior& behavior) {
    const Scenario& sc = behavior.scenario();
    json doc = scenario_header(sc);
    std::vector<Real> probs;
    probs.reserve(static_cast<std::size_t>(sc.joint_inputs() * sc.joint_outputs()));
    for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
            probs.push_back(behavior.prob(x, a));
        }
    }
    doc["probs"] = probs;
    return doc.dump();
}

Behavior behavior_from_json(const std::string& text) {
    const json doc = parse(text, "behavior");
    const Scenario sc = scenario_from_header(doc, "behavior");
    std::vector<Real> probs;
    try {
        probs = doc.at("probs").get<std::vector<Real>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("behavior: ") + e.what());
    }
    if (static_cast<JointIndex>(probs.size()) != sc.joint_inputs() * sc.joint_outputs()) {
        throw ParseError("behavior: probs length must be joint inputs times joint outputs");
    }
    Matrix P(sc.joint_inputs(), sc.joint_outputs());
    std::size_t i = 0;
    for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
            P(x, a) = probs[i++];
        }
    }
    return Behavior(sc, std::move(P));
}

std::string assignment_to_json(const DeterministicAssignment& assignment) {
    json doc = scenario_header(assignment.scenario());
    doc["table"] = assignment_table_json(assignment);
    return doc.dump();
}

DeterministicAssignment assignment_from_json(const std::string& text) {
    const json doc = parse(text, "assignment");
    const Scenario sc = scenario_from_header(doc, "assignment");
    if (!doc.contains("table")) {
        throw ParseError("assignment: missing table");
    }
    return DeterministicAssignment(sc, assignment_table_from_json(doc["table"], sc, "assignment"));
}

std::string decomposition_to_json(const Decomposition& decomposition) {
    if (decomposition.terms.empty()) {
        throw Error("cannot serialize an empty decomposition");
    }
    const Scenario& sc = decomposition.terms.front().assignment.scenario();
    json doc = scenario_header(sc);
    doc["order"] = decomposition.order.sequence();
    json terms = json::array();
    for (const auto& [weight, assignment] : decomposition.terms) {
        terms.push_back(json{{"weight", weight}, {"table", assignment_table_json(assignment)}});
    }
    doc["terms"] = std::move(terms);
    return doc.dump();
}

Decomposition decomposition_from_json(const std::string& text) {
    const json doc = parse(text, "decomposition");
    const Scenario sc = scenario_from_header(doc, "decomposition");
    try {
        Ordering order(doc.at("order").get<std::vector<int>>());
        std::vector<DecompositionTerm> terms;
        for (const json& term : doc.at("terms")) {
            const Real weight = term.at("weight").get<Real>();
            terms.push_back(DecompositionTerm{
                weight, DeterministicAssignment(
                            sc, assignment_table_from_json(term.at("table"), sc,
                                                           "decomposition"))});
        }
        return Decomposition{std::move(order), std::move(terms)};
    } catch (const json::exception& e) {
        throw ParseError(std::string("decomposition: ") + e.what());
    }
}

std::string repository_to_json(const Repository& repo) {
    json doc = scenario_header(repo.behavior().scenario());
    doc["seed"] = repo.seed();
    doc["behavior"] = json::parse(behavior_to_json(repo.behavior()));
    if (const auto* naive = std::get_if<NaiveAssignmentMode>(&repo.mode())) {
        doc["mode"] = "naive-assignment";
        doc["assignment"] = json::parse(assignment_to_json(naive->assignment));
    } else {
        if (const auto* fixed = std::get_if<NaiveDecompositionMode>(&repo.mode())) {
            doc["mode"] = "naive-decomposition";
            doc["order"] = fixed->order.sequence();
        } else {
            doc["mode"] = "upgraded";
        }
        json decompositions = json::array();
        for (const auto& [order, decomposition] : repo.per_order_decompositions()) {
            decompositions.push_back(json::parse(decomposition_to_json(decomposition)));
        }
        doc["decompositions"] = std::move(decompositions);
    }
    return doc.dump();
}

std::string round_log_to_json_line(const RoundLog& log) {
    json doc{{"round", log.round_id},
             {"t", log.timestamps},
             {"order", log.order},
             {"inputs", log.inputs},
             {"forced", log.forced},
             {"outcomes", log.outcomes},
             {"term", log.term_index},
             {"order_rank", log.order_rank},
             {"violation", log.violation},
             {"aborted", log.aborted}};
    return doc.dump();
}

void write_logs_jsonl(std::ostream& out, std::span<const RoundLog> logs) {
    for (const RoundLog& log : logs) {
        out << round_log_to_json_line(log) << '\n';
    }
}

void write_stats_csv(std::ostream& out, const StatsReport& report) {
    out.precision(std::numeric_limits<Real>::max_digits10);
    out << "name,value,aux\n";
    out << "rounds," << report.rounds << ",\n";
    out << "aborted_rounds," << report.aborted_rounds << ",\n";
    out << "violation_rounds," << report.violation_rounds << ",\n";
    out << "forced_rounds," << report.forced_rounds << ",\n";
    out << "insufficient_data," << (report.insufficient_data ? 1 : 0) << ",\n";
    out << "violation_rate," << report.violation_rate << ",\n";
    for (std::size_t p = 0; p < report.forced_rate.size(); ++p) {
        out << "forced_rate_" << static_cast<char>('A' + p) << "," << report.forced_rate[p]
            << ",\n";
    }
    out << "forced_mi_bits," << report.forced_mi_bits << ",\n";
    if (report.chsh) {
        out << "chsh," << *report.chsh << "," << *report.chsh_stderr << "\n";
    }
    if (report.inputs_vs_lambda) {
        out << "chi2_inputs_lambda," << report.inputs_vs_lambda->chi2 << ","
            << report.inputs_vs_lambda->p_value << "\n";
        out << "chi2_inputs_lambda_dof," << report.inputs_vs_lambda->dof << ",\n";
    }
    if (report.inputs_vs_ordering) {
        out << "chi2_inputs_ordering," << report.inputs_vs_ordering->chi2 << ","
            << report.inputs_vs_ordering->p_value << "\n";
        out << "chi2_inputs_ordering_dof," << report.inputs_vs_ordering->dof << ",\n";
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << content;
}

}  // namespace bell
