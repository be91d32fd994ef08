#ifndef BELL_IO_HPP
#define BELL_IO_HPP

#include "bell/experiment.hpp"

#include <iosfwd>
#include <string>

namespace bell {

// JSON file formats. Readers accept and writers emit full double precision;
// all flat arrays use the library's joint index convention (input index
// outer, output index inner, party 0 most significant).

// {"parties": n, "inputs": [...], "outputs": [...], "probs": [...]}
std::string behavior_to_json(const Behavior& behavior);
Behavior behavior_from_json(const std::string& text);

// {"parties": n, "inputs": [...], "outputs": [...],
//  "table": [[[x...],[a...]], ...]} ordered by joint input index
std::string assignment_to_json(const DeterministicAssignment& assignment);
DeterministicAssignment assignment_from_json(const std::string& text);

// {"parties": ..., "inputs": ..., "outputs": ..., "order": [...],
//  "terms": [{"weight": w, "table": [...]}, ...]}
std::string decomposition_to_json(const Decomposition& decomposition);
Decomposition decomposition_from_json(const std::string& text);

/// Audit dump: seed, mode and the per-order decompositions.
std::string repository_to_json(const Repository& repo);

/// One RoundLog as a single JSON line.
std::string round_log_to_json_line(const RoundLog& log);
void write_logs_jsonl(std::ostream& out, std::span<const RoundLog> logs);

/// Stats as CSV, one row per metric: name,value,aux (aux holds a standard
/// error or p-value where one applies).
void write_stats_csv(std::ostream& out, const StatsReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bell

#endif  // BELL_IO_HPP
