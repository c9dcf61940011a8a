/* io.hpp -- file formats: machine definition JSON, DAG edge lists, CSV
 * report rows and DOT trace rendering
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <string>
#include <variant>
#include <vector>

#include <qg/automata.hpp>
#include <qg/compgraph.hpp>
#include <qg/core.hpp>
#include <qg/qdp.hpp>
#include <qg/reference.hpp>

namespace qg {

using Machine = std::variant<TuringMachine, Dpda, Fsm, CnfGrammar, LmTable>;

// Thrown on malformed machine files; the message carries the offending
// field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Machine parse_machine_json(const std::string& text);
Machine load_machine(const std::string& path);
std::string machine_to_json(const Machine& m);
const char* machine_kind(const Machine& m);

// Edge-list text: one "source target" pair per line, '#' starts a comment.
Dag parse_dag_edge_list(const std::string& text);
Dag load_dag_edge_list(const std::string& path);
std::string mcg_to_edge_list(const Mcg& mcg);
// Original nodes take their labels when given, n<id> otherwise.
std::string bmcg_to_edge_list(const Bmcg& b, const std::vector<std::string>& labels = {});

struct ReportRow {
    std::string variant;
    int n = 0;
    int c = 0;
    long long raw_ops = 0;
    double weighted_cost = 0;
    double wall_ms = 0;
};

std::string csv_header(); // variant,N,C,raw_ops,weighted_cost,wall_ms
std::string csv_row(const ReportRow& row);

/*
 * DOT rendering of a run: nodes labeled goal/response with the final focus
 * marked, parent-child arrows labeled by the creating action ("in" for
 * inputs, "sub" for sub-quests, "R" for rightward quest discoveries, "ret"
 * for retrieves). Throws on an empty trace.
 */
std::string export_trace_dot(const QdpRunResult& run);
std::string export_trace_dot(const RunResult& run);

} // namespace qg
