/* test_io.cpp -- machine files, edge lists, CSV rows, DOT rendering
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <qg/constructions.hpp>
#include <qg/io.hpp>

#include "fixtures.hpp"

#include <fstream>

using namespace qg;

namespace {

std::string fixture(const std::string& name) { return std::string(QG_FIXTURE_DIR) + "/" + name; }

// Minimal structural DOT check: digraph header, balanced braces, edges
// with arrows, terminated statements.
bool looks_like_dot(const std::string& text) {
    if (text.rfind("digraph", 0) != 0) return false;
    long depth = 0;
    for (char c : text) {
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (depth < 0) return false;
    }
    if (depth != 0) return false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("->") == std::string::npos) continue;
        if (line.back() != ';') return false;
    }
    return true;
}

} // namespace

TEST_CASE("machine files round-trip to identical machines") {
    for (const char* name :
         {"tm_unary_increment.json", "tm_anbn.json", "dpda_anbn.json", "dpda_brackets.json",
          "fsm_parity1.json", "cnf_nested_ab.json", "lm_from_parity.json"}) {
        Machine m = load_machine(fixture(name));
        Machine again = parse_machine_json(machine_to_json(m));
        CHECK(machine_to_json(m) == machine_to_json(again));
    }
}

TEST_CASE("loaded fixtures equal their in-code definitions") {
    Machine m = load_machine(fixture("dpda_anbn.json"));
    const Dpda& d = std::get<Dpda>(m);
    Dpda code = fixtures::dpda_anbn();
    CHECK(d.states == code.states);
    CHECK(d.rules.size() == code.rules.size());
    CHECK(d.acceptance == code.acceptance);
    CHECK(dpda_run(d, symbols_of("aababb"), 100).outcome == DpdaOutcome::accepted);

    Machine t = load_machine(fixture("tm_unary_increment.json"));
    CHECK(tm_run(std::get<TuringMachine>(t), symbols_of("111"), 100).tape ==
          std::vector<std::string>{"1", "1", "1", "1"});
}

TEST_CASE("machine parse errors carry context") {
    CHECK_THROWS_AS(parse_machine_json("{"), ParseError);
    CHECK_THROWS_AS(parse_machine_json(R"({"kind":"widget"})"), ParseError);
    CHECK_THROWS_AS(parse_machine_json(R"({"kind":"fsm","states":["a"]})"), ParseError);
    CHECK_THROWS_AS(load_machine("/nonexistent/machine.json"), ParseError);
    // A nondeterministic DPDA is rejected at load time.
    CHECK_THROWS_AS(
        parse_machine_json(
            R"({"kind":"dpda","states":["s"],"input_alphabet":["a"],"stack_alphabet":["Z"],
                "start":"s","initial_stack_symbol":"Z","acceptance":"either","rules":[
                {"state":"s","input":"a","top":"Z","next":"s","op":"stay"},
                {"state":"s","input":"","top":"Z","next":"s","op":"stay"}]})"),
        ParseError);
}

TEST_CASE("dag edge lists parse with comments and fail loudly") {
    Dag d = load_dag_edge_list(fixture("dag_chain4.txt"));
    CHECK(d.size() == 4);
    CHECK(d.edges.size() == 3);
    CHECK(d.labels[0] == "a");

    CHECK_THROWS_AS(parse_dag_edge_list("# nothing\n"), ParseError);
    CHECK_THROWS_AS(parse_dag_edge_list("a b c\n"), ParseError);

    Mcg m = mcg_from_dag(d);
    std::string edges = mcg_to_edge_list(m);
    CHECK(edges.find("a b") != std::string::npos);
    CHECK(edges.find("c d") != std::string::npos);

    Bmcg b = bmcg_from_mcg(m, 2);
    std::string bedges = bmcg_to_edge_list(b);
    CHECK(bedges.find("proxy") != std::string::npos);
}

TEST_CASE("csv schema is stable") {
    CHECK(csv_header() == "variant,N,C,raw_ops,weighted_cost,wall_ms");
    ReportRow row{"qg", 8, 4, 42, 42.0, 1.5};
    CHECK(csv_row(row) == "qg,8,4,42,42,1.5");
}

TEST_CASE("dot export: rollout traces render and validate") {
    // A multi-hop question rollout on the core engine.
    QuestGraph g({{val("Kirk or Picard?"), std::nullopt}}, {}, 0);
    int step = 0;
    AgentFn agent = [&step](const LocalContext&) -> AgentAction {
        switch (step++) {
        case 0: return DiscoverAction{val("Kirk who?"), std::nullopt, {0}};
        case 1: return DiscoverAction{val("Picard who?"), std::nullopt, {0, 1}};
        case 2: return RespondMoveAction{val("Picard!"), 0};
        default: return StopAction{};
        }
    };
    RunResult r = run(g, agent, 2, 10);
    std::string dot = export_trace_dot(r);
    CHECK(looks_like_dot(dot));
    CHECK(dot.find("Kirk who?") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);

    RunResult empty;
    empty.graph = g;
    CHECK_THROWS_AS(export_trace_dot(empty), std::invalid_argument);
}

TEST_CASE("dot export: rqdp runs carry ret and R edge labels") {
    auto tm = fixtures::tm_unary_increment();
    RqdpTmResult res = simulate_tm_on_rqdp(tm, symbols_of("11"), 100);
    REQUIRE(res.agree);
    std::string dot = export_trace_dot(res.run.run);
    CHECK(looks_like_dot(dot));
    CHECK(dot.find("label=\"ret\"") != std::string::npos);
    CHECK(dot.find("label=\"R\"") != std::string::npos);

    // Every fixture machine's rollout renders valid DOT.
    for (const auto& d : fixtures::dpda_fleet()) {
        DpdaSimResult sim = simulate_dpda_on_fqdp(d, symbols_of(""), 100);
        CHECK(looks_like_dot(export_trace_dot(sim.run)));
    }
}
