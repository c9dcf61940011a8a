/* test_constructions_dpda.cpp -- DPDA simulation on FQDP and the reverse
 * direction
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <qg/constructions.hpp>

#include "fixtures.hpp"

using namespace qg;

TEST_CASE("fqdp_dpda_agent: the worked rollout on aababb") {
    auto d = fixtures::dpda_anbn();
    DpdaSimResult res = simulate_dpda_on_fqdp(d, symbols_of("aababb"), 400);
    CHECK(res.accepted);
    CHECK_FALSE(res.illegal);
    CHECK(res.max_focus_degree <= 4);
    CHECK(res.consumed == std::vector<std::string>{"a", "a", "b", "a", "b", "b"});

    // Seven input nodes: six symbols consumed in order plus the trailing
    // end marker with an empty response.
    std::vector<NodeId> inputs;
    for (int v = 0; v < res.run.graph.size(); ++v)
        if (res.run.graph.node(v).goal.tag == "i") inputs.push_back(v);
    CHECK(inputs.size() == 7);
    CHECK_FALSE(res.run.graph.node(inputs.back()).response.has_value());

    // The root carries the terminal mark.
    CHECK(res.run.graph.node(0).response == Response{marks::terminal()});
}

TEST_CASE("fqdp_dpda_agent: empty input and rejection paths") {
    auto d = fixtures::dpda_anbn();
    CHECK(simulate_dpda_on_fqdp(d, {}, 100).accepted);
    CHECK_FALSE(simulate_dpda_on_fqdp(d, symbols_of("abb"), 400).accepted);
    CHECK_FALSE(simulate_dpda_on_fqdp(d, symbols_of("ba"), 400).accepted);
    CHECK(dpda_run(d, symbols_of("abb"), 400).outcome == DpdaOutcome::rejected);
}

TEST_CASE("bisimulation: agent acceptance equals the direct oracle") {
    for (const auto& d : fixtures::dpda_fleet()) {
        std::vector<std::string> alphabet(d.input_alphabet.begin(), d.input_alphabet.end());
        for (const auto& w : fixtures::words_upto(alphabet, 7)) {
            DpdaSimResult sim = simulate_dpda_on_fqdp(d, w, 800);
            DpdaResult oracle = dpda_run(d, w, 800);
            REQUIRE(oracle.outcome != DpdaOutcome::budget_exhausted);
            CHECK_FALSE(sim.illegal);
            CHECK_FALSE(sim.budget_hit);
            CHECK(sim.accepted == (oracle.outcome == DpdaOutcome::accepted));
            CHECK(sim.max_focus_degree <= 4);
        }
    }
}

namespace {

// Toy FQDP agents for the context-interning direction. They read only the
// focus, the last child and the root flag.

// Accepts nothing but the empty string.
QdpAgent toy_stop_only() {
    return [](const QdpContext&) -> QdpAction { return QdpStop{}; };
}

// Accepts a*.
QdpAgent toy_a_star() {
    return [](const QdpContext& ctx) -> QdpAction {
        if (ctx.focus.complete) return QdpStop{};
        const QdpNodeView* last = ctx.last_child();
        if (!last) return DiscoverInput{val("i")};
        if (last->response && last->response->tag == "sym") {
            if (last->response->fields[0] == "a") return DiscoverInput{val("i")};
            return Pursue{0}; // dead end on b
        }
        if (!last->response) return CompleteQuest{val("st", {"fin"})}; // end of input
        return DiscoverInput{val("i")};
    };
}

// Accepts fully nested a^n b^n-style words via sub-quests (a pushes, b pops).
QdpAgent toy_nested() {
    return [](const QdpContext& ctx) -> QdpAction {
        if (ctx.focus.complete) return QdpStop{};
        const QdpNodeView* last = ctx.last_child();
        if (!last || (last->complete && last->goal.tag == "sub"))
            return DiscoverInput{val("i")};
        if (last->response && last->response->tag == "sym") {
            if (last->response->fields[0] == "a") return DiscoverSubquest{val("sub")};
            if (!ctx.is_root) return CompleteQuest{val("st", {"ok"})};
            return Pursue{0}; // unmatched b at the root
        }
        if (!last->response) {
            if (ctx.is_root) return CompleteQuest{val("st", {"fin"})};
            return Pursue{0}; // input ended inside a sub-quest
        }
        return Pursue{0};
    };
}

bool fqdp_accepts(const QdpAgent& agent, const FqdpConfig& cfg,
                  const std::vector<std::string>& word) {
    auto cursor = std::make_shared<std::size_t>(0);
    QdpRunResult r = fqdp_run(val("root"), agent, cfg, string_input_provider(word, cursor), 200);
    return r.reason == HaltReason::stopped && *cursor == word.size();
}

} // namespace

TEST_CASE("dpda_from_fqdp: the stop-only agent yields one state") {
    FqdpToDpda out = dpda_from_fqdp(toy_stop_only(), val("root"), FqdpConfig{8, 2}, {"a", "b"});
    CHECK(out.complete);
    CHECK(out.machine.states.size() == 1);
    CHECK(validate_dpda(out.machine).empty());
    CHECK(dpda_run(out.machine, {}, 50).outcome == DpdaOutcome::accepted);
    CHECK(dpda_run(out.machine, symbols_of("a"), 50).outcome == DpdaOutcome::rejected);
}

TEST_CASE("dpda_from_fqdp: a small reader interns three contexts") {
    FqdpToDpda out = dpda_from_fqdp(toy_a_star(), val("root"), FqdpConfig{64, 2}, {"a", "b"});
    CHECK(out.complete);
    CHECK(out.machine.states.size() == 3); // fresh root, after-a, after-b
    CHECK(validate_dpda(out.machine).empty());
}

TEST_CASE("dpda_from_fqdp: language equality sweeps") {
    struct Toy {
        QdpAgent agent;
        FqdpConfig cfg;
    };
    std::vector<Toy> toys = {{toy_stop_only(), FqdpConfig{8, 2}},
                             {toy_a_star(), FqdpConfig{64, 2}},
                             {toy_nested(), FqdpConfig{64, 3}}};
    for (const auto& toy : toys) {
        FqdpToDpda out = dpda_from_fqdp(toy.agent, val("root"), toy.cfg, {"a", "b"});
        REQUIRE(out.complete);
        CHECK(validate_dpda(out.machine).empty());
        for (const auto& w : fixtures::words_upto({"a", "b"}, 6)) {
            bool direct = fqdp_accepts(toy.agent, toy.cfg, w);
            bool via_dpda = dpda_run(out.machine, w, 400).outcome == DpdaOutcome::accepted;
            CAPTURE(w.size());
            CHECK(direct == via_dpda);
        }
    }
}

TEST_CASE("dpda_from_fqdp round trip through the simulating agent") {
    struct Toy {
        QdpAgent agent;
        FqdpConfig cfg;
    };
    std::vector<Toy> toys = {{toy_stop_only(), FqdpConfig{8, 2}},
                             {toy_a_star(), FqdpConfig{64, 2}},
                             {toy_nested(), FqdpConfig{64, 3}}};
    for (const auto& toy : toys) {
        FqdpToDpda out = dpda_from_fqdp(toy.agent, val("root"), toy.cfg, {"a", "b"});
        REQUIRE(out.complete);
        for (const auto& w : fixtures::words_upto({"a", "b"}, 6)) {
            bool direct = fqdp_accepts(toy.agent, toy.cfg, w);
            bool simulated = simulate_dpda_on_fqdp(out.machine, w, 2000).accepted;
            CHECK(direct == simulated);
        }
    }
}

TEST_CASE("dpda_from_fqdp reports context explosion") {
    FqdpToDpda out = dpda_from_fqdp(toy_nested(), val("root"), FqdpConfig{64, 3}, {"a", "b"}, 2);
    CHECK_FALSE(out.complete);
    CHECK_FALSE(out.diagnostic.empty());
}
