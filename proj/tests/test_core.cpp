/* test_core.cpp -- quest graph kernel tests
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <qg/core.hpp>

#include <stdexcept>

using namespace qg;

namespace {

QuestGraph chain3() {
    return QuestGraph({{val("a"), std::nullopt}, {val("b"), std::nullopt}, {val("c"), std::nullopt}},
                      {{0, 1}, {1, 2}}, 1);
}

} // namespace

TEST_CASE("new_graph seeds nodes, edges and focus") {
    QuestGraph g({{val("1+1=?"), std::nullopt}}, {}, 0);
    CHECK(g.size() == 1);
    CHECK(g.focus() == 0);
    CHECK(g.clock() == 0);
    CHECK(g.node(0).goal == val("1+1=?"));
    CHECK_FALSE(g.node(0).response.has_value());

    CHECK_THROWS_AS(QuestGraph({}, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(QuestGraph({{val("x"), std::nullopt}}, {{0, 1}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(QuestGraph({{val("x"), std::nullopt}}, {}, 3), std::invalid_argument);

    QuestGraph c = chain3();
    CHECK(c.degree(1) == 2);
}

TEST_CASE("observe returns the focus plus selected neighbors") {
    QuestGraph c = chain3();
    LocalContext ctx = observe(c, 2);
    CHECK(ctx.focus.id == 1);
    REQUIRE(ctx.neighbors.size() == 2);
    CHECK(ctx.neighbors[0].id == 0);
    CHECK(ctx.neighbors[1].id == 2);

    // Star with 5 leaves: the two earliest-created leaves are visible.
    QuestGraph star({{val("hub"), std::nullopt},
                     {val("l1"), std::nullopt},
                     {val("l2"), std::nullopt},
                     {val("l3"), std::nullopt},
                     {val("l4"), std::nullopt},
                     {val("l5"), std::nullopt}},
                    {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}, 0);
    LocalContext sctx = observe(star, 2);
    REQUIRE(sctx.neighbors.size() == 2);
    CHECK(sctx.neighbors[0].id == 1);
    CHECK(sctx.neighbors[1].id == 2);
    CHECK(star.truncations() == 1);

    QuestGraph single({{val("x"), std::nullopt}}, {}, 0);
    CHECK(observe(single, 4).neighbors.empty());
    CHECK_THROWS_AS(observe(single, 0), std::invalid_argument);
}

TEST_CASE("apply: discover, respond-move and their error paths") {
    QuestGraph g({{val("Kirk or Picard?"), std::nullopt}}, {}, 0);
    LocalContext ctx = observe(g, 2);
    StepOutcome out = apply(g, DiscoverAction{val("Kirk who?"), std::nullopt, {0}}, ctx);
    CHECK(out.status == StepStatus::ok);
    CHECK(g.size() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.focus() == 0); // discover does not move the focus

    ctx = observe(g, 2);
    out = apply(g, RespondMoveAction{val("r"), 0}, ctx); // self-loop
    CHECK(out.status == StepStatus::ok);
    CHECK(g.focus() == 0);
    CHECK(g.node(0).response == Response{val("r")});
    CHECK(g.node(0).updated_at == g.clock());

    ctx = observe(g, 2);
    out = apply(g, RespondMoveAction{val("r"), 5}, ctx);
    CHECK(out.status == StepStatus::illegal);

    ctx = observe(g, 2);
    out = apply(g, DiscoverAction{val("x"), std::nullopt, {}}, ctx);
    CHECK(out.status == StepStatus::illegal); // every new node must connect somewhere
}

TEST_CASE("run: immediate stop, multi-hop script, zero budget") {
    QuestGraph g({{val("q"), std::nullopt}}, {}, 0);
    RunResult stopped = run(g, [](const LocalContext&) { return AgentAction{StopAction{}}; }, 2, 10);
    CHECK(stopped.reason == HaltReason::stopped);
    CHECK(stopped.trace.size() == 1);
    CHECK(stopped.counts.stop == 1);

    // The six-step multi-hop question script plus a final stop: two
    // discoveries, four responses hopping across the sub-quests.
    QuestGraph root({{val("Kirk or Picard?"), std::nullopt}}, {}, 0);
    int step = 0;
    AgentFn agent = [&step](const LocalContext& ctx) -> AgentAction {
        switch (step++) {
        case 0: return DiscoverAction{val("Kirk who?"), std::nullopt, {0}};
        case 1: return DiscoverAction{val("Picard who?"), std::nullopt, {0, 1}};
        case 2: return RespondMoveAction{std::nullopt, 1}; // empty update, dive to "Kirk who?"
        case 3: {
            std::size_t to = 0;
            for (std::size_t i = 0; i < ctx.neighbors.size(); ++i)
                if (ctx.neighbors[i].goal == val("Picard who?")) to = i + 1;
            return RespondMoveAction{val("Captain..."), to};
        }
        case 4: {
            std::size_t to = 0;
            for (std::size_t i = 0; i < ctx.neighbors.size(); ++i)
                if (ctx.neighbors[i].goal == val("Kirk or Picard?")) to = i + 1;
            return RespondMoveAction{val("TNG..."), to};
        }
        case 5: return RespondMoveAction{val("Picard!"), 0};
        default: return StopAction{};
        }
    };
    RunResult hops = run(root, agent, 2, 100);
    CHECK(hops.reason == HaltReason::stopped);
    CHECK(hops.graph.size() == 3);
    CHECK(hops.graph.node(0).response == Response{val("Picard!")});
    CHECK(hops.counts.discover == 2);
    CHECK(hops.counts.respond_move == 4);

    RunResult empty = run(g, [](const LocalContext&) { return AgentAction{StopAction{}}; }, 2, 0);
    CHECK(empty.reason == HaltReason::budget_exhausted);
    CHECK(empty.graph == g);
}

TEST_CASE("run halts with a recorded reason on malformed agent actions") {
    QuestGraph g({{val("q"), std::nullopt}}, {}, 0);
    RunResult bad = run(g, [](const LocalContext&) {
        return AgentAction{RespondMoveAction{val("r"), 7}};
    }, 2, 10);
    CHECK(bad.reason == HaltReason::illegal_action);
    CHECK_FALSE(bad.diagnostic.empty());
}

TEST_CASE("replay reproduces the final graph bit-exactly") {
    QuestGraph root({{val("Kirk or Picard?"), std::nullopt}}, {}, 0);
    int step = 0;
    AgentFn agent = [&step](const LocalContext&) -> AgentAction {
        switch (step++) {
        case 0: return DiscoverAction{val("a"), std::nullopt, {0}};
        case 1: return RespondMoveAction{val("x"), 1};
        case 2: return DiscoverAction{val("b"), val("seen"), {0, 1}};
        case 3: return RespondMoveAction{val("y"), 2};
        default: return StopAction{};
        }
    };
    RunResult r = run(root, agent, 3, 50);
    QuestGraph again = replay(root, r.trace, 3);
    CHECK(again == r.graph);
}

TEST_CASE("custom selectors are validated") {
    QuestGraph c = chain3();
    NeighborSelector newest_first = [](const QuestGraph& g, NodeId f, int cap) {
        auto n = g.neighbors(f);
        std::vector<NodeId> out(n.rbegin(), n.rend());
        if (static_cast<int>(out.size()) > cap) out.resize(static_cast<std::size_t>(cap));
        return out;
    };
    LocalContext ctx = observe(c, 1, newest_first);
    CHECK(ctx.neighbors.size() == 1);
    CHECK(ctx.neighbors[0].id == 2);

    NeighborSelector liar = [](const QuestGraph&, NodeId, int) {
        return std::vector<NodeId>{0}; // not a neighbor of itself
    };
    QuestGraph single({{val("x"), std::nullopt}}, {}, 0);
    CHECK_THROWS_AS(observe(single, 2, liar), std::logic_error);
}
