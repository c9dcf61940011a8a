/* core.hpp -- the quest graph kernel: node/edge storage, focus tracking,
 * local-context observation, action application, budgeted run loop
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <qg/value.hpp>

namespace qg {

using NodeId = std::int32_t;

struct QuestNode {
    NodeId id = 0;
    Goal goal;
    Response response;
    int created_at = 0;
    int updated_at = 0;

    bool operator==(const QuestNode&) const = default;
};

/*
 * Edge pointers are slots into the observed local context:
 * slot 0 names the focus node (a self-loop when used as a move target),
 * slot i >= 1 names the i-th neighbor of the context.
 */
using ContextSlot = std::size_t;

struct LocalContext {
    QuestNode focus;
    std::vector<QuestNode> neighbors;
};

struct DiscoverAction {
    Goal goal;
    Response initial_response;
    std::vector<ContextSlot> attach;
};

struct RespondMoveAction {
    Response response;
    ContextSlot move_to = 0; // 0 keeps the focus in place
};

struct StopAction {};

using AgentAction = std::variant<DiscoverAction, RespondMoveAction, StopAction>;

/*
 * A dynamic undirected graph of (goal, response) nodes with a focus
 * pointer. Node ids are dense integers in creation order, which doubles
 * as the creation clock for seed nodes. Edges are deduplicated and
 * self-edges are rejected; the focus always names an existing node.
 */
class QuestGraph {
public:
    QuestGraph() = default; // empty placeholder; real graphs come from the seeded constructor
    QuestGraph(std::vector<std::pair<Goal, Response>> seed_nodes,
               const std::vector<std::pair<int, int>>& seed_edges,
               int focus_index);

    int size() const { return static_cast<int>(nodes_.size()); }
    const QuestNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<NodeId>& neighbors(NodeId id) const { return adj_.at(static_cast<std::size_t>(id)); }
    int degree(NodeId id) const { return static_cast<int>(neighbors(id).size()); }
    NodeId focus() const { return focus_; }
    int clock() const { return clock_; }
    long truncations() const { return truncations_; }
    void note_truncation() { ++truncations_; }

    // Mutators used by the engines; they keep the graph invariants.
    NodeId add_node(Goal goal, Response response);
    void add_edge(NodeId a, NodeId b);
    bool has_edge(NodeId a, NodeId b) const;
    void set_response(NodeId id, Response response);
    void set_focus(NodeId id);
    void tick() { ++clock_; }

    // Structural equality: nodes, edges, focus and clock (trace replays
    // must reproduce the final graph bit-exactly).
    bool operator==(const QuestGraph& other) const;

private:
    std::vector<QuestNode> nodes_;
    std::vector<std::vector<NodeId>> adj_;
    NodeId focus_ = 0;
    int clock_ = 0;
    long truncations_ = 0;
};

/*
 * Neighbor-selection policy for observation: returns the ordered list of
 * neighbor ids to expose, at most `capacity` of them. The default policy
 * orders by ascending creation time and truncates.
 */
using NeighborSelector =
    std::function<std::vector<NodeId>(const QuestGraph&, NodeId focus, int capacity)>;

LocalContext observe(QuestGraph& graph, int capacity, const NeighborSelector& selector = {});

std::string context_digest(const LocalContext& ctx);

enum class StepStatus { ok, stopped, illegal };

struct StepOutcome {
    StepStatus status = StepStatus::ok;
    std::string diagnostic;
};

StepOutcome apply(QuestGraph& graph, const AgentAction& action, const LocalContext& ctx);

enum class HaltReason { stopped, budget_exhausted, illegal_action };

const char* halt_reason_str(HaltReason r);

struct ActionCounts {
    long long discover = 0;
    long long respond_move = 0;
    long long stop = 0;

    long long total() const { return discover + respond_move + stop; }
};

struct TraceEvent {
    int step = 0;
    NodeId focus = 0;
    std::string context_digest;
    AgentAction action;
};

struct RunResult {
    HaltReason reason = HaltReason::budget_exhausted;
    QuestGraph graph;
    std::vector<TraceEvent> trace;
    ActionCounts counts;
    std::string diagnostic;
};

using AgentFn = std::function<AgentAction(const LocalContext&)>;

RunResult run(QuestGraph initial, const AgentFn& agent, int capacity, long budget,
              const NeighborSelector& selector = {});

// Re-applies a recorded action sequence to the initial graph.
QuestGraph replay(QuestGraph initial, const std::vector<TraceEvent>& trace, int capacity,
                  const NeighborSelector& selector = {});

} // namespace qg
