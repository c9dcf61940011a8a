/* core.cpp -- quest graph kernel implementation
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/core.hpp>

#include <algorithm>
#include <stdexcept>

namespace qg {

QuestGraph::QuestGraph(std::vector<std::pair<Goal, Response>> seed_nodes,
                       const std::vector<std::pair<int, int>>& seed_edges,
                       int focus_index) {
    if (seed_nodes.empty())
        throw std::invalid_argument("quest graph needs at least one node for the focus");
    if (focus_index < 0 || focus_index >= static_cast<int>(seed_nodes.size()))
        throw std::invalid_argument("focus index out of range");

    nodes_.reserve(seed_nodes.size());
    adj_.resize(seed_nodes.size());
    for (auto& [goal, response] : seed_nodes) {
        NodeId id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back(QuestNode{id, std::move(goal), std::move(response), 0, 0});
    }
    for (auto [a, b] : seed_edges) {
        if (a < 0 || b < 0 || a >= size() || b >= size())
            throw std::invalid_argument("seed edge references a missing node");
        add_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
    focus_ = static_cast<NodeId>(focus_index);
}

NodeId QuestGraph::add_node(Goal goal, Response response) {
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(QuestNode{id, std::move(goal), std::move(response), clock_, clock_});
    adj_.emplace_back();
    return id;
}

bool QuestGraph::has_edge(NodeId a, NodeId b) const {
    const auto& n = neighbors(a);
    return std::find(n.begin(), n.end(), b) != n.end();
}

void QuestGraph::add_edge(NodeId a, NodeId b) {
    if (a == b) throw std::invalid_argument("self-edges are not stored");
    if (has_edge(a, b)) throw std::invalid_argument("duplicate edge");
    adj_[static_cast<std::size_t>(a)].push_back(b);
    adj_[static_cast<std::size_t>(b)].push_back(a);
}

void QuestGraph::set_response(NodeId id, Response response) {
    auto& n = nodes_.at(static_cast<std::size_t>(id));
    n.response = std::move(response);
    n.updated_at = clock_;
}

void QuestGraph::set_focus(NodeId id) {
    if (id < 0 || id >= size()) throw std::invalid_argument("focus must name an existing node");
    focus_ = id;
}

bool QuestGraph::operator==(const QuestGraph& other) const {
    return nodes_ == other.nodes_ && adj_ == other.adj_ && focus_ == other.focus_ &&
           clock_ == other.clock_;
}

LocalContext observe(QuestGraph& graph, int capacity, const NeighborSelector& selector) {
    if (capacity < 1) throw std::invalid_argument("context capacity must be positive");
    const NodeId focus = graph.focus();

    std::vector<NodeId> chosen;
    if (selector) {
        chosen = selector(graph, focus, capacity);
        if (static_cast<int>(chosen.size()) > capacity)
            throw std::logic_error("selector returned more neighbors than the capacity");
        for (NodeId id : chosen)
            if (!graph.has_edge(focus, id))
                throw std::logic_error("selector returned a non-neighbor");
    } else {
        chosen = graph.neighbors(focus);
        std::sort(chosen.begin(), chosen.end()); // ascending creation time
        if (static_cast<int>(chosen.size()) > capacity) chosen.resize(static_cast<std::size_t>(capacity));
    }
    if (graph.degree(focus) > static_cast<int>(chosen.size())) graph.note_truncation();

    LocalContext ctx;
    ctx.focus = graph.node(focus);
    ctx.neighbors.reserve(chosen.size());
    for (NodeId id : chosen) ctx.neighbors.push_back(graph.node(id));
    return ctx;
}

std::string context_digest(const LocalContext& ctx) {
    std::string d;
    d.reserve(32);
    d += ctx.focus.goal.str();
    d += '/';
    d += response_str(ctx.focus.response);
    for (const auto& n : ctx.neighbors) {
        d += '|';
        d += n.goal.str();
        d += '/';
        d += response_str(n.response);
    }
    return d;
}

namespace {

std::optional<NodeId> resolve_slot(const LocalContext& ctx, ContextSlot slot) {
    if (slot == 0) return ctx.focus.id;
    if (slot <= ctx.neighbors.size()) return ctx.neighbors[slot - 1].id;
    return std::nullopt;
}

} // namespace

StepOutcome apply(QuestGraph& graph, const AgentAction& action, const LocalContext& ctx) {
    graph.tick();
    if (const auto* d = std::get_if<DiscoverAction>(&action)) {
        if (d->attach.empty())
            return {StepStatus::illegal, "discover must attach the new node to the context"};
        std::vector<NodeId> targets;
        targets.reserve(d->attach.size());
        for (ContextSlot slot : d->attach) {
            auto id = resolve_slot(ctx, slot);
            if (!id) return {StepStatus::illegal, "discover attach pointer outside the context"};
            if (std::find(targets.begin(), targets.end(), *id) != targets.end())
                return {StepStatus::illegal, "discover attach pointer repeated"};
            targets.push_back(*id);
        }
        NodeId fresh = graph.add_node(d->goal, d->initial_response);
        for (NodeId t : targets) graph.add_edge(fresh, t);
        return {StepStatus::ok, {}};
    }
    if (const auto* rm = std::get_if<RespondMoveAction>(&action)) {
        auto id = resolve_slot(ctx, rm->move_to);
        if (!id) return {StepStatus::illegal, "move pointer outside the context"};
        graph.set_response(ctx.focus.id, rm->response);
        graph.set_focus(*id);
        return {StepStatus::ok, {}};
    }
    return {StepStatus::stopped, {}};
}

const char* halt_reason_str(HaltReason r) {
    switch (r) {
    case HaltReason::stopped: return "stopped";
    case HaltReason::budget_exhausted: return "budget exhausted";
    case HaltReason::illegal_action: return "illegal action";
    }
    return "?";
}

RunResult run(QuestGraph initial, const AgentFn& agent, int capacity, long budget,
              const NeighborSelector& selector) {
    RunResult result{HaltReason::budget_exhausted, std::move(initial), {}, {}, {}};
    for (long step = 0; step < budget; ++step) {
        LocalContext ctx = observe(result.graph, capacity, selector);
        AgentAction action = agent(ctx);
        result.trace.push_back(
            TraceEvent{static_cast<int>(step), ctx.focus.id, context_digest(ctx), action});
        if (std::holds_alternative<DiscoverAction>(action))
            ++result.counts.discover;
        else if (std::holds_alternative<RespondMoveAction>(action))
            ++result.counts.respond_move;
        else
            ++result.counts.stop;
        StepOutcome out = apply(result.graph, action, ctx);
        if (out.status == StepStatus::stopped) {
            result.reason = HaltReason::stopped;
            return result;
        }
        if (out.status == StepStatus::illegal) {
            result.reason = HaltReason::illegal_action;
            result.diagnostic = out.diagnostic;
            return result;
        }
    }
    return result;
}

QuestGraph replay(QuestGraph initial, const std::vector<TraceEvent>& trace, int capacity,
                  const NeighborSelector& selector) {
    for (const TraceEvent& ev : trace) {
        LocalContext ctx = observe(initial, capacity, selector);
        StepOutcome out = apply(initial, ev.action, ctx);
        if (out.status != StepStatus::ok) break;
    }
    return initial;
}

} // namespace qg
