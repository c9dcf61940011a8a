/* qdp.hpp -- constrained quest engines: FQDP (deterministic, depth-first)
 * and NFQDP (decoupled discover/pursue over pre-built trees)
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <qg/core.hpp>

namespace qg {

// Reserved response marks. They never collide with construction payloads
// because construction tags do not start with '#'.
namespace marks {
inline const Value& parent() {
    static const Value v{"#pi", {}};
    return v;
}
inline const Value& terminal() {
    static const Value v{"#phi", {}};
    return v;
}
inline const Value& rejected() {
    static const Value v{"#reject", {}};
    return v;
}
inline bool is_mark(const Value& v) { return !v.tag.empty() && v.tag.front() == '#'; }
} // namespace marks

// A node counts as complete once it carries a real response; the parent
// mark keeps it incomplete.
inline bool qdp_complete(const Response& r) { return r.has_value() && !(*r == marks::parent()); }

struct FqdpConfig {
    int child_limit = 8;
    int capacity = 4;
};

// Parent/child bookkeeping over a QuestGraph whose edges form a tree.
class QuestTree {
public:
    QuestTree() : QuestTree(0) {}
    explicit QuestTree(NodeId root) : root_(root), parent_{-1}, children_(1) {}

    NodeId root() const { return root_; }
    std::optional<NodeId> parent(NodeId id) const {
        NodeId p = parent_.at(static_cast<std::size_t>(id));
        if (p < 0) return std::nullopt;
        return p;
    }
    const std::vector<NodeId>& children(NodeId id) const {
        return children_.at(static_cast<std::size_t>(id));
    }
    int child_count(NodeId id) const { return static_cast<int>(children(id).size()); }
    int size() const { return static_cast<int>(parent_.size()); }

    void add_child(NodeId parent, NodeId child);
    std::vector<NodeId> path_to_root(NodeId id) const;
    int depth(NodeId id) const { return static_cast<int>(path_to_root(id).size()) - 1; }

private:
    NodeId root_;
    std::vector<NodeId> parent_;
    std::vector<std::vector<NodeId>> children_;
};

struct QdpNodeView {
    NodeId id = 0;
    Goal goal;
    Response response;
    bool complete = false;
};

/*
 * The local context a QDP agent sees: the focus, its parent when one
 * exists, and a window of the most recently created children (in creation
 * order, at most capacity-1 of them). child_count is the focus node's true
 * child count, which the capacity does not restrict.
 */
struct QdpContext {
    QdpNodeView focus;
    std::optional<QdpNodeView> parent;
    std::vector<QdpNodeView> children;
    bool is_root = false;
    int child_count = 0;

    const QdpNodeView* last_child() const { return children.empty() ? nullptr : &children.back(); }
};

struct DiscoverInput { Goal goal; };
struct DiscoverSubquest { Goal goal; };
struct Pursue { std::size_t child_slot = 0; }; // index into the context's child window
struct CompleteQuest { Value response; };
struct Retrieve { Goal goal; }; // RQDP engines only
struct QdpStop {};

using QdpAction = std::variant<DiscoverInput, DiscoverSubquest, Pursue, CompleteQuest, Retrieve, QdpStop>;
using QdpAgent = std::function<QdpAction(const QdpContext&)>;

// Supplies the response of a discover-input node. Returning the empty
// response is the distinguished end-of-input marker.
using InputProvider = std::function<Response(const Goal&)>;

enum class QdpRule {
    child_limit,          // discover would exceed the child limit
    stop_off_root,        // stop while the focus is not the root
    stop_incomplete_root, // NFQDP: stop before the root is complete
    pursue_target,        // pursue names no incomplete child
    incomplete_children,  // NFQDP: complete with an incomplete child
    rewrite_completed,    // NFQDP: responding to an already-complete node
    action_kind,          // action outside this engine's vocabulary
    no_provider,          // discover-input without an input provider
};

struct QdpViolation {
    QdpRule rule;
    std::string detail;
};

enum class QdpVariant { fqdp, nfqdp, rqdp };

std::optional<QdpViolation> fqdp_legal(const QdpContext& ctx, const QuestTree& tree,
                                       const FqdpConfig& cfg, const QdpAction& action);
std::optional<QdpViolation> nfqdp_legal(const QdpContext& ctx, const QuestTree& tree,
                                        const FqdpConfig& cfg, const QdpAction& action);

struct QdpTraceEvent {
    int step = 0;
    NodeId focus = 0;
    QdpAction action;
};

struct QdpCounts {
    long long discover_input = 0;
    long long discover_subquest = 0;
    long long pursue = 0;
    long long complete = 0;
    long long retrieve = 0;
    long long stop = 0;

    long long total() const {
        return discover_input + discover_subquest + pursue + complete + retrieve + stop;
    }
};

struct QdpRunResult {
    HaltReason reason = HaltReason::budget_exhausted;
    QuestGraph graph;
    QuestTree tree;
    std::vector<QdpTraceEvent> trace;
    QdpCounts counts;
    std::optional<QdpViolation> violation;
    bool root_completed = false;
};

/*
 * Extension hooks used by the reference-augmented engines. on_create fires
 * for every fresh node (reference assignment), on_respond for every
 * response write including marks, on_retrieve performs the lookup for a
 * retrieve-created node, on_focus after every focus move.
 */
struct QdpHooks {
    std::function<void(NodeId parent, NodeId fresh, const Goal&)> on_create;
    std::function<void(NodeId, const Value&, int clock)> on_respond;
    std::function<Response(NodeId fresh)> on_retrieve;
    std::function<void(NodeId)> on_focus;
};

QdpRunResult qdp_run(QdpVariant variant, QuestGraph graph, QuestTree tree, const QdpAgent& agent,
                     const FqdpConfig& cfg, const InputProvider& provider, long budget,
                     const QdpHooks& hooks = {});

// Fresh single-node rollout, the usual FQDP entry point.
QdpRunResult fqdp_run(const Goal& root_goal, const QdpAgent& agent, const FqdpConfig& cfg,
                      const InputProvider& provider, long budget);

// Rollout over a possibly pre-built tree.
QdpRunResult nfqdp_run(QuestGraph graph, QuestTree tree, const QdpAgent& agent,
                       const FqdpConfig& cfg, const InputProvider& provider, long budget);

/*
 * Backtracking executor for generic NFQDP testing: whenever the agent
 * pursues, every legal pursue choice is explored; acceptance holds if any
 * branch stops cleanly.
 */
struct NfqdpSearchResult {
    bool accepted = false;
    long long branches = 0;
};

NfqdpSearchResult nfqdp_run_exhaustive(const QuestGraph& graph, const QuestTree& tree,
                                       const QdpAgent& agent, const FqdpConfig& cfg,
                                       const InputProvider& provider, long budget,
                                       long long max_branches = 100000);

// Tree description for pre-built NFQDP graphs.
struct TreeDesc {
    std::vector<std::pair<Goal, Response>> nodes;
    std::vector<std::pair<int, int>> links; // (parent index, child index)
    int focus = 0;
};

// Instantiates the description; throws on cycles, multiple parents or a
// missing/ambiguous root.
std::pair<QuestGraph, QuestTree> prebuild(const TreeDesc& desc);

} // namespace qg
