/* qdp.cpp -- FQDP/NFQDP engine implementation
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/qdp.hpp>

#include <algorithm>
#include <stdexcept>

namespace qg {

void QuestTree::add_child(NodeId parent, NodeId child) {
    if (child != static_cast<NodeId>(parent_.size()))
        throw std::logic_error("tree children must be registered in node-creation order");
    parent_.push_back(parent);
    children_.emplace_back();
    children_.at(static_cast<std::size_t>(parent)).push_back(child);
}

std::vector<NodeId> QuestTree::path_to_root(NodeId id) const {
    std::vector<NodeId> path{id};
    while (true) {
        auto p = parent(path.back());
        if (!p) break;
        path.push_back(*p);
    }
    return path;
}

namespace {

QdpContext make_context(const QuestGraph& graph, const QuestTree& tree, const FqdpConfig& cfg) {
    auto view = [&](NodeId id) {
        const QuestNode& n = graph.node(id);
        return QdpNodeView{id, n.goal, n.response, qdp_complete(n.response)};
    };
    QdpContext ctx;
    const NodeId focus = graph.focus();
    ctx.focus = view(focus);
    auto p = tree.parent(focus);
    ctx.is_root = !p.has_value();
    if (p) ctx.parent = view(*p);
    const auto& kids = tree.children(focus);
    ctx.child_count = static_cast<int>(kids.size());
    const std::size_t window = static_cast<std::size_t>(std::max(0, cfg.capacity - 1));
    const std::size_t from = kids.size() > window ? kids.size() - window : 0;
    for (std::size_t i = from; i < kids.size(); ++i) ctx.children.push_back(view(kids[i]));
    return ctx;
}

std::optional<QdpViolation> check_discover(const QdpContext& ctx, const FqdpConfig& cfg) {
    if (ctx.child_count >= cfg.child_limit)
        return QdpViolation{QdpRule::child_limit,
                            "focus already has " + std::to_string(ctx.child_count) + " children"};
    return std::nullopt;
}

} // namespace

std::optional<QdpViolation> fqdp_legal(const QdpContext& ctx, const QuestTree&,
                                       const FqdpConfig& cfg, const QdpAction& action) {
    if (std::holds_alternative<Pursue>(action))
        return QdpViolation{QdpRule::action_kind, "pursue is an NFQDP action"};
    if (std::holds_alternative<Retrieve>(action))
        return QdpViolation{QdpRule::action_kind, "retrieve needs an RQDP engine"};
    if (std::holds_alternative<DiscoverInput>(action) ||
        std::holds_alternative<DiscoverSubquest>(action))
        return check_discover(ctx, cfg);
    if (std::holds_alternative<QdpStop>(action)) {
        if (!ctx.is_root) return QdpViolation{QdpRule::stop_off_root, "stop away from the root"};
        return std::nullopt;
    }
    return std::nullopt; // complete-quest: moving back to the parent is the definition
}

std::optional<QdpViolation> nfqdp_legal(const QdpContext& ctx, const QuestTree& tree,
                                        const FqdpConfig& cfg, const QdpAction& action) {
    if (std::holds_alternative<Retrieve>(action))
        return QdpViolation{QdpRule::action_kind, "retrieve needs an RQDP engine"};
    if (std::holds_alternative<DiscoverInput>(action) ||
        std::holds_alternative<DiscoverSubquest>(action))
        return check_discover(ctx, cfg);
    if (const auto* p = std::get_if<Pursue>(&action)) {
        if (p->child_slot >= ctx.children.size())
            return QdpViolation{QdpRule::pursue_target, "pursue slot outside the context"};
        if (ctx.children[p->child_slot].complete)
            return QdpViolation{QdpRule::pursue_target, "pursue names a complete child"};
        return std::nullopt;
    }
    if (std::holds_alternative<CompleteQuest>(action)) {
        if (ctx.focus.complete)
            return QdpViolation{QdpRule::rewrite_completed, "focus is already complete"};
        // Completeness of all children (not just the window) is checked by
        // the engine, which has graph access.
        (void)tree;
        return std::nullopt;
    }
    if (std::holds_alternative<QdpStop>(action)) {
        if (!ctx.is_root) return QdpViolation{QdpRule::stop_off_root, "stop away from the root"};
        return std::nullopt;
    }
    return std::nullopt;
}

QdpRunResult qdp_run(QdpVariant variant, QuestGraph graph, QuestTree tree, const QdpAgent& agent,
                     const FqdpConfig& cfg, const InputProvider& provider, long budget,
                     const QdpHooks& hooks) {
    QdpRunResult res{HaltReason::budget_exhausted, std::move(graph), std::move(tree), {}, {}, {}, false};
    QuestGraph& g = res.graph;
    QuestTree& t = res.tree;

    auto respond = [&](NodeId id, const Value& v) {
        g.set_response(id, v);
        if (hooks.on_respond) hooks.on_respond(id, v, g.clock());
    };
    auto created = [&](NodeId parent, NodeId fresh, const Goal& goal) {
        if (hooks.on_create) hooks.on_create(parent, fresh, goal);
    };
    auto focus_to = [&](NodeId id) {
        g.set_focus(id);
        if (hooks.on_focus) hooks.on_focus(id);
    };
    auto fail = [&](QdpViolation v) {
        res.reason = HaltReason::illegal_action;
        res.violation = std::move(v);
    };

    for (long step = 0; step < budget; ++step) {
        QdpContext ctx = make_context(g, t, cfg);
        QdpAction action = agent(ctx);
        res.trace.push_back(QdpTraceEvent{static_cast<int>(step), ctx.focus.id, action});

        auto violation = variant == QdpVariant::nfqdp ? nfqdp_legal(ctx, t, cfg, action)
                                                      : fqdp_legal(ctx, t, cfg, action);
        if (variant == QdpVariant::rqdp && violation && violation->rule == QdpRule::action_kind &&
            std::holds_alternative<Retrieve>(action))
            violation.reset(); // retrieve is part of the RQDP vocabulary
        if (violation) {
            fail(*violation);
            return res;
        }

        g.tick();
        const NodeId focus = ctx.focus.id;
        if (const auto* di = std::get_if<DiscoverInput>(&action)) {
            ++res.counts.discover_input;
            if (!provider) {
                fail({QdpRule::no_provider, "discover-input without an input provider"});
                return res;
            }
            Response r = provider(di->goal);
            NodeId fresh = g.add_node(di->goal, std::nullopt);
            g.add_edge(focus, fresh);
            t.add_child(focus, fresh);
            created(focus, fresh, di->goal);
            if (r) respond(fresh, *r); // the received information registers as a write
        } else if (const auto* ds = std::get_if<DiscoverSubquest>(&action)) {
            ++res.counts.discover_subquest;
            NodeId fresh = g.add_node(ds->goal, std::nullopt);
            g.add_edge(focus, fresh);
            t.add_child(focus, fresh);
            created(focus, fresh, ds->goal);
            if (variant != QdpVariant::nfqdp) {
                // FQDP discovery marks the parent and dives in one step.
                respond(focus, marks::parent());
                focus_to(fresh);
            }
        } else if (const auto* pu = std::get_if<Pursue>(&action)) {
            ++res.counts.pursue;
            respond(focus, marks::parent());
            focus_to(ctx.children[pu->child_slot].id);
        } else if (const auto* cq = std::get_if<CompleteQuest>(&action)) {
            ++res.counts.complete;
            if (variant == QdpVariant::nfqdp) {
                for (NodeId kid : t.children(focus))
                    if (!qdp_complete(g.node(kid).response)) {
                        fail({QdpRule::incomplete_children,
                              "child " + std::to_string(kid) + " is incomplete"});
                        return res;
                    }
            }
            respond(focus, cq->response);
            auto parent = t.parent(focus);
            if (parent)
                focus_to(*parent);
            else
                res.root_completed = true; // final respond with a self-loop
        } else if (const auto* rt = std::get_if<Retrieve>(&action)) {
            ++res.counts.retrieve;
            if (!hooks.on_retrieve) {
                fail({QdpRule::action_kind, "engine has no retrieve hook"});
                return res;
            }
            NodeId fresh = g.add_node(rt->goal, std::nullopt);
            g.add_edge(focus, fresh);
            t.add_child(focus, fresh);
            created(focus, fresh, rt->goal);
            Response r = hooks.on_retrieve(fresh);
            if (r) g.set_response(fresh, *r); // a copy, not a write event
        } else {
            ++res.counts.stop;
            if (variant == QdpVariant::nfqdp && !qdp_complete(g.node(t.root()).response)) {
                fail({QdpRule::stop_incomplete_root, "root is not complete"});
                return res;
            }
            res.reason = HaltReason::stopped;
            return res;
        }
    }
    return res;
}

QdpRunResult fqdp_run(const Goal& root_goal, const QdpAgent& agent, const FqdpConfig& cfg,
                      const InputProvider& provider, long budget) {
    QuestGraph g({{root_goal, std::nullopt}}, {}, 0);
    return qdp_run(QdpVariant::fqdp, std::move(g), QuestTree(0), agent, cfg, provider, budget);
}

QdpRunResult nfqdp_run(QuestGraph graph, QuestTree tree, const QdpAgent& agent,
                       const FqdpConfig& cfg, const InputProvider& provider, long budget) {
    return qdp_run(QdpVariant::nfqdp, std::move(graph), std::move(tree), agent, cfg, provider,
                   budget);
}

namespace {

bool nfqdp_search(const QuestGraph& graph, const QuestTree& tree, const QdpAgent& agent,
                  const FqdpConfig& cfg, const InputProvider& provider, long budget,
                  long long max_branches, long long& branches) {
    QuestGraph g = graph;
    QuestTree t = tree;
    for (long step = 0; step < budget; ++step) {
        if (++branches > max_branches) return false;
        QdpContext ctx = make_context(g, t, cfg);
        QdpAction action = agent(ctx);
        if (const auto* pu = std::get_if<Pursue>(&action)) {
            // Branch over every legal pursue choice, the agent's one first.
            std::vector<std::size_t> slots;
            if (pu->child_slot < ctx.children.size() && !ctx.children[pu->child_slot].complete)
                slots.push_back(pu->child_slot);
            for (std::size_t i = 0; i < ctx.children.size(); ++i)
                if (i != pu->child_slot && !ctx.children[i].complete) slots.push_back(i);
            if (slots.empty()) return false;
            if (slots.size() == 1) {
                if (nfqdp_legal(ctx, t, cfg, QdpAction{Pursue{slots[0]}})) return false;
                g.tick();
                g.set_response(ctx.focus.id, marks::parent());
                g.set_focus(ctx.children[slots[0]].id);
                continue;
            }
            for (std::size_t slot : slots) {
                QuestGraph g2 = g;
                QuestTree t2 = t;
                g2.tick();
                g2.set_response(ctx.focus.id, marks::parent());
                g2.set_focus(ctx.children[slot].id);
                if (nfqdp_search(g2, t2, agent, cfg, provider, budget - step - 1, max_branches,
                                 branches))
                    return true;
            }
            return false;
        }
        // Deterministic actions run in place through the regular engine step.
        QdpRunResult one = qdp_run(QdpVariant::nfqdp, std::move(g), std::move(t), [&](const QdpContext&) {
            return action;
        }, cfg, provider, 1);
        if (one.reason == HaltReason::stopped) return true;
        if (one.reason == HaltReason::illegal_action) return false;
        g = std::move(one.graph);
        t = std::move(one.tree);
    }
    return false;
}

} // namespace

NfqdpSearchResult nfqdp_run_exhaustive(const QuestGraph& graph, const QuestTree& tree,
                                       const QdpAgent& agent, const FqdpConfig& cfg,
                                       const InputProvider& provider, long budget,
                                       long long max_branches) {
    NfqdpSearchResult res;
    res.accepted = nfqdp_search(graph, tree, agent, cfg, provider, budget, max_branches, res.branches);
    return res;
}

std::pair<QuestGraph, QuestTree> prebuild(const TreeDesc& desc) {
    const int n = static_cast<int>(desc.nodes.size());
    if (n == 0) throw std::invalid_argument("prebuild: empty description");
    if (desc.focus < 0 || desc.focus >= n) throw std::invalid_argument("prebuild: focus out of range");

    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    for (auto [p, c] : desc.links) {
        if (p < 0 || c < 0 || p >= n || c >= n)
            throw std::invalid_argument("prebuild: link references a missing node");
        if (parent[static_cast<std::size_t>(c)] != -1)
            throw std::invalid_argument("prebuild: node " + std::to_string(c) + " has two parents");
        parent[static_cast<std::size_t>(c)] = p;
    }
    int root = -1;
    for (int i = 0; i < n; ++i) {
        if (parent[static_cast<std::size_t>(i)] != -1) continue;
        if (root != -1) throw std::invalid_argument("prebuild: description is a forest");
        root = i;
    }
    if (root == -1) throw std::invalid_argument("prebuild: cycle in description (no root)");
    // Cycle check: every node must reach the root.
    for (int i = 0; i < n; ++i) {
        int hops = 0;
        for (int v = i; v != root; v = parent[static_cast<std::size_t>(v)])
            if (++hops > n) throw std::invalid_argument("prebuild: cycle in description");
    }

    // Creation order must be parent-before-child for QuestTree bookkeeping;
    // remap ids topologically while keeping the description's relative order.
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<bool> placed(static_cast<std::size_t>(n), false);
    order.push_back(root);
    placed[static_cast<std::size_t>(root)] = true;
    while (static_cast<int>(order.size()) < n) {
        bool progressed = false;
        for (int i = 0; i < n; ++i) {
            if (placed[static_cast<std::size_t>(i)]) continue;
            if (placed[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])]) {
                order.push_back(i);
                placed[static_cast<std::size_t>(i)] = true;
                progressed = true;
            }
        }
        if (!progressed) throw std::invalid_argument("prebuild: cycle in description");
    }

    std::vector<int> new_id(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) new_id[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

    std::vector<std::pair<Goal, Response>> seed;
    seed.reserve(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) seed.push_back(desc.nodes[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])]);
    QuestGraph g(std::move(seed), {}, new_id[static_cast<std::size_t>(desc.focus)]);

    QuestTree t(0);
    for (int pos = 1; pos < n; ++pos) {
        int orig = order[static_cast<std::size_t>(pos)];
        NodeId p = static_cast<NodeId>(new_id[static_cast<std::size_t>(parent[static_cast<std::size_t>(orig)])]);
        g.add_edge(p, static_cast<NodeId>(pos));
        t.add_child(p, static_cast<NodeId>(pos));
    }
    return {std::move(g), std::move(t)};
}

} // namespace qg
