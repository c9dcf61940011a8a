/* cgsim.cpp -- operation-counting simulations of bounded computation graphs
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/cgsim.hpp>

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace qg {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

int goal_id(const Goal& g) { return std::stoi(g.field(0)); }

} // namespace

SimReport sim_questgraph(const Bmcg& b) {
    Timer timer;
    SimReport rep;
    rep.variant = "qg";
    rep.n = b.original_count;
    rep.c = b.bound;

    const int total = b.size();
    // Topological rank: originals carry their execution position; a proxy
    // sits between its sources and its owner.
    std::vector<int> rank(static_cast<std::size_t>(total));
    {
        std::vector<int> indeg(static_cast<std::size_t>(total));
        std::vector<int> queue;
        for (int v = 0; v < total; ++v) {
            indeg[static_cast<std::size_t>(v)] = b.in_degree(v);
            if (indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
        }
        int next = 0;
        for (std::size_t i = 0; i < queue.size(); ++i) {
            int v = queue[i];
            rank[static_cast<std::size_t>(v)] = next++;
            for (int w : b.out_edges[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(w)] == 0) queue.push_back(w);
        }
        if (next != total) throw std::logic_error("bmcg is not acyclic");
    }

    std::vector<std::pair<Goal, Response>> seed;
    seed.reserve(static_cast<std::size_t>(total));
    for (int v = 0; v < total; ++v) seed.push_back({val("task", {std::to_string(v)}), std::nullopt});
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < total; ++v)
        for (int u : b.in_edges[static_cast<std::size_t>(v)]) edges.push_back({u, v});
    const int root = b.original_count - 1; // the execution-last node
    QuestGraph g(std::move(seed), edges, root);

    auto is_dep = [&](int u, int v) {
        return rank[static_cast<std::size_t>(u)] < rank[static_cast<std::size_t>(v)];
    };
    auto visiting_of = [](const Response& r) -> std::optional<int> {
        if (!r || r->tag != "visiting") return std::nullopt;
        return std::stoi(r->fields[0]);
    };

    // Selector: one incomplete dependency (if any) first, then the node
    // holding the visiting mark that points back at the focus.
    NeighborSelector selector = [&](const QuestGraph& graph, NodeId focus, int cap) {
        std::vector<NodeId> out;
        const int fid = goal_id(graph.node(focus).goal);
        NodeId best_dep = -1;
        NodeId parent = -1;
        for (NodeId nb : graph.neighbors(focus)) {
            const QuestNode& n = graph.node(nb);
            const int nid = goal_id(n.goal);
            if (is_dep(nid, fid) && !n.response.has_value() &&
                (best_dep < 0 || rank[static_cast<std::size_t>(nid)] <
                                     rank[static_cast<std::size_t>(goal_id(graph.node(best_dep).goal))]))
                best_dep = nb;
            if (auto mark = visiting_of(n.response); mark && *mark == fid) parent = nb;
        }
        if (best_dep >= 0) out.push_back(best_dep);
        if (parent >= 0 && static_cast<int>(out.size()) < cap) out.push_back(parent);
        return out;
    };

    AgentFn agent = [&](const LocalContext& ctx) -> AgentAction {
        const int fid = goal_id(ctx.focus.goal);
        if (ctx.focus.response && ctx.focus.response->tag == "val") return StopAction{};
        std::optional<std::size_t> dep_slot;
        std::optional<std::size_t> parent_slot;
        for (std::size_t i = 0; i < ctx.neighbors.size(); ++i) {
            const QuestNode& n = ctx.neighbors[i];
            if (!n.response.has_value() && is_dep(goal_id(n.goal), fid)) dep_slot = i + 1;
            if (auto mark = visiting_of(n.response); mark && *mark == fid) parent_slot = i + 1;
        }
        if (dep_slot) {
            const QuestNode& d = ctx.neighbors[*dep_slot - 1];
            return RespondMoveAction{val("visiting", {std::to_string(d.id)}), *dep_slot};
        }
        // All dependencies computed: compute the focus and backtrack.
        Value computed = val("val", {std::to_string(fid)});
        if (parent_slot) return RespondMoveAction{computed, *parent_slot};
        return RespondMoveAction{computed, 0}; // the root computes in place
    };

    // The visiting mark stores node ids, so the selector compares against
    // graph node ids; goals carry matching ids by construction.
    RunResult run_res = run(std::move(g), agent, std::max(2, b.bound), 4L * total + 16, selector);
    rep.halted = run_res.reason == HaltReason::stopped;
    rep.ops.discover = run_res.counts.discover;
    rep.ops.respond_move = run_res.counts.respond_move;

    rep.computes.assign(static_cast<std::size_t>(total), 0);
    for (const auto& ev : run_res.trace)
        if (const auto* rm = std::get_if<RespondMoveAction>(&ev.action))
            if (rm->response && rm->response->tag == "val")
                ++rep.computes[static_cast<std::size_t>(ev.focus)];
    rep.wall_ms = timer.ms();
    return rep;
}

SimReport sim_rqdp(const Mcg& mcg, int c) {
    std::vector<std::vector<int>> deps(static_cast<std::size_t>(mcg.size()));
    for (int i = 0; i < mcg.size(); ++i)
        for (int j = 0; j < i; ++j) deps[static_cast<std::size_t>(i)].push_back(j);
    return sim_rqdp(deps, c);
}

SimReport sim_rqdp(const std::vector<std::vector<int>>& deps, int c) {
    Timer timer;
    SimReport rep;
    rep.variant = "rqdp";
    rep.n = static_cast<int>(deps.size());
    rep.c = c;
    const int n = rep.n;

    // Child goals carry (dependency node, ordinal within the focus node's
    // dependency list) so the agent can resume after each resolution.
    QdpAgent agent = [&deps](const QdpContext& ctx) -> QdpAction {
        const QdpNodeView& f = ctx.focus;
        if (f.complete) return QdpStop{}; // only the completed root is ever observed
        const int i = goal_id(f.goal);
        const auto& need = deps[static_cast<std::size_t>(i)];
        const QdpNodeView* last = ctx.last_child();
        auto fetch = [&](std::size_t ord) {
            return Retrieve{val("fetch", {std::to_string(need[ord]), std::to_string(ord)})};
        };
        auto compute_done = [&]() { return CompleteQuest{val("res", {std::to_string(i)})}; };
        if (!last) return need.empty() ? QdpAction{compute_done()} : QdpAction{fetch(0)};
        const std::size_t ord = static_cast<std::size_t>(std::stoi(last->goal.field(1)));
        if (last->goal.tag == "fetch" && !last->complete)
            return DiscoverSubquest{val("node", {last->goal.field(0), last->goal.field(1)})};
        return ord + 1 < need.size() ? QdpAction{fetch(ord + 1)} : QdpAction{compute_done()};
    };

    TauFn tau = [](Reference, const Goal& goal) {
        return static_cast<Reference>(std::stoll(goal.field(0)));
    };

    RqdpRunResult rr = rqdp_run(val("node", {std::to_string(n - 1), "0"}),
                                static_cast<Reference>(n - 1), agent, tau,
                                FqdpConfig{2 * n + 2, c}, {}, 16L * n * n + 64);
    rep.halted = rr.run.reason == HaltReason::stopped;
    rep.ops.discover = rr.run.counts.discover_input + rr.run.counts.discover_subquest;
    rep.ops.respond_move = rr.run.counts.complete;
    rep.ops.retrieve_raw = rr.run.counts.retrieve;
    rep.ops.retrieve_weighted = rr.retrieve_weighted;

    rep.computes.assign(static_cast<std::size_t>(n), 0);
    for (const auto& ev : rr.run.trace)
        if (std::holds_alternative<CompleteQuest>(ev.action)) {
            const QuestNode& node = rr.run.graph.node(ev.focus);
            if (node.goal.tag == "node")
                ++rep.computes[static_cast<std::size_t>(goal_id(node.goal))];
        }
    rep.wall_ms = timer.ms();
    return rep;
}

SimReport sim_fqdp(const Bmcg& b, int n_cap) {
    if (b.original_count > n_cap)
        throw std::invalid_argument("sim_fqdp: node count above the exponential cap");
    Timer timer;
    SimReport rep;
    rep.variant = "fqdp";
    rep.n = b.original_count;
    rep.c = b.bound;

    QdpAgent agent = [&b](const QdpContext& ctx) -> QdpAction {
        const QdpNodeView& f = ctx.focus;
        if (f.complete) return QdpStop{};
        const int v = goal_id(f.goal);
        const auto& deps = b.in_edges[static_cast<std::size_t>(v)];
        const QdpNodeView* last = ctx.last_child();
        auto subquest = [&](std::size_t ord) {
            return DiscoverSubquest{
                val("node", {std::to_string(deps[ord]), std::to_string(ord)})};
        };
        auto compute_done = [&]() { return CompleteQuest{val("res", {std::to_string(v)})}; };
        if (!last) return deps.empty() ? QdpAction{compute_done()} : QdpAction{subquest(0)};
        std::size_t ord = static_cast<std::size_t>(std::stoi(last->goal.field(1)));
        return ord + 1 < deps.size() ? QdpAction{subquest(ord + 1)} : QdpAction{compute_done()};
    };

    const long budget = (2L << std::min(40, 2 * b.original_count)) + 1024;
    QdpRunResult qr = fqdp_run(val("node", {std::to_string(b.original_count - 1), "0"}), agent,
                               FqdpConfig{b.original_count + 2, 4}, {}, budget);
    rep.halted = qr.reason == HaltReason::stopped;
    rep.ops.discover = qr.counts.discover_input + qr.counts.discover_subquest;
    rep.ops.respond_move = qr.counts.complete;

    rep.computes.assign(static_cast<std::size_t>(b.size()), 0);
    for (const auto& ev : qr.trace)
        if (std::holds_alternative<CompleteQuest>(ev.action))
            ++rep.computes[static_cast<std::size_t>(goal_id(qr.graph.node(ev.focus).goal))];
    rep.wall_ms = timer.ms();
    return rep;
}

SBounds s_bounds(int n) {
    if (n < 1 || n > 62) throw std::invalid_argument("s_bounds: N out of range");
    std::vector<long long> lo(static_cast<std::size_t>(n) + 1, 0);
    std::vector<long long> hi(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 1; k <= n; ++k) {
        long long sl = 0, sh = 0;
        for (int i = 1; i < k; ++i) {
            sl += lo[static_cast<std::size_t>(i)];
            sh += hi[static_cast<std::size_t>(i)];
        }
        lo[static_cast<std::size_t>(k)] = 1 + sl;
        hi[static_cast<std::size_t>(k)] = k + sh;
    }
    SBounds out{lo[static_cast<std::size_t>(n)], hi[static_cast<std::size_t>(n)]};
    const long long closed_lo = 1LL << (n - 1);
    const long long closed_hi = (1LL << n) - 1;
    if (out.lower != closed_lo || out.upper != closed_hi)
        throw std::logic_error("s_bounds: recurrence disagrees with the closed forms");
    return out;
}

namespace {

// Post-order stack evaluation of one proxy tree; returns the maximum
// number of simultaneously held intermediate values.
struct ReductionNode {
    std::vector<int> children; // -1 marks a leaf input
};

int max_live_for_degree(int d, int c) {
    if (d <= 0) return 1;
    std::vector<ReductionNode> nodes;
    std::vector<int> level(static_cast<std::size_t>(d), -1);
    while (static_cast<int>(level.size()) > c) {
        std::vector<int> next;
        std::size_t full = level.size() / static_cast<std::size_t>(c);
        for (std::size_t k = 0; k < full; ++k) {
            ReductionNode p;
            for (std::size_t j = 0; j < static_cast<std::size_t>(c); ++j)
                p.children.push_back(level[k * static_cast<std::size_t>(c) + j]);
            nodes.push_back(std::move(p));
            next.push_back(static_cast<int>(nodes.size()) - 1);
        }
        for (std::size_t j = full * static_cast<std::size_t>(c); j < level.size(); ++j)
            next.push_back(level[j]);
        level = std::move(next);
    }
    ReductionNode root;
    root.children = level;
    nodes.push_back(std::move(root));

    int held = 0, max_held = 0;
    std::function<void(int)> eval = [&](int id) {
        if (id < 0) { // leaf: its value becomes live
            max_held = std::max(max_held, ++held);
            return;
        }
        for (int ch : nodes[static_cast<std::size_t>(id)].children) eval(ch);
        held -= static_cast<int>(nodes[static_cast<std::size_t>(id)].children.size()) - 1;
    };
    eval(static_cast<int>(nodes.size()) - 1);
    return max_held;
}

} // namespace

LmWitness lm_window_witness(const std::vector<int>& n_sweep, int c) {
    if (c < 2) throw std::invalid_argument("lm_window_witness: window must be at least 2");
    LmWitness out;
    for (int n : n_sweep) {
        int live = max_live_for_degree(n - 1, c);
        out.live_by_n.push_back({n, live});
        if (!out.witness_n && live > c) out.witness_n = n;
    }
    return out;
}

GrowthFit growth_fit(const std::vector<SimReport>& reports) {
    if (reports.size() < 5)
        throw std::invalid_argument("growth_fit: at least five points are required");
    auto slope_of = [](const std::vector<std::pair<double, double>>& pts) {
        double mx = 0, my = 0;
        for (auto [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
        double num = 0, den = 0;
        for (auto [x, y] : pts) {
            num += (x - mx) * (y - my);
            den += (x - mx) * (x - mx);
        }
        return num / den;
    };

    std::vector<std::pair<double, double>> pts;
    for (const auto& r : reports)
        pts.push_back({std::log(static_cast<double>(r.n)),
                       std::log(std::max(1.0, r.ops.weighted_total()))});

    GrowthFit fit;
    fit.slope = slope_of(pts);
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double ss = 0;
    for (auto [x, y] : pts) {
        double pred = my + fit.slope * (x - mx);
        ss += (y - pred) * (y - pred);
    }
    fit.residual = std::sqrt(ss / static_cast<double>(pts.size()));

    const std::size_t half = pts.size() / 2;
    std::vector<std::pair<double, double>> first(pts.begin(), pts.begin() + static_cast<long>(half) + 1);
    std::vector<std::pair<double, double>> second(pts.begin() + static_cast<long>(half) - 1, pts.end());
    if (first.size() >= 2 && second.size() >= 2)
        fit.superpolynomial = slope_of(second) - slope_of(first) > 0.5;
    return fit;
}

} // namespace qg
