/* compgraph.cpp -- DAG -> MCG -> BMCG transforms
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/compgraph.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qg {

Mcg mcg_from_dag(const Dag& dag) {
    const int n = dag.size();
    if (n == 0) throw std::invalid_argument("mcg: empty graph");

    std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
    for (auto [u, v] : dag.edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("mcg: edge references a missing node");
        succ[static_cast<std::size_t>(u)].push_back(v);
        pred[static_cast<std::size_t>(v)].push_back(u);
    }

    // Cycle detection by coloring; reports the offending back edge.
    {
        std::vector<int> color(static_cast<std::size_t>(n), 0);
        std::vector<std::pair<int, std::size_t>> stack;
        for (int s = 0; s < n; ++s) {
            if (color[static_cast<std::size_t>(s)] != 0) continue;
            stack.push_back({s, 0});
            color[static_cast<std::size_t>(s)] = 1;
            while (!stack.empty()) {
                auto& [v, idx] = stack.back();
                if (idx < succ[static_cast<std::size_t>(v)].size()) {
                    int w = succ[static_cast<std::size_t>(v)][idx++];
                    if (color[static_cast<std::size_t>(w)] == 1) throw CycleError{v, w};
                    if (color[static_cast<std::size_t>(w)] == 0) {
                        color[static_cast<std::size_t>(w)] = 1;
                        stack.push_back({w, 0});
                    }
                } else {
                    color[static_cast<std::size_t>(v)] = 2;
                    stack.pop_back();
                }
            }
        }
    }

    // Unified terminal at order 0 when more than one node has no dependents.
    std::vector<int> terminals;
    for (int v = 0; v < n; ++v)
        if (succ[static_cast<std::size_t>(v)].empty()) terminals.push_back(v);

    Mcg mcg;
    mcg.added_terminal = terminals.size() > 1;

    // Backward order assignment: order(v) = 1 + max(order of dependents),
    // terminal(s) at order 0. Process in reverse topological order.
    std::vector<int> topo;
    {
        std::vector<int> indeg(static_cast<std::size_t>(n), 0);
        for (int v = 0; v < n; ++v)
            indeg[static_cast<std::size_t>(v)] = static_cast<int>(pred[static_cast<std::size_t>(v)].size());
        std::vector<int> queue;
        for (int v = 0; v < n; ++v)
            if (indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            int v = queue[i];
            topo.push_back(v);
            for (int w : succ[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(w)] == 0) queue.push_back(w);
        }
    }

    std::vector<int> ord(static_cast<std::size_t>(n), 0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        int v = *it;
        int best = succ[static_cast<std::size_t>(v)].empty() ? (mcg.added_terminal ? 1 : 0) : 0;
        for (int w : succ[static_cast<std::size_t>(v)])
            best = std::max(best, ord[static_cast<std::size_t>(w)] + 1);
        ord[static_cast<std::size_t>(v)] = best;
    }

    // Execution order: descending order number (dependencies first, the
    // terminal last), ascending node id as the stable sub-order.
    std::vector<int> by_pos(static_cast<std::size_t>(n));
    std::iota(by_pos.begin(), by_pos.end(), 0);
    std::stable_sort(by_pos.begin(), by_pos.end(), [&](int a, int b) {
        if (ord[static_cast<std::size_t>(a)] != ord[static_cast<std::size_t>(b)])
            return ord[static_cast<std::size_t>(a)] > ord[static_cast<std::size_t>(b)];
        return a < b;
    });

    for (int v : by_pos) {
        mcg.order.push_back(v);
        mcg.labels.push_back(dag.labels.at(static_cast<std::size_t>(v)));
    }
    if (mcg.added_terminal) {
        mcg.order.push_back(-1);
        mcg.labels.push_back("terminal");
    }
    return mcg;
}

long long proxy_count(long long d, int c) {
    if (c < 2) throw std::invalid_argument("proxy_count: bound must be at least 2");
    if (d < 2) return 0;
    return (d - 2) / (c - 1);
}

long long Bmcg::edge_total() const {
    long long total = 0;
    for (const auto& in : in_edges) total += static_cast<long long>(in.size());
    return total;
}

namespace {

void bmcg_add_edge(Bmcg& b, int from, int to) {
    b.in_edges[static_cast<std::size_t>(to)].push_back(from);
    b.out_edges[static_cast<std::size_t>(from)].push_back(to);
}

// Reduces the dependency list bottom-up, grouping C inputs per proxy per
// level, until at most C feed the target node.
void attach_with_proxies(Bmcg& b, int target, std::vector<int> level, int c) {
    while (static_cast<int>(level.size()) > c) {
        std::vector<int> next;
        std::size_t full = level.size() / static_cast<std::size_t>(c);
        for (std::size_t k = 0; k < full; ++k) {
            int proxy = b.size();
            b.nodes.push_back(Bmcg::Node{Bmcg::Kind::proxy, target});
            b.in_edges.emplace_back();
            b.out_edges.emplace_back();
            for (std::size_t j = 0; j < static_cast<std::size_t>(c); ++j)
                bmcg_add_edge(b, level[k * static_cast<std::size_t>(c) + j], proxy);
            next.push_back(proxy);
        }
        for (std::size_t j = full * static_cast<std::size_t>(c); j < level.size(); ++j)
            next.push_back(level[j]);
        level = std::move(next);
    }
    for (int src : level) bmcg_add_edge(b, src, target);
}

} // namespace

Bmcg bmcg_from_mcg(const Mcg& mcg, int c) {
    if (c < 2) throw std::invalid_argument("bmcg: bound must be at least 2");
    const int n = mcg.size();

    Bmcg b;
    b.bound = c;
    b.original_count = n;
    b.nodes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        b.nodes[static_cast<std::size_t>(i)].kind =
            (mcg.order[static_cast<std::size_t>(i)] == -1) ? Bmcg::Kind::terminal
                                                           : Bmcg::Kind::original;
        b.nodes[static_cast<std::size_t>(i)].owner = i;
    }
    b.in_edges.resize(static_cast<std::size_t>(n));
    b.out_edges.resize(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        std::vector<int> level(static_cast<std::size_t>(i));
        std::iota(level.begin(), level.end(), 0);
        attach_with_proxies(b, i, std::move(level), c);
    }
    return b;
}

Bmcg bound_dag(const Dag& dag, int c) {
    if (c < 2) throw std::invalid_argument("bound_dag: bound must be at least 2");
    const int n = dag.size();
    Bmcg b;
    b.bound = c;
    b.original_count = n;
    b.nodes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) b.nodes[static_cast<std::size_t>(i)] = {Bmcg::Kind::original, i};
    b.in_edges.resize(static_cast<std::size_t>(n));
    b.out_edges.resize(static_cast<std::size_t>(n));

    std::vector<std::vector<int>> deps(static_cast<std::size_t>(n));
    for (auto [u, v] : dag.edges) deps[static_cast<std::size_t>(v)].push_back(u);
    for (int i = 0; i < n; ++i) attach_with_proxies(b, i, deps[static_cast<std::size_t>(i)], c);
    return b;
}

ProxyTotals total_proxy_count(long long n, int c) {
    if (n < 1) throw std::invalid_argument("total_proxy_count: N must be positive");
    if (c < 2) throw std::invalid_argument("total_proxy_count: bound must be at least 2");
    ProxyTotals t;
    for (long long d = 0; d < n; ++d) t.brute_sum += proxy_count(d, c);
    const long long k = n >= 3 ? (n - 3) / (c - 1) : 0;
    t.closed_form = k * (n - 2) - (c - 1) * (k * (k + 1) / 2);
    return t;
}

std::vector<long long> proxy_weights(const Bmcg& b, bool concatenation) {
    std::vector<long long> w(static_cast<std::size_t>(b.size()), 1);
    if (!concatenation) return w;
    // Proxies are appended after their inputs, so one forward pass
    // accumulates the original-input counts bottom-up.
    for (int v = 0; v < b.size(); ++v) {
        if (b.nodes[static_cast<std::size_t>(v)].kind != Bmcg::Kind::proxy) continue;
        long long total = 0;
        for (int u : b.in_edges[static_cast<std::size_t>(v)])
            total += b.nodes[static_cast<std::size_t>(u)].kind == Bmcg::Kind::proxy
                         ? w[static_cast<std::size_t>(u)]
                         : 1;
        w[static_cast<std::size_t>(v)] = total;
    }
    return w;
}

std::vector<std::string> validate_bmcg(const Bmcg& b, const Mcg& mcg, int c) {
    std::vector<std::string> diags;
    const int n = mcg.size();

    for (int v = 0; v < b.size(); ++v)
        if (b.in_degree(v) > c)
            diags.push_back("node " + std::to_string(v) + " has in-degree " +
                            std::to_string(b.in_degree(v)) + " > " + std::to_string(c));

    // Contracting each proxy tree must recover the full MCG dependency
    // relation: exactly the pairs (j, i) with j < i, each exactly once.
    std::set<std::pair<int, int>> contracted;
    bool dup = false;
    for (int v = 0; v < b.size(); ++v) {
        int dst_owner = b.nodes[static_cast<std::size_t>(v)].owner;
        for (int src : b.in_edges[static_cast<std::size_t>(v)]) {
            int src_owner = b.nodes[static_cast<std::size_t>(src)].owner;
            if (src_owner == dst_owner && b.nodes[static_cast<std::size_t>(src)].kind == Bmcg::Kind::proxy)
                continue; // internal proxy edge
            if (!contracted.insert({src_owner, dst_owner}).second) dup = true;
        }
    }
    if (dup) diags.push_back("a dependency reaches its target through two paths");
    long long expected = static_cast<long long>(n) * (n - 1) / 2;
    if (static_cast<long long>(contracted.size()) != expected)
        diags.push_back("contraction yields " + std::to_string(contracted.size()) +
                        " dependencies, expected " + std::to_string(expected));
    else
        for (auto [j, i] : contracted)
            if (!(j < i)) {
                diags.push_back("cont({" + std::to_string(j) + "," + std::to_string(i) +
                                "}) violates the execution order");
                break;
            }

    const long long nplus = total_proxy_count(n, c).brute_sum;
    if (b.size() != n + nplus)
        diags.push_back("node count " + std::to_string(b.size()) + " != N + N+ = " +
                        std::to_string(n + nplus));
    return diags;
}

} // namespace qg
