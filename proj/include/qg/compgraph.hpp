/* compgraph.hpp -- computation-graph transforms: DAG -> MCG (total
 * dependency order) -> BMCG (proxy-tree decomposition under an in-degree
 * bound), with closed-form count verification
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qg {

// Directed acyclic graph; an edge (u, v) makes u a dependency of v.
struct Dag {
    std::vector<std::string> labels;
    std::vector<std::pair<int, int>> edges;

    int size() const { return static_cast<int>(labels.size()); }
};

struct CycleError {
    int from = 0, to = 0; // the offending back edge
};

/*
 * Maximum-dependency computation graph: nodes in a total execution order
 * where the node at position i depends on every position j < i; the full
 * edge set is implicit. order[i] is the original DAG node at position i,
 * or -1 for the added unified terminal.
 */
struct Mcg {
    std::vector<int> order;
    std::vector<std::string> labels; // per execution position
    bool added_terminal = false;

    int size() const { return static_cast<int>(order.size()); }
    long long edge_count() const {
        const long long n = size();
        return n * (n - 1) / 2;
    }
};

// Throws CycleError when the input is not acyclic.
Mcg mcg_from_dag(const Dag& dag);

// Number of proxy nodes needed for one node of in-degree d under bound C.
long long proxy_count(long long d, int c);

struct Bmcg {
    enum class Kind { original, proxy, terminal };

    struct Node {
        Kind kind = Kind::original;
        int owner = 0; // MCG position whose dependency tree the node serves
    };

    std::vector<Node> nodes;                   // positions 0..N-1 are the MCG originals
    std::vector<std::vector<int>> in_edges;    // dependencies per node
    std::vector<std::vector<int>> out_edges;   // dependents per node
    int bound = 2;
    int original_count = 0;

    int size() const { return static_cast<int>(nodes.size()); }
    long long edge_total() const;
    int in_degree(int v) const { return static_cast<int>(in_edges.at(static_cast<std::size_t>(v)).size()); }
};

// Decomposes every in-degree above C into a balanced k-ary proxy tree
// (bottom-up grouping of C inputs per proxy).
Bmcg bmcg_from_mcg(const Mcg& mcg, int c);

// Same decomposition over a raw DAG's own in-degrees, without the MCG
// completion. The contraction checks of validate_bmcg do not apply here.
Bmcg bound_dag(const Dag& dag, int c);

struct ProxyTotals {
    long long closed_form = 0;
    long long brute_sum = 0;
};

// Total proxies added over an N-node MCG, via the closed form and via
// direct summation of proxy_count; callers assert the two agree.
ProxyTotals total_proxy_count(long long n, int c);

// Empty iff the in-degree bound holds, proxy-tree contraction recovers the
// MCG dependency relation, and the node count is exactly N + N+.
std::vector<std::string> validate_bmcg(const Bmcg& b, const Mcg& mcg, int c);

/*
 * Per-node payload-size weights for the response-size model: constant 1
 * for every node by default; under the concatenation model each proxy
 * carries the number of original inputs aggregated beneath it (the
 * non-compressible case).
 */
std::vector<long long> proxy_weights(const Bmcg& b, bool concatenation);

} // namespace qg
