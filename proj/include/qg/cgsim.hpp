/* cgsim.hpp -- simulating bounded computation graphs under each machine
 * class with exact operation counting
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <qg/compgraph.hpp>
#include <qg/core.hpp>
#include <qg/qdp.hpp>
#include <qg/reference.hpp>

namespace qg {

struct OpCounter {
    long long discover = 0;
    long long respond_move = 0;
    long long retrieve_raw = 0;
    double retrieve_weighted = 0; // log2(max(2, active references)) per retrieve

    long long raw_total() const { return discover + respond_move + retrieve_raw; }
    double weighted_total() const {
        return static_cast<double>(discover + respond_move) + retrieve_weighted;
    }
};

struct SimReport {
    std::string variant;
    int n = 0; // original MCG node count
    int c = 0;
    OpCounter ops;
    bool halted = false;
    double wall_ms = 0;
    std::vector<long long> computes; // compute events per original node / BMCG node
};

/*
 * Unrestricted quest graph: the BMCG is pre-built as a quest graph and a
 * depth-first walk computes every node once, descending into incomplete
 * dependencies and backtracking through visiting marks.
 */
SimReport sim_questgraph(const Bmcg& b);

// Memoized depth-first traversal over the full MCG: one reference per
// node, one retrieve per dependency edge, recursion on empty retrieves.
SimReport sim_rqdp(const Mcg& mcg, int c);

// Same traversal over an explicit dependency list (deps[v] = nodes v needs,
// all indices below v); the last node is the root.
SimReport sim_rqdp(const std::vector<std::vector<int>>& deps, int c);

// Re-computation recursion (no references): exponential, guarded by the
// node cap.
SimReport sim_fqdp(const Bmcg& b, int n_cap = 16);

struct SBounds {
    long long lower = 0; // 2^(N-1)
    long long upper = 0; // 2^N - 1
};

// Evaluates the bracketing recurrences and checks them against the closed
// forms; throws when they disagree.
SBounds s_bounds(int n);

struct LmWitness {
    std::optional<int> witness_n;                // first N whose live set exceeds C
    std::vector<std::pair<int, int>> live_by_n;  // (N, max simultaneously live intermediates)
};

/*
 * Linear-window evaluation of the most-dependent node's proxy tree: counts
 * the maximum number of simultaneously live intermediate results in a
 * left-to-right post-order pass and reports the first N in the sweep where
 * it exceeds the window capacity.
 */
LmWitness lm_window_witness(const std::vector<int>& n_sweep, int c);

struct GrowthFit {
    double slope = 0;    // least-squares slope on log N vs log weighted cost
    double residual = 0; // root-mean-square residual
    bool superpolynomial = false;
};

GrowthFit growth_fit(const std::vector<SimReport>& reports);

} // namespace qg
