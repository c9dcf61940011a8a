/* reference.hpp -- the RQDP reference mechanism: tau-generated references,
 * a reference graph storing the latest response per reference, retrieval
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <qg/qdp.hpp>

namespace qg {

// References are drawn from a countable set with equality; every
// construction here uses integers (the TM simulation reads them as tape
// positions). The ordered map backing gives retrieval its logarithmic cost.
using Reference = std::int64_t;

// Deterministic reference-generating function: (parent reference, goal of
// the new node) -> reference of the new node.
using TauFn = std::function<Reference(Reference, const Goal&)>;

struct RefEntry {
    Response response;
    int updated_at = -1;
};

class ReferenceGraph {
public:
    Reference head() const { return head_; }
    void set_head(Reference r) { head_ = r; }

    bool contains(Reference r) const { return entries_.count(r) > 0; }
    const RefEntry* entry(Reference r) const {
        auto it = entries_.find(r);
        return it == entries_.end() ? nullptr : &it->second;
    }
    int size() const { return static_cast<int>(entries_.size()); }
    int last_update() const { return last_update_; }
    const std::map<Reference, RefEntry>& entries() const { return entries_; }

    void ensure(Reference r) { entries_.try_emplace(r); } // epsilon-initialized
    void record(Reference r, const Value& v, int time);

private:
    std::map<Reference, RefEntry> entries_;
    Reference head_ = 0;
    int last_update_ = -1;
};

// Applies tau and registers the reference (with an empty response) when it
// is new. Pure apart from that registration.
Reference assign_reference(ReferenceGraph& refs, Reference parent_ref, const Goal& goal,
                           const TauFn& tau);

// Overwrites the entry's response and timestamp. Throws on non-monotonic
// time.
void record_response(ReferenceGraph& refs, Reference ref, const Value& response, int time);

// Latest response recorded under the reference; the empty response when
// nothing was ever written there.
Response retrieve(const ReferenceGraph& refs, Reference ref);

struct RqdpRunResult {
    QdpRunResult run;
    ReferenceGraph refs;
    std::vector<Reference> node_refs; // by node id
    double retrieve_weighted = 0;     // sum of log2(max(2, active refs)) per retrieve
};

/*
 * FQDP engine plus the retrieve action. Every fresh node gets a reference
 * via tau; every data response (marks excluded) updates the reference
 * graph; the graph's head tracks the focus node's reference.
 */
RqdpRunResult rqdp_run(const Goal& root_goal, Reference root_ref, const QdpAgent& agent,
                       const TauFn& tau, const FqdpConfig& cfg, const InputProvider& provider,
                       long budget);

} // namespace qg
