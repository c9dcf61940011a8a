/* reference.cpp -- reference graph and the RQDP engine wiring
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/reference.hpp>

#include <cmath>
#include <stdexcept>

namespace qg {

void ReferenceGraph::record(Reference r, const Value& v, int time) {
    if (time <= last_update_)
        throw std::invalid_argument("reference graph timestamps must strictly increase");
    last_update_ = time;
    auto& e = entries_[r];
    e.response = v;
    e.updated_at = time;
}

Reference assign_reference(ReferenceGraph& refs, Reference parent_ref, const Goal& goal,
                           const TauFn& tau) {
    Reference r = tau(parent_ref, goal);
    refs.ensure(r);
    return r;
}

void record_response(ReferenceGraph& refs, Reference ref, const Value& response, int time) {
    refs.record(ref, response, time);
}

Response retrieve(const ReferenceGraph& refs, Reference ref) {
    const RefEntry* e = refs.entry(ref);
    if (!e) return std::nullopt;
    return e->response;
}

RqdpRunResult rqdp_run(const Goal& root_goal, Reference root_ref, const QdpAgent& agent,
                       const TauFn& tau, const FqdpConfig& cfg, const InputProvider& provider,
                       long budget) {
    RqdpRunResult out;
    out.node_refs.push_back(root_ref);
    out.refs.ensure(root_ref);
    out.refs.set_head(root_ref);

    QdpHooks hooks;
    hooks.on_create = [&](NodeId parent, NodeId fresh, const Goal& goal) {
        Reference r = assign_reference(out.refs, out.node_refs.at(static_cast<std::size_t>(parent)),
                                       goal, tau);
        if (fresh != static_cast<NodeId>(out.node_refs.size()))
            throw std::logic_error("node creation out of order");
        out.node_refs.push_back(r);
    };
    hooks.on_respond = [&](NodeId id, const Value& v, int clock) {
        if (marks::is_mark(v)) return; // control marks are not data
        out.refs.record(out.node_refs.at(static_cast<std::size_t>(id)), v, clock);
    };
    hooks.on_retrieve = [&](NodeId fresh) {
        out.retrieve_weighted += std::log2(std::max(2, out.refs.size()));
        return retrieve(out.refs, out.node_refs.at(static_cast<std::size_t>(fresh)));
    };
    hooks.on_focus = [&](NodeId id) {
        out.refs.set_head(out.node_refs.at(static_cast<std::size_t>(id)));
    };

    QuestGraph g({{root_goal, std::nullopt}}, {}, 0);
    out.run = qdp_run(QdpVariant::rqdp, std::move(g), QuestTree(0), agent, cfg, provider, budget,
                      hooks);
    return out;
}

} // namespace qg
