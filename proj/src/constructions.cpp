/* constructions.cpp -- the machine constructions and their conformance
 * harnesses
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/constructions.hpp>

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace qg {

// ===========================================================================
// TM on the unrestricted quest graph
// ===========================================================================

Value cell_response(const std::string& state, const std::string& symbol, Dir d) {
    return val("cell", {state, symbol, std::string(1, dir_char(d))});
}

namespace {

struct CellView {
    std::string state;
    std::string symbol;
    char dir = 0;
};

std::optional<CellView> cell_of(const Response& r) {
    if (!r || r->tag != "cell" || r->fields.size() != 3) return std::nullopt;
    return CellView{r->fields[0], r->fields[1], r->fields[2].empty() ? '?' : r->fields[2][0]};
}

char opposite(char d) { return d == 'L' ? 'R' : 'L'; }

} // namespace

QuestGraph build_tm_tape_graph(const TuringMachine& tm, const std::vector<std::string>& input) {
    std::vector<std::string> cells = input;
    if (cells.empty()) cells.push_back(tm.blank);

    std::vector<std::pair<Goal, Response>> seed;
    // Planted left neighbor of the head carries the start state and points
    // inward (R); the head cell and everything right of it point L.
    seed.push_back({val("tape"), cell_response(tm.start, tm.blank, Dir::R)});
    for (const auto& c : cells) seed.push_back({val("tape"), cell_response("", c, Dir::L)});

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < static_cast<int>(seed.size()); ++i) edges.push_back({i, i + 1});
    return QuestGraph(std::move(seed), edges, 1);
}

AgentFn tm_questgraph_agent(const TuringMachine& tm) {
    return [tm](const LocalContext& ctx) -> AgentAction {
        auto focus = cell_of(ctx.focus.response);
        if (!focus) return StopAction{}; // not a tape context; surfaces as a bug in tests

        if (ctx.neighbors.size() == 1) {
            // Tape end: extend with a boundary marker on the missing side.
            auto n = cell_of(ctx.neighbors[0].response);
            if (!n) return StopAction{};
            Dir d = opposite(n->dir) == 'L' ? Dir::L : Dir::R;
            return DiscoverAction{val("tape"), cell_response("", "", d), {0}};
        }
        if (ctx.neighbors.size() != 2) return StopAction{};

        auto n1 = cell_of(ctx.neighbors[0].response);
        auto n2 = cell_of(ctx.neighbors[1].response);
        if (!n1 || !n2 || n1->dir == n2->dir) return StopAction{}; // direction invariant broken

        // The previous cell is the neighbor whose direction opposes the
        // focus direction; it holds the machine state.
        std::size_t prev_slot = n1->dir == opposite(focus->dir) ? 1 : 2;
        const CellView& prev = prev_slot == 1 ? *n1 : *n2;
        if (tm.accepting.count(prev.state)) return StopAction{};

        const std::string symbol = focus->symbol.empty() ? tm.blank : focus->symbol;
        auto it = tm.delta.find({prev.state, symbol});
        if (it == tm.delta.end()) return StopAction{}; // state field was garbage: bug
        const TmRule& rule = it->second;

        // Moving right lands on the L-marked neighbor and vice versa.
        char target_dir = opposite(dir_char(rule.move));
        std::size_t move_slot = n1->dir == target_dir ? 1 : 2;
        return RespondMoveAction{cell_response(rule.next_state, rule.write, rule.move), move_slot};
    };
}

TmQgConformance simulate_tm_on_questgraph(const TuringMachine& tm,
                                          const std::vector<std::string>& input, long budget) {
    TmQgConformance res;
    TmResult oracle = tm_run(tm, input, budget);
    res.oracle_outcome = oracle.outcome;
    res.oracle_tape = oracle.tape;

    QuestGraph g = build_tm_tape_graph(tm, input);
    AgentFn agent = tm_questgraph_agent(tm);

    // Position bookkeeping: node id -> tape position (the planted state
    // carrier sits at -1).
    std::vector<long> pos(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) pos[static_cast<std::size_t>(i)] = i - 1;

    const long action_budget = 2 * budget + static_cast<long>(input.size()) + 16;
    bool done = false;
    for (long step = 0; step < action_budget && !done; ++step) {
        LocalContext ctx = observe(g, 2);
        const NodeId focus_id = ctx.focus.id;

        // Invariant checks before the action: degree and direction pattern.
        for (int v = 0; v < g.size(); ++v)
            if (g.degree(v) > 2) res.degree_invariant = false;
        if (ctx.neighbors.size() == 2) {
            auto f = cell_of(ctx.focus.response);
            auto a = cell_of(ctx.neighbors[0].response);
            auto b = cell_of(ctx.neighbors[1].response);
            if (f && a && b) {
                const CellView& left = pos[static_cast<std::size_t>(ctx.neighbors[0].id)] <
                                               pos[static_cast<std::size_t>(ctx.neighbors[1].id)]
                                           ? *a
                                           : *b;
                const CellView& right = pos[static_cast<std::size_t>(ctx.neighbors[0].id)] <
                                                pos[static_cast<std::size_t>(ctx.neighbors[1].id)]
                                            ? *b
                                            : *a;
                if (!(left.dir == 'R' && right.dir == 'L')) res.direction_invariant = false;
            }
        }

        AgentAction action = agent(ctx);
        res.trace.push_back(
            TraceEvent{static_cast<int>(step), focus_id, context_digest(ctx), action});
        ++res.sim_actions;
        if (std::holds_alternative<RespondMoveAction>(action)) ++res.tm_steps;
        StepOutcome out = apply(g, action, ctx);
        if (out.status == StepStatus::illegal) {
            res.illegal = true;
            break;
        }
        if (const auto* d = std::get_if<DiscoverAction>(&action)) {
            auto marker = cell_of(d->initial_response);
            long p = pos[static_cast<std::size_t>(focus_id)] + (marker && marker->dir == 'L' ? 1 : -1);
            pos.push_back(p);
        }
        if (out.status == StepStatus::stopped) {
            res.sim_outcome = TmOutcome::accepted;
            done = true;
            break;
        }
        if (g.focus() != focus_id && pos[static_cast<std::size_t>(g.focus())] < 0) {
            res.sim_outcome = TmOutcome::rejected; // fell off the left end
            done = true;
        }
    }

    // Read the final tape off the chain by position.
    long max_pos = 0;
    for (int v = 0; v < g.size(); ++v) max_pos = std::max(max_pos, pos[static_cast<std::size_t>(v)]);
    std::vector<std::string> tape(static_cast<std::size_t>(max_pos) + 1, tm.blank);
    for (int v = 0; v < g.size(); ++v) {
        long p = pos[static_cast<std::size_t>(v)];
        if (p < 0) continue;
        auto c = cell_of(g.node(v).response);
        if (c && !c->symbol.empty()) tape[static_cast<std::size_t>(p)] = c->symbol;
    }
    while (tape.size() > 1 && tape.back() == tm.blank) tape.pop_back();
    res.sim_tape = std::move(tape);

    res.comparable = res.sim_outcome != TmOutcome::budget_exhausted &&
                     res.oracle_outcome != TmOutcome::budget_exhausted && !res.illegal;
    res.agree = res.comparable && res.sim_outcome == res.oracle_outcome &&
                res.sim_tape == res.oracle_tape;
    res.graph = std::move(g);
    return res;
}

// ===========================================================================
// DPDA on FQDP
// ===========================================================================

namespace {

std::optional<std::string> state_of(const Response& r) {
    if (!r || r->tag != "st" || r->fields.size() != 1) return std::nullopt;
    return r->fields[0];
}

std::optional<std::string> symbol_of(const Response& r) {
    if (!r || r->tag != "sym" || r->fields.size() != 1) return std::nullopt;
    return r->fields[0];
}

bool dpda_accepts_here(const Dpda& d, const std::string& state, bool stack_empty) {
    const bool by_state = d.accepting.count(state) > 0;
    switch (d.acceptance) {
    case DpdaAcceptance::final_state: return by_state;
    case DpdaAcceptance::empty_stack: return stack_empty;
    case DpdaAcceptance::either: return by_state || stack_empty;
    }
    return false;
}

} // namespace

InputProvider string_input_provider(std::vector<std::string> input,
                                    std::shared_ptr<std::size_t> cursor) {
    if (!cursor) cursor = std::make_shared<std::size_t>(0);
    return [input = std::move(input), cursor](const Goal&) -> Response {
        if (*cursor >= input.size()) return std::nullopt; // end marker
        return val("sym", {input[(*cursor)++]});
    };
}

QdpAgent fqdp_dpda_agent(const Dpda& d) {
    return [d](const QdpContext& ctx) -> QdpAction {
        const QdpNodeView& f = ctx.focus;

        // Terminal sweep and final stop.
        if (f.response && (*f.response == marks::terminal() || *f.response == marks::rejected()))
            return QdpStop{};
        const QdpNodeView* last = ctx.last_child();
        if (last && last->response && *last->response == marks::terminal())
            return CompleteQuest{marks::terminal()};
        if (last && last->response && *last->response == marks::rejected())
            return CompleteQuest{marks::rejected()};

        // Root completed by a pop: the stack is empty. Probe the input to
        // decide between acceptance and a dangling-input rejection.
        if (auto s_done = state_of(f.response)) {
            if (!ctx.is_root) return QdpStop{}; // unreachable; fail loudly in tests
            if (!last || last->goal.tag != "i")
                return DiscoverInput{val("i")};
            if (symbol_of(last->response)) return CompleteQuest{marks::rejected()};
            bool ok = d.acceptance == DpdaAcceptance::final_state
                          ? d.accepting.count(*s_done) > 0
                          : true; // stack empty and input consumed
            return CompleteQuest{ok ? marks::terminal() : marks::rejected()};
        }

        const std::string& tag = f.goal.tag;
        if (tag != "q" && tag != "q'") return QdpStop{};
        const std::string top = f.goal.field(0);
        const std::string state = f.goal.field(1);

        auto apply_rule = [&](const DpdaRule& rule) -> QdpAction {
            if (std::holds_alternative<StackPush>(rule.op))
                return DiscoverSubquest{val("q", {std::get<StackPush>(rule.op).symbol, rule.next_state})};
            if (std::holds_alternative<StackPop>(rule.op))
                return CompleteQuest{val("st", {rule.next_state})};
            return DiscoverSubquest{val("q'", {top, rule.next_state})}; // stay: re-encode in a replica
        };

        if (!last || last->goal.tag == "i" || last->goal.tag == "q" || last->goal.tag == "q'") {
            if (!last) {
                if (const DpdaRule* eps = d.rule_for(state, "", top)) return apply_rule(*eps);
                return DiscoverInput{val("i")};
            }
            if (last->goal.tag == "i") {
                if (auto a = symbol_of(last->response)) {
                    if (const DpdaRule* rule = d.rule_for(state, *a, top)) return apply_rule(*rule);
                    return CompleteQuest{marks::rejected()}; // jammed
                }
                // End of input at a live node: evaluate acceptance here.
                bool ok = dpda_accepts_here(d, state, false);
                return CompleteQuest{ok ? marks::terminal() : marks::rejected()};
            }
            if (last->goal.tag == "q") {
                // A pushed sub-quest returned: re-encode the state with our
                // own stack symbol in a replica.
                auto s = state_of(last->response);
                if (!s) return QdpStop{};
                return DiscoverSubquest{val("q'", {top, *s})};
            }
            // Replica returned: the stack symbol it carried was popped.
            auto s = state_of(last->response);
            if (!s) return QdpStop{};
            return CompleteQuest{val("st", {*s})};
        }
        return QdpStop{};
    };
}

DpdaSimResult simulate_dpda_on_fqdp(const Dpda& d, const std::vector<std::string>& input,
                                    long budget) {
    DpdaSimResult res;
    auto cursor = std::make_shared<std::size_t>(0);
    InputProvider provider = string_input_provider(input, cursor);
    std::vector<std::string> reads;
    InputProvider recording = [&](const Goal& g) {
        Response r = provider(g);
        if (r) reads.push_back(r->fields[0]);
        return r;
    };

    QdpAgent inner = fqdp_dpda_agent(d);
    int max_deg = 0;
    QdpAgent agent = [&](const QdpContext& ctx) {
        max_deg = std::max(max_deg, ctx.child_count + (ctx.parent ? 1 : 0));
        return inner(ctx);
    };

    // Inner nodes use at most three child slots (input, sub-quest,
    // replica); the root additionally probes the input after an
    // empty-stack completion. Its degree still stays within four.
    FqdpConfig cfg{4, 4};
    res.run = fqdp_run(val("q", {d.initial_stack_symbol, d.start}), agent, cfg, recording, budget);
    res.max_focus_degree = max_deg;
    res.consumed = std::move(reads);
    res.illegal = res.run.reason == HaltReason::illegal_action;
    res.budget_hit = res.run.reason == HaltReason::budget_exhausted;
    const Response& root = res.run.graph.node(res.run.tree.root()).response;
    res.accepted = res.run.reason == HaltReason::stopped && root && *root == marks::terminal();
    return res;
}

// ===========================================================================
// FQDP -> DPDA
// ===========================================================================

namespace {

// Minimal synthesized context: focus plus the completed-children window,
// which is all the interned transition rules need.
struct SynthCtx {
    QdpNodeView focus;
    std::vector<QdpNodeView> children;
    bool is_root = false;

    std::string digest() const {
        std::string s = focus.goal.str() + "/" + response_str(focus.response);
        for (const auto& c : children) s += "|" + c.goal.str() + "/" + response_str(c.response);
        s += is_root ? "/root" : "/sub";
        return s;
    }
};

QdpContext to_qdp_context(const SynthCtx& c, const std::optional<QdpNodeView>& parent) {
    QdpContext ctx;
    ctx.focus = c.focus;
    ctx.children = c.children;
    ctx.child_count = static_cast<int>(c.children.size());
    ctx.is_root = c.is_root;
    ctx.parent = parent;
    return ctx;
}

void push_child(SynthCtx& c, QdpNodeView child, int window) {
    c.children.push_back(std::move(child));
    while (static_cast<int>(c.children.size()) > window) c.children.erase(c.children.begin());
}

} // namespace

FqdpToDpda dpda_from_fqdp(const QdpAgent& agent, const Goal& root_goal, const FqdpConfig& cfg,
                          const std::vector<std::string>& alphabet, int max_contexts) {
    FqdpToDpda out;
    Dpda& m = out.machine;
    m.name = "from-fqdp";
    m.input_alphabet.insert(alphabet.begin(), alphabet.end());
    m.acceptance = DpdaAcceptance::final_state;
    m.initial_stack_symbol = "Z0";
    m.stack_alphabet.insert("Z0");

    const int window = std::max(0, cfg.capacity - 1);
    std::map<std::string, SynthCtx> ctx_of;     // state name -> context
    std::map<std::string, std::string> name_of; // digest -> state name
    auto intern = [&](const SynthCtx& c) {
        auto it = name_of.find(c.digest());
        if (it != name_of.end()) return it->second;
        std::string name = "c" + std::to_string(name_of.size());
        name_of[c.digest()] = name;
        ctx_of[name] = c;
        m.states.insert(name);
        return name;
    };

    // Accepting iff the end-of-input closure stops cleanly without stack
    // operations (root-local responds only).
    auto end_accepts = [&](SynthCtx c) {
        push_child(c, QdpNodeView{0, val("i"), std::nullopt, false}, window);
        for (int hops = 0; hops < 16; ++hops) {
            QdpAction a = agent(to_qdp_context(c, std::nullopt));
            if (std::holds_alternative<QdpStop>(a)) return c.is_root;
            if (const auto* cq = std::get_if<CompleteQuest>(&a)) {
                if (!c.is_root) return false; // popping after the input is out of scope here
                c.focus.response = cq->response;
                c.focus.complete = qdp_complete(c.focus.response);
                continue;
            }
            return false;
        }
        return false;
    };

    SynthCtx root;
    root.focus = QdpNodeView{0, root_goal, std::nullopt, false};
    root.is_root = true;
    const std::string start = intern(root);
    m.start = start;

    // Worklist of (state, stack top) configurations. States reached by a
    // pop can resume under any symbol pushed before or after they were
    // discovered, so pair them with every stack symbol as either side grows.
    std::set<std::pair<std::string, std::string>> seen;
    std::deque<std::pair<std::string, std::string>> work;
    std::set<std::string> resume_states;
    work.push_back({start, "Z0"});
    seen.insert(work.back());

    auto enqueue = [&](const std::string& state, const std::string& top) {
        if (seen.insert({state, top}).second) work.push_back({state, top});
    };
    auto enqueue_resume = [&](const std::string& state) {
        if (resume_states.insert(state).second)
            for (const auto& z : m.stack_alphabet) enqueue(state, z);
    };
    auto intern_stack_symbol = [&](const std::string& z) {
        if (m.stack_alphabet.insert(z).second)
            for (const auto& rs : resume_states) enqueue(rs, z);
    };

    while (!work.empty()) {
        if (static_cast<int>(m.states.size()) > max_contexts) {
            out.complete = false;
            out.diagnostic = "context budget exhausted";
            break;
        }
        auto [sname, top] = work.front();
        work.pop_front();
        SynthCtx c = ctx_of.at(sname);
        std::optional<QdpNodeView> parent;
        if (!c.is_root && ctx_of.count(top)) parent = ctx_of.at(top).focus;
        QdpAction a = agent(to_qdp_context(c, parent));

        if (const auto* di = std::get_if<DiscoverInput>(&a)) {
            if (end_accepts(c)) m.accepting.insert(sname);
            for (const auto& sym : alphabet) {
                SynthCtx c2 = c;
                push_child(c2, QdpNodeView{0, di->goal, val("sym", {sym}), true}, window);
                std::string nxt = intern(c2);
                m.rules.push_back({sname, sym, top, nxt, StackStay{}});
                enqueue(nxt, top);
            }
        } else if (const auto* ds = std::get_if<DiscoverSubquest>(&a)) {
            SynthCtx parent_ctx = c;
            parent_ctx.focus.response = marks::parent();
            parent_ctx.focus.complete = false;
            std::string pushed = intern(parent_ctx);
            intern_stack_symbol(pushed);
            SynthCtx child;
            child.focus = QdpNodeView{0, ds->goal, std::nullopt, false};
            child.is_root = false;
            std::string nxt = intern(child);
            m.rules.push_back({sname, "", top, nxt, StackPush{pushed}});
            enqueue(nxt, pushed);
        } else if (const auto* cq = std::get_if<CompleteQuest>(&a)) {
            if (c.is_root) {
                SynthCtx c2 = c;
                c2.focus.response = cq->response;
                c2.focus.complete = qdp_complete(c2.focus.response);
                std::string nxt = intern(c2);
                m.rules.push_back({sname, "", top, nxt, StackStay{}});
                enqueue(nxt, top);
            } else if (ctx_of.count(top)) {
                // Pop: resume the parent context with the completed child
                // appended.
                SynthCtx p = ctx_of.at(top);
                p.focus.response = std::nullopt; // the parent mark is cleared by the return
                push_child(p, QdpNodeView{0, c.focus.goal, cq->response, true}, window);
                std::string nxt = intern(p);
                m.rules.push_back({sname, "", top, nxt, StackPop{}});
                enqueue_resume(nxt);
            }
        } else if (std::holds_alternative<QdpStop>(a)) {
            if (c.is_root) m.accepting.insert(sname);
        }
    }
    return out;
}

// ===========================================================================
// CFL acceptance on NFQDP
// ===========================================================================

namespace {

// Enumerates every bracketing of [from, to) as a binary tree; each tree is
// appended into the description with production nodes over spans and
// input leaves underneath.
int add_parse_tree(TreeDesc& desc, std::vector<std::pair<int, int>>& spans,
                   const std::vector<std::string>& input, int parent, int from, int to) {
    int p = static_cast<int>(desc.nodes.size());
    desc.nodes.push_back({val("p"), std::nullopt});
    spans.push_back({from, to});
    desc.links.push_back({parent, p});
    if (to - from == 1) {
        int leaf = static_cast<int>(desc.nodes.size());
        desc.nodes.push_back({val("i"), val("sym", {input[static_cast<std::size_t>(from)]})});
        spans.push_back({from, to});
        desc.links.push_back({p, leaf});
        return p;
    }
    return p;
}

void expand_bracketing(TreeDesc& desc, std::vector<std::pair<int, int>>& spans,
                       const std::vector<std::string>& input, int node, int from, int to,
                       const std::vector<int>& splits, int& cursor) {
    if (to - from == 1) return;
    int split = splits[static_cast<std::size_t>(cursor++)];
    int left = add_parse_tree(desc, spans, input, node, from, split);
    expand_bracketing(desc, spans, input, left, from, split, splits, cursor);
    int right = add_parse_tree(desc, spans, input, node, split, to);
    expand_bracketing(desc, spans, input, right, split, to, splits, cursor);
}

// All split sequences (pre-order) describing bracketings of [from, to).
void enumerate_bracketings(int from, int to, std::vector<std::vector<int>>& out,
                           std::vector<int>& prefix) {
    if (to - from == 1) {
        out.push_back(prefix);
        return;
    }
    // A bracketing of the span is a split plus bracketings of both halves;
    // accumulate pre-order split sequences.
    std::vector<std::vector<int>> whole;
    for (int split = from + 1; split < to; ++split) {
        std::vector<std::vector<int>> lefts, rights;
        std::vector<int> empty;
        enumerate_bracketings(from, split, lefts, empty);
        enumerate_bracketings(split, to, rights, empty);
        for (const auto& l : lefts)
            for (const auto& r : rights) {
                std::vector<int> seq{split};
                seq.insert(seq.end(), l.begin(), l.end());
                seq.insert(seq.end(), r.begin(), r.end());
                whole.push_back(std::move(seq));
            }
    }
    for (auto& seq : whole) {
        std::vector<int> full = prefix;
        full.insert(full.end(), seq.begin(), seq.end());
        out.push_back(std::move(full));
    }
}

Value bool_response(bool b) { return val("bool", {b ? "true" : "false"}); }

Value set_response(const std::set<std::string>& s) {
    return val("set", std::vector<std::string>(s.begin(), s.end()));
}

} // namespace

std::vector<std::string> set_response_members(const Value& v) {
    if (v.tag != "set") return {};
    return v.fields;
}

ParseGraph build_parse_graph(const CnfGrammar& g, const std::vector<std::string>& input) {
    (void)g;
    ParseGraph pg{QuestGraph({{val("q"), std::nullopt}}, {}, 0), QuestTree(0), {}, 0};
    TreeDesc desc;
    std::vector<std::pair<int, int>> spans;
    const int n = static_cast<int>(input.size());

    desc.nodes.push_back({val("q"), std::nullopt});
    spans.push_back({0, n});
    desc.focus = 0;

    if (n > 0) {
        std::vector<std::vector<int>> bracketings;
        std::vector<int> prefix;
        enumerate_bracketings(0, n, bracketings, prefix);
        int chain = 0;
        for (std::size_t b = 0; b < bracketings.size(); ++b) {
            if (b > 0) {
                int q = static_cast<int>(desc.nodes.size());
                desc.nodes.push_back({val("q"), std::nullopt});
                spans.push_back({0, n});
                desc.links.push_back({chain, q});
                chain = q;
            }
            int root_p = add_parse_tree(desc, spans, input, chain, 0, n);
            int cursor = 0;
            expand_bracketing(desc, spans, input, root_p, 0, n, bracketings[b], cursor);
        }
        pg.root_count = static_cast<int>(bracketings.size());
    } else {
        pg.root_count = 1;
    }

    // prebuild re-orders parent-before-child; our construction already is,
    // so ids map one-to-one and the span table stays aligned.
    auto built = prebuild(desc);
    pg.graph = std::move(built.first);
    pg.tree = std::move(built.second);
    pg.spans = std::move(spans);
    return pg;
}

QdpAgent nfqdp_cfl_agent(const CnfGrammar& g) {
    return [g](const QdpContext& ctx) -> QdpAction {
        const QdpNodeView& f = ctx.focus;
        if (f.complete) return QdpStop{}; // legal only at the completed root

        if (f.goal.tag == "q") {
            // Children: the tree's production root, then possibly the next
            // quest node in the chain.
            for (std::size_t i = 0; i < ctx.children.size(); ++i)
                if (!ctx.children[i].complete) return Pursue{i};
            if (ctx.children.empty())
                return CompleteQuest{bool_response(g.allows_empty)}; // empty-input special case
            bool valid = false;
            for (const auto& c : ctx.children) {
                if (c.goal.tag == "p") {
                    for (const auto& nt : set_response_members(*c.response))
                        if (nt == g.start) valid = true;
                } else if (c.goal.tag == "q" && *c.response == bool_response(true)) {
                    valid = true;
                }
            }
            return CompleteQuest{bool_response(valid)};
        }

        if (f.goal.tag == "p") {
            for (std::size_t i = 0; i < ctx.children.size(); ++i)
                if (!ctx.children[i].complete) return Pursue{i};
            std::set<std::string> derive;
            if (ctx.children.size() == 1 && ctx.children[0].goal.tag == "i") {
                const std::string& t = ctx.children[0].response->fields[0];
                for (const auto& [a, term] : g.terminal_rules)
                    if (term == t) derive.insert(a);
            } else if (ctx.children.size() == 2) {
                auto left = set_response_members(*ctx.children[0].response);
                auto right = set_response_members(*ctx.children[1].response);
                for (const auto& [a, b, c] : g.binary_rules)
                    if (std::find(left.begin(), left.end(), b) != left.end() &&
                        std::find(right.begin(), right.end(), c) != right.end())
                        derive.insert(a);
            }
            return CompleteQuest{set_response(derive)};
        }
        return QdpStop{};
    };
}

CflSimResult simulate_cfl_on_nfqdp(const CnfGrammar& g, const std::vector<std::string>& input,
                                   long budget) {
    CflSimResult res;
    ParseGraph pg = build_parse_graph(g, input);
    res.spans = pg.spans;

    QdpAgent inner = nfqdp_cfl_agent(g);
    int max_deg = 0;
    QdpAgent agent = [&](const QdpContext& ctx) {
        max_deg = std::max(max_deg, ctx.child_count + (ctx.parent ? 1 : 0));
        return inner(ctx);
    };

    FqdpConfig cfg{4, 3};
    res.run = nfqdp_run(std::move(pg.graph), std::move(pg.tree), agent, cfg, {}, budget);
    res.max_focus_degree = max_deg;
    res.illegal = res.run.reason == HaltReason::illegal_action;
    res.budget_hit = res.run.reason == HaltReason::budget_exhausted;
    const Response& root = res.run.graph.node(res.run.tree.root()).response;
    res.accepted = res.run.reason == HaltReason::stopped && root && *root == bool_response(true);
    return res;
}

// ===========================================================================
// TM on RQDP
// ===========================================================================

namespace {

const std::string kInit = "#init";

Value pair_response(const std::string& state, const std::string& symbol) {
    return val("pr", {state, symbol});
}

std::optional<std::pair<std::string, std::string>> pair_of(const Response& r) {
    if (!r || r->tag != "pr" || r->fields.size() != 2) return std::nullopt;
    return std::make_pair(r->fields[0], r->fields[1]);
}

} // namespace

TauFn rqdp_tm_tau() {
    return [](Reference parent, const Goal& goal) {
        return goal.tag == "q" ? parent + 1 : parent;
    };
}

QdpAgent rqdp_tm_agent(const TuringMachine& tm) {
    return [tm](const QdpContext& ctx) -> QdpAction {
        const QdpNodeView& f = ctx.focus;
        const QdpNodeView* last = ctx.last_child();

        // Mark sweeps and final stop.
        if (f.response && (*f.response == marks::terminal() || *f.response == marks::rejected()))
            return QdpStop{};
        if (last && last->response && *last->response == marks::terminal())
            return CompleteQuest{marks::terminal()};
        if (last && last->response && *last->response == marks::rejected())
            return CompleteQuest{marks::rejected()};

        const std::string& tag = f.goal.tag;
        const std::string state = f.goal.field(0);
        const std::string own_symbol = f.goal.field(1);

        // Applies the machine transition for (s, t): rightward moves push a
        // write node, leftward moves complete the focus with the new pair.
        auto transition = [&](const std::string& s, const std::string& t) -> QdpAction {
            if (tm.accepting.count(s)) return CompleteQuest{marks::terminal()};
            auto it = tm.delta.find({s, t.empty() ? tm.blank : t});
            if (it == tm.delta.end()) return QdpStop{}; // bug: surfaces in conformance
            const TmRule& rule = it->second;
            if (rule.move == Dir::R)
                return DiscoverSubquest{val("w", {rule.next_state, rule.write})};
            return CompleteQuest{pair_response(rule.next_state, rule.write)};
        };
        // Leftward return through a completed write node: re-encode the
        // current state (from its response) and this cell's symbol (from
        // its goal) in a replica.
        auto replica_after_write = [&](const QdpNodeView& w) -> QdpAction {
            auto got = pair_of(w.response);
            if (!got) return QdpStop{};
            std::string s = got->first == kInit && ctx.is_root ? tm.start : got->first;
            return DiscoverSubquest{val("q'", {s, w.goal.field(1)})};
        };

        if (tag == "q") {
            if (state == kInit) {
                // Initialization: lay the input rightward, then walk back
                // to position zero completing each laid quest node.
                if (!last) return DiscoverInput{val("f", {kInit, ""})};
                if (last->goal.tag == "f") {
                    auto got = pair_of(last->response);
                    std::string t = got ? got->second : tm.blank;
                    if (got) return DiscoverSubquest{val("w", {kInit, t})}; // keep laying
                    if (ctx.is_root)
                        return DiscoverSubquest{val("q'", {tm.start, t})}; // empty input
                    return CompleteQuest{pair_response(kInit, t)}; // past the end: walk back
                }
                if (last->goal.tag == "w") {
                    if (ctx.is_root) return replica_after_write(*last); // main phase starts
                    // Re-record this cell's own symbol and keep popping.
                    return CompleteQuest{pair_response(kInit, last->goal.field(1))};
                }
                if (last->goal.tag == "q'") {
                    // Only the root owns a replica; its completion means the
                    // head moved left of position zero.
                    return CompleteQuest{marks::rejected()};
                }
                return QdpStop{};
            }
            // Main-phase quest node: fetch the cell symbol, then transition.
            if (!last) return Retrieve{val("f", {state, ""})};
            if (last->goal.tag == "f") {
                auto got = pair_of(last->response);
                return transition(state, got ? got->second : "");
            }
            if (last->goal.tag == "w") return replica_after_write(*last);
            if (last->goal.tag == "q'") return CompleteQuest{*last->response};
            return QdpStop{};
        }

        if (tag == "q'") {
            if (!last) {
                if (tm.accepting.count(state)) return CompleteQuest{marks::terminal()};
                return transition(state, own_symbol);
            }
            if (last->goal.tag == "w") return replica_after_write(*last);
            if (last->goal.tag == "q'") return CompleteQuest{*last->response};
            return QdpStop{};
        }

        if (tag == "w") {
            if (!last) return DiscoverSubquest{val("q", {state, ""})};
            if (last->goal.tag == "q") return CompleteQuest{*last->response};
            return QdpStop{};
        }
        return QdpStop{};
    };
}

RqdpTmResult simulate_tm_on_rqdp(const TuringMachine& tm, const std::vector<std::string>& input,
                                 long budget) {
    RqdpTmResult res;
    TmResult oracle = tm_run(tm, input, budget);
    res.oracle_outcome = oracle.outcome;
    res.oracle_tape = oracle.tape;

    auto cursor = std::make_shared<std::size_t>(0);
    InputProvider provider = [&, cursor](const Goal&) -> Response {
        if (*cursor >= input.size()) return std::nullopt;
        return pair_response("", input[(*cursor)++]);
    };

    QdpAgent inner = rqdp_tm_agent(tm);
    int max_deg = 0;
    std::vector<NodeId> delta_events; // focus id at every transition application
    QdpAgent agent = [&](const QdpContext& ctx) {
        max_deg = std::max(max_deg, ctx.child_count + (ctx.parent ? 1 : 0));
        const std::string s = ctx.focus.goal.field(0);
        if (s != kInit && !tm.accepting.count(s)) {
            const QdpNodeView* lc = ctx.last_child();
            const bool quest_fetched =
                ctx.focus.goal.tag == "q" && lc && lc->goal.tag == "f" &&
                !(lc->response && marks::is_mark(*lc->response));
            const bool fresh_replica = ctx.focus.goal.tag == "q'" && !lc;
            if (quest_fetched || fresh_replica) delta_events.push_back(ctx.focus.id);
        }
        return inner(ctx);
    };

    const long action_budget = 8 * budget + 8 * static_cast<long>(input.size()) + 64;
    res.run = rqdp_run(val("q", {kInit, ""}), 0, agent, rqdp_tm_tau(), FqdpConfig{4, 4}, provider,
                       action_budget);
    res.max_focus_degree = max_deg;
    res.illegal = res.run.run.reason == HaltReason::illegal_action;

    const QuestGraph& g = res.run.run.graph;
    const QuestTree& t = res.run.run.tree;
    const Response& root = g.node(t.root()).response;
    if (res.run.run.reason == HaltReason::stopped && root) {
        if (*root == marks::terminal()) res.sim_outcome = TmOutcome::accepted;
        if (*root == marks::rejected()) res.sim_outcome = TmOutcome::rejected;
    }

    // Head invariant: every transition fires with the focus reference
    // equal to the oracle's head position at that step.
    res.tm_steps = static_cast<long>(delta_events.size());
    if (delta_events.size() > oracle.head_trail.size()) {
        if (res.sim_outcome != TmOutcome::budget_exhausted) res.head_invariant = false;
    } else {
        for (std::size_t k = 0; k < delta_events.size(); ++k)
            if (res.run.node_refs[static_cast<std::size_t>(delta_events[k])] !=
                oracle.head_trail[k])
                res.head_invariant = false;
    }
    NodeId accept_node = t.root();
    for (const auto& ev : res.run.run.trace)
        if (const auto* cq = std::get_if<CompleteQuest>(&ev.action))
            if (cq->response == marks::terminal() && accept_node == t.root()) {
                accept_node = ev.focus;
                break;
            }

    // Tape read-off: reference graph data overlaid with the pending write
    // goals along the path that was active when the machine halted.
    Reference max_ref = 0;
    std::map<Reference, std::string> sym;
    for (const auto& [r, e] : res.run.refs.entries()) {
        max_ref = std::max(max_ref, r);
        if (auto pr = pair_of(e.response)) sym[r] = pr->second;
    }
    auto path = t.path_to_root(accept_node); // accept node .. root
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const QuestNode& n = g.node(*it);
        Reference r = res.run.node_refs[static_cast<std::size_t>(*it)];
        if (n.goal.tag == "w") sym[r] = n.goal.field(1);
        if (n.goal.tag == "q'" && n.goal.field(0) != kInit && !n.goal.field(1).empty())
            sym[r] = n.goal.field(1);
        max_ref = std::max(max_ref, r);
    }
    std::vector<std::string> tape;
    for (Reference r = 0; r <= max_ref; ++r) {
        auto it = sym.find(r);
        std::string s = it == sym.end() || it->second.empty() ? tm.blank : it->second;
        tape.push_back(s);
    }
    // Cells never touched by the simulation keep their input symbols.
    for (std::size_t i = 0; i < input.size() && i < tape.size(); ++i)
        if (!sym.count(static_cast<Reference>(i))) tape[i] = input[i];
    while (tape.size() > 1 && tape.back() == tm.blank) tape.pop_back();
    res.sim_tape = std::move(tape);

    for (int v = 0; v < g.size(); ++v) {
        const std::string& kind = g.node(v).goal.tag;
        if (kind == "q") ++res.quest_nodes;
        else if (kind == "q'") ++res.replica_nodes;
        else if (kind == "w") ++res.write_nodes;
        else if (kind == "f") ++res.fetch_nodes;
    }

    res.comparable = res.sim_outcome != TmOutcome::budget_exhausted &&
                     res.oracle_outcome != TmOutcome::budget_exhausted && !res.illegal;
    res.agree = res.comparable && res.sim_outcome == res.oracle_outcome &&
                res.sim_tape == res.oracle_tape;
    return res;
}

// ===========================================================================
// LM <-> FSM
// ===========================================================================

LmTable lm_from_fsm(const Fsm& f) {
    LmTable lm;
    lm.name = "from-" + f.name;
    lm.context_length = 2;
    lm.vocabulary.insert(f.states.begin(), f.states.end());
    lm.vocabulary.insert(f.input_alphabet.begin(), f.input_alphabet.end());
    for (const auto& x : lm.vocabulary)
        for (const auto& y : lm.vocabulary) {
            auto it = f.delta.find({x, y});
            lm.delta[{x, y}] = it != f.delta.end() ? it->second : f.start;
        }
    return lm;
}

bool lm_fsm_accepts(const LmTable& lm, const Fsm& f, const std::vector<std::string>& input) {
    std::vector<LmScheduleItem> schedule;
    for (std::size_t i = 0; i < input.size(); ++i)
        schedule.push_back({static_cast<long>(i), input[i]});
    auto seq = lm_run(lm, {f.start, f.start}, schedule, static_cast<long>(input.size()));
    return f.accepting.count(seq.back()) > 0;
}

Fsm fsm_from_lm(const LmTable& lm, const std::vector<std::string>& initial_context,
                const std::function<bool(const std::vector<std::string>&)>& accepting_window,
                int max_states) {
    if (static_cast<int>(initial_context.size()) != lm.context_length)
        throw std::invalid_argument("fsm_from_lm: initial context must have length C");

    Fsm f;
    f.name = "from-" + lm.name;
    f.input_alphabet = lm.vocabulary;

    std::map<std::vector<std::string>, std::string> name_of;
    std::deque<std::vector<std::string>> work;
    auto intern = [&](const std::vector<std::string>& w) {
        auto it = name_of.find(w);
        if (it != name_of.end()) return it->second;
        std::string name = "w" + std::to_string(name_of.size());
        name_of[w] = name;
        f.states.insert(name);
        if (accepting_window(w)) f.accepting.insert(name);
        work.push_back(w);
        return name;
    };

    f.start = intern(initial_context);
    while (!work.empty()) {
        if (static_cast<int>(f.states.size()) > max_states)
            throw std::invalid_argument("fsm_from_lm: context space exceeds the state budget");
        auto w = work.front();
        work.pop_front();
        const std::string& from = name_of.at(w);
        for (const auto& a : lm.vocabulary) {
            // Consume the symbol, then fold the autoregressive generation
            // into the same transition.
            std::vector<std::string> w1(w.begin() + 1, w.end());
            w1.push_back(a);
            std::vector<std::string> w2(w1.begin() + 1, w1.end());
            w2.push_back(lm.next(w1));
            f.delta[{from, a}] = intern(w2);
        }
    }
    return f;
}

} // namespace qg
