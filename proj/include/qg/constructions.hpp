/* constructions.hpp -- executable agents for the machine constructions:
 * TM on the unrestricted quest graph, DPDA on FQDP, CFL acceptance on
 * NFQDP, TM on RQDP, and the LM<->FSM translations; each packaged with an
 * initializer and a conformance check against its direct-execution oracle
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <qg/automata.hpp>
#include <qg/core.hpp>
#include <qg/qdp.hpp>
#include <qg/reference.hpp>

namespace qg {

// ---------------------------------------------------------------------------
// TM on the unrestricted quest graph (context capacity 2)
// ---------------------------------------------------------------------------

// Tape-cell responses: tag "cell", fields {state, symbol, direction}.
// Empty state/symbol fields are wildcards; boundary markers carry empty
// state and symbol with only a direction.
Value cell_response(const std::string& state, const std::string& symbol, Dir d);

/*
 * Linear chain for the initial tape: one node per input cell plus a
 * planted left neighbor carrying the start state. Directions point inward
 * toward the focus (the head cell), so every node left of the focus holds
 * R and every node from the focus rightward holds L. Empty input seeds a
 * single blank cell.
 */
QuestGraph build_tm_tape_graph(const TuringMachine& tm, const std::vector<std::string>& input);

// The stateless tape-walking agent: reads the state from the neighbor
// whose direction opposes the focus direction, applies the transition,
// extends the tape with boundary markers at the ends, stops on accepting
// states.
AgentFn tm_questgraph_agent(const TuringMachine& tm);

struct TmQgConformance {
    TmOutcome sim_outcome = TmOutcome::budget_exhausted;
    TmOutcome oracle_outcome = TmOutcome::budget_exhausted;
    bool comparable = false; // both halted within budget
    bool agree = false;      // halting status and final tape match
    bool direction_invariant = true;
    bool degree_invariant = true;
    bool illegal = false;
    std::vector<std::string> sim_tape;
    std::vector<std::string> oracle_tape;
    long sim_actions = 0;
    long tm_steps = 0;
    QuestGraph graph;
    std::vector<TraceEvent> trace;
};

// Runs both the quest-graph simulation and the direct oracle with the same
// transition budget; positions left of cell 0 reject in both (one-way
// convention).
TmQgConformance simulate_tm_on_questgraph(const TuringMachine& tm,
                                          const std::vector<std::string>& input, long budget);

// ---------------------------------------------------------------------------
// DPDA on FQDP (context capacity 4)
// ---------------------------------------------------------------------------

// Quest/replica goals: tag "q"/"q'", fields {stack symbol, state}.
// Input nodes: tag "i"; responses carry tag "sym" {symbol} or stay empty
// at the end of the input. Completions respond with tag "st" {state}.
QdpAgent fqdp_dpda_agent(const Dpda& d);

// Cursor-backed input provider; reads past the end return the empty
// response as the distinguished end marker.
InputProvider string_input_provider(std::vector<std::string> input,
                                    std::shared_ptr<std::size_t> cursor = nullptr);

struct DpdaSimResult {
    bool accepted = false;
    bool budget_hit = false;
    bool illegal = false;
    int max_focus_degree = 0;
    std::vector<std::string> consumed; // symbols in read order
    QdpRunResult run;
};

DpdaSimResult simulate_dpda_on_fqdp(const Dpda& d, const std::vector<std::string>& input,
                                    long budget);

// ---------------------------------------------------------------------------
// FQDP -> DPDA (local contexts interned as states)
// ---------------------------------------------------------------------------

struct FqdpToDpda {
    Dpda machine;
    bool complete = true; // false when the context budget was exhausted
    std::string diagnostic;
};

/*
 * Builds a DPDA whose states are the agent's reachable local contexts:
 * input reads become consuming transitions, sub-quest discovery becomes a
 * push with an epsilon move, completion becomes a pop. The agent must run
 * under the FQDP vocabulary and read only the focus, last child and
 * root flag of its context. States whose end-of-input closure stops
 * cleanly become accepting.
 */
FqdpToDpda dpda_from_fqdp(const QdpAgent& agent, const Goal& root_goal, const FqdpConfig& cfg,
                          const std::vector<std::string>& alphabet, int max_contexts = 4096);

// ---------------------------------------------------------------------------
// CFL acceptance on NFQDP (context capacity 3)
// ---------------------------------------------------------------------------

/*
 * Pre-built parse graph: a chain of binary trees linked at their roots,
 * one tree per bracketing of the input. Quest nodes (tag "q") chain the
 * trees, production nodes (tag "p") cover spans, input leaves (tag "i")
 * carry the terminals.
 */
struct ParseGraph {
    QuestGraph graph;
    QuestTree tree;
    std::vector<std::pair<int, int>> spans; // per node: covered [from, to)
    int root_count = 0;                     // number of quest nodes in the chain
};

ParseGraph build_parse_graph(const CnfGrammar& g, const std::vector<std::string>& input);

// Depth-first NFQDP traversal: production nodes collect the nonterminals
// deriving their span, quest nodes sweep a boolean back along the chain.
QdpAgent nfqdp_cfl_agent(const CnfGrammar& g);

struct CflSimResult {
    bool accepted = false;
    bool budget_hit = false;
    bool illegal = false;
    int max_focus_degree = 0;
    QdpRunResult run;
    std::vector<std::pair<int, int>> spans;
};

CflSimResult simulate_cfl_on_nfqdp(const CnfGrammar& g, const std::vector<std::string>& input,
                                   long budget);

// Response decoding helper for production-node sets.
std::vector<std::string> set_response_members(const Value& v);

// ---------------------------------------------------------------------------
// TM on RQDP (context capacity 4)
// ---------------------------------------------------------------------------

// Goals: tag in {"q", "q'", "f", "w"}, fields {state, symbol}; responses
// are pairs tag "pr" {state, symbol}. References are tape positions; tau
// increments on quest nodes and keeps the reference otherwise.
TauFn rqdp_tm_tau();

// One agent covers both phases: the initializer lays the input with
// discover-input actions under the reserved "#init" state, walks back to
// position zero, then the simulation cycle runs fetch/write/replica steps.
QdpAgent rqdp_tm_agent(const TuringMachine& tm);

struct RqdpTmResult {
    TmOutcome sim_outcome = TmOutcome::budget_exhausted;
    TmOutcome oracle_outcome = TmOutcome::budget_exhausted;
    bool comparable = false;
    bool agree = false;
    bool illegal = false;
    bool head_invariant = true; // focus reference == oracle head at invariant states
    int max_focus_degree = 0;
    std::vector<std::string> sim_tape; // reference graph + pending write goals
    std::vector<std::string> oracle_tape;
    RqdpRunResult run;
    long tm_steps = 0;
    // Node-kind statistics; replicas are tracked apart from quest pushes.
    long quest_nodes = 0;
    long replica_nodes = 0;
    long write_nodes = 0;
    long fetch_nodes = 0;
};

RqdpTmResult simulate_tm_on_rqdp(const TuringMachine& tm, const std::vector<std::string>& input,
                                 long budget);

// ---------------------------------------------------------------------------
// LM <-> FSM
// ---------------------------------------------------------------------------

// Vocabulary = states + input symbols; the table emulates the FSM
// transition function and is filled to totality with the start state.
LmTable lm_from_fsm(const Fsm& f);

// The alternating feed/generate protocol over an FSM-derived table;
// acceptance reads the final generated token.
bool lm_fsm_accepts(const LmTable& lm, const Fsm& f, const std::vector<std::string>& input);

/*
 * Collapses each autoregressive generation step into the preceding
 * consumption transition, yielding a deterministic FSM over the reachable
 * context windows.
 */
Fsm fsm_from_lm(const LmTable& lm, const std::vector<std::string>& initial_context,
                const std::function<bool(const std::vector<std::string>&)>& accepting_window,
                int max_states = 100000);

} // namespace qg
