/* automata.hpp -- classical machine definitions and their direct executions:
 * Turing machines, (D)PDAs, FSMs, CNF grammars and finite-context LM tables
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qg {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Turing machines (one-way infinite tape, leftmost cell 0)
// ---------------------------------------------------------------------------

enum class Dir { L, R };

inline char dir_char(Dir d) { return d == Dir::L ? 'L' : 'R'; }

struct TmRule {
    std::string next_state;
    std::string write;
    Dir move = Dir::R;
};

struct TuringMachine {
    std::string name;
    std::set<std::string> states;
    std::set<std::string> tape_alphabet;
    std::set<std::string> input_alphabet;
    std::map<std::pair<std::string, std::string>, TmRule> delta; // (state, symbol) -> rule
    std::string start;
    std::string blank;
    std::set<std::string> accepting;
};

// Throws std::invalid_argument when the definition breaks its invariants
// (blank inside the input alphabet, partial delta on non-accepting states, ...).
void validate_tm(const TuringMachine& tm);

enum class TmOutcome { accepted, rejected, budget_exhausted };

struct TmResult {
    TmOutcome outcome = TmOutcome::budget_exhausted;
    std::vector<std::string> tape; // cells 0..max visited, trailing blanks trimmed
    long head = 0;
    long steps = 0;
    std::vector<Dir> moves;
    std::vector<long> head_trail; // head position before each applied step
};

// Direct simulation. The head starts at cell 0; moving left of cell 0
// rejects (one-way tape convention). Acceptance is checked before each
// transition.
TmResult tm_run(const TuringMachine& tm, const std::vector<std::string>& input, long budget);

// Convenience for single-character alphabets.
std::vector<std::string> symbols_of(const std::string& word);

// ---------------------------------------------------------------------------
// Deterministic pushdown automata (single push/pop/stay per transition)
// ---------------------------------------------------------------------------

struct StackPush { std::string symbol; };
struct StackPop {};
struct StackStay {};
using StackOp = std::variant<StackPush, StackPop, StackStay>;

struct DpdaRule {
    std::string state;
    std::string input; // empty string = epsilon transition
    std::string top;
    std::string next_state;
    StackOp op;
};

enum class DpdaAcceptance { final_state, empty_stack, either };

struct Dpda {
    std::string name;
    std::set<std::string> states;
    std::set<std::string> input_alphabet;
    std::set<std::string> stack_alphabet;
    std::vector<DpdaRule> rules;
    std::string start;
    std::string initial_stack_symbol;
    std::set<std::string> accepting;
    DpdaAcceptance acceptance = DpdaAcceptance::either;

    const DpdaRule* rule_for(const std::string& state, const std::string& input,
                             const std::string& top) const;
};

// Determinism diagnostics: empty iff at most one transition applies in any
// configuration and epsilon rules exclude input rules on the same
// (state, stack top).
std::vector<std::string> validate_dpda(const Dpda& d);

enum class DpdaOutcome { accepted, rejected, budget_exhausted };

struct DpdaConfig {
    std::string state;
    std::size_t consumed = 0;
    std::vector<std::string> stack; // back() is the top
};

struct DpdaResult {
    DpdaOutcome outcome = DpdaOutcome::budget_exhausted;
    std::vector<DpdaConfig> trace;
};

// Epsilon transitions take priority (determinism guarantees no conflict).
// After the whole input is consumed the machine may keep taking epsilon
// transitions within the budget; it accepts if any post-consumption
// configuration meets the declared acceptance condition.
DpdaResult dpda_run(const Dpda& d, const std::vector<std::string>& input, long budget);

// ---------------------------------------------------------------------------
// Finite state machines
// ---------------------------------------------------------------------------

struct Fsm {
    std::string name;
    std::set<std::string> states;
    std::set<std::string> input_alphabet;
    std::map<std::pair<std::string, std::string>, std::string> delta;
    std::string start;
    std::set<std::string> accepting;
};

void validate_fsm(const Fsm& f);

struct FsmResult {
    bool accepted = false;
    std::vector<std::string> state_sequence; // includes the start state
    std::string diagnostic;                  // set when an unknown symbol was seen
};

FsmResult fsm_run(const Fsm& f, const std::vector<std::string>& input);

// ---------------------------------------------------------------------------
// CNF grammars and CYK membership
// ---------------------------------------------------------------------------

struct CnfGrammar {
    std::string name;
    std::set<std::string> nonterminals;
    std::set<std::string> terminals;
    std::vector<std::tuple<std::string, std::string, std::string>> binary_rules; // A -> B C
    std::vector<std::pair<std::string, std::string>> terminal_rules;             // A -> a
    std::string start;
    bool allows_empty = false;
};

void validate_cnf(const CnfGrammar& g);

struct CykResult {
    bool member = false;
    BigInt derivation_count = 0;
    // table[i][len] = nonterminals generating input[i, i+len)
    std::vector<std::vector<std::set<std::string>>> table;
};

CykResult cyk_member(const CnfGrammar& g, const std::vector<std::string>& input);

// ---------------------------------------------------------------------------
// Finite-context LM tables
// ---------------------------------------------------------------------------

struct LmTable {
    std::string name;
    std::set<std::string> vocabulary;
    int context_length = 2;
    std::map<std::vector<std::string>, std::string> delta; // length-C tuple -> token
    std::string fallback;                                  // used where delta is sparse

    std::string next(const std::vector<std::string>& window) const;
};

struct LmScheduleItem {
    long step = 0;
    std::string token;
};

// At each step the scheduled token (if any) is appended first, then one
// generated token is appended; the context window slides over the last C
// tokens. Returns the full token sequence including the initial context.
std::vector<std::string> lm_run(const LmTable& lm, std::vector<std::string> initial_context,
                                const std::vector<LmScheduleItem>& schedule, long steps);

} // namespace qg
