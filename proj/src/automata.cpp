/* automata.cpp -- direct executions of the classical machines
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/automata.hpp>

#include <algorithm>
#include <stdexcept>

namespace qg {

std::vector<std::string> symbols_of(const std::string& word) {
    std::vector<std::string> out;
    out.reserve(word.size());
    for (char c : word) out.emplace_back(1, c);
    return out;
}

// ---------------------------------------------------------------------------
// Turing machine
// ---------------------------------------------------------------------------

void validate_tm(const TuringMachine& tm) {
    if (!tm.states.count(tm.start)) throw std::invalid_argument("tm: start state unknown");
    if (!tm.tape_alphabet.count(tm.blank)) throw std::invalid_argument("tm: blank not in tape alphabet");
    if (tm.input_alphabet.count(tm.blank)) throw std::invalid_argument("tm: blank inside input alphabet");
    for (const auto& s : tm.input_alphabet)
        if (!tm.tape_alphabet.count(s)) throw std::invalid_argument("tm: input symbol outside tape alphabet");
    for (const auto& s : tm.accepting)
        if (!tm.states.count(s)) throw std::invalid_argument("tm: accepting state unknown");
    for (const auto& [key, rule] : tm.delta) {
        if (!tm.states.count(key.first) || !tm.tape_alphabet.count(key.second))
            throw std::invalid_argument("tm: rule over unknown state or symbol");
        if (!tm.states.count(rule.next_state) || !tm.tape_alphabet.count(rule.write))
            throw std::invalid_argument("tm: rule targets unknown state or symbol");
    }
    for (const auto& s : tm.states) {
        if (tm.accepting.count(s)) continue;
        for (const auto& t : tm.tape_alphabet)
            if (!tm.delta.count({s, t}))
                throw std::invalid_argument("tm: delta not total on state " + s + ", symbol " + t);
    }
}

TmResult tm_run(const TuringMachine& tm, const std::vector<std::string>& input, long budget) {
    for (const auto& s : input)
        if (!tm.input_alphabet.count(s))
            throw std::invalid_argument("tm: input symbol outside input alphabet: " + s);

    TmResult res;
    std::vector<std::string> tape = input;
    if (tape.empty()) tape.push_back(tm.blank);
    long head = 0;
    std::string state = tm.start;

    for (long step = 0; step < budget; ++step) {
        if (tm.accepting.count(state)) {
            res.outcome = TmOutcome::accepted;
            break;
        }
        res.head_trail.push_back(head);
        const auto it = tm.delta.find({state, tape[static_cast<std::size_t>(head)]});
        if (it == tm.delta.end())
            throw std::logic_error("tm: delta not total (validate_tm should have caught this)");
        const TmRule& rule = it->second;
        tape[static_cast<std::size_t>(head)] = rule.write;
        state = rule.next_state;
        res.moves.push_back(rule.move);
        ++res.steps;
        if (rule.move == Dir::L) {
            if (head == 0) {
                res.outcome = TmOutcome::rejected; // fell off the left end
                head = -1;
                break;
            }
            --head;
        } else {
            ++head;
            if (head == static_cast<long>(tape.size())) tape.push_back(tm.blank);
        }
    }

    while (tape.size() > 1 && tape.back() == tm.blank) tape.pop_back();
    res.tape = std::move(tape);
    res.head = head;
    return res;
}

// ---------------------------------------------------------------------------
// DPDA
// ---------------------------------------------------------------------------

const DpdaRule* Dpda::rule_for(const std::string& state, const std::string& input,
                               const std::string& top) const {
    for (const auto& r : rules)
        if (r.state == state && r.input == input && r.top == top) return &r;
    return nullptr;
}

std::vector<std::string> validate_dpda(const Dpda& d) {
    std::vector<std::string> diags;
    auto key = [](const DpdaRule& r) { return r.state + "," + (r.input.empty() ? "eps" : r.input) + "," + r.top; };
    for (std::size_t i = 0; i < d.rules.size(); ++i) {
        for (std::size_t j = i + 1; j < d.rules.size(); ++j) {
            const auto& a = d.rules[i];
            const auto& b = d.rules[j];
            if (a.state == b.state && a.top == b.top) {
                if (a.input == b.input)
                    diags.push_back("two transitions for (" + key(a) + ")");
                else if (a.input.empty() || b.input.empty())
                    diags.push_back("epsilon and input transition share (" + a.state + ",*," + a.top + ")");
            }
        }
    }
    for (const auto& r : d.rules) {
        if (!d.states.count(r.state) || !d.states.count(r.next_state))
            diags.push_back("rule over unknown state (" + key(r) + ")");
        if (!r.input.empty() && !d.input_alphabet.count(r.input))
            diags.push_back("rule over unknown input symbol (" + key(r) + ")");
        if (!d.stack_alphabet.count(r.top))
            diags.push_back("rule over unknown stack symbol (" + key(r) + ")");
        if (const auto* push = std::get_if<StackPush>(&r.op); push && !d.stack_alphabet.count(push->symbol))
            diags.push_back("rule pushes unknown stack symbol (" + key(r) + ")");
    }
    return diags;
}

namespace {

bool dpda_config_accepts(const Dpda& d, const std::string& state,
                         const std::vector<std::string>& stack) {
    const bool by_state = d.accepting.count(state) > 0;
    const bool by_stack = stack.empty();
    switch (d.acceptance) {
    case DpdaAcceptance::final_state: return by_state;
    case DpdaAcceptance::empty_stack: return by_stack;
    case DpdaAcceptance::either: return by_state || by_stack;
    }
    return false;
}

} // namespace

DpdaResult dpda_run(const Dpda& d, const std::vector<std::string>& input, long budget) {
    DpdaResult res;
    std::string state = d.start;
    std::vector<std::string> stack{d.initial_stack_symbol};
    std::size_t consumed = 0;
    bool accepted = false;
    bool dead = false; // no transition can ever apply again

    res.trace.push_back(DpdaConfig{state, consumed, stack});
    for (long step = 0; step < budget; ++step) {
        if (consumed == input.size() && dpda_config_accepts(d, state, stack)) accepted = true;
        if (stack.empty()) {
            dead = true;
            break;
        }
        const std::string& top = stack.back();
        const DpdaRule* rule = d.rule_for(state, "", top);
        if (!rule && consumed < input.size()) rule = d.rule_for(state, input[consumed], top);
        if (!rule) {
            dead = true;
            break;
        }
        if (!rule->input.empty()) ++consumed;
        state = rule->next_state;
        if (std::holds_alternative<StackPop>(rule->op))
            stack.pop_back();
        else if (const auto* push = std::get_if<StackPush>(&rule->op))
            stack.push_back(push->symbol);
        res.trace.push_back(DpdaConfig{state, consumed, stack});
    }

    if (consumed == input.size()) {
        if (dpda_config_accepts(d, state, stack)) accepted = true;
        res.outcome = accepted ? DpdaOutcome::accepted : DpdaOutcome::rejected;
    } else {
        res.outcome = dead ? DpdaOutcome::rejected : DpdaOutcome::budget_exhausted;
    }
    return res;
}

// ---------------------------------------------------------------------------
// FSM
// ---------------------------------------------------------------------------

void validate_fsm(const Fsm& f) {
    if (!f.states.count(f.start)) throw std::invalid_argument("fsm: start state unknown");
    for (const auto& s : f.states)
        for (const auto& a : f.input_alphabet)
            if (!f.delta.count({s, a}))
                throw std::invalid_argument("fsm: delta not total on " + s + "," + a);
}

FsmResult fsm_run(const Fsm& f, const std::vector<std::string>& input) {
    FsmResult res;
    std::string state = f.start;
    res.state_sequence.push_back(state);
    for (const auto& a : input) {
        auto it = f.delta.find({state, a});
        if (it == f.delta.end()) {
            res.accepted = false;
            res.diagnostic = "unknown symbol: " + a;
            return res;
        }
        state = it->second;
        res.state_sequence.push_back(state);
    }
    res.accepted = f.accepting.count(state) > 0;
    return res;
}

// ---------------------------------------------------------------------------
// CNF grammar / CYK
// ---------------------------------------------------------------------------

void validate_cnf(const CnfGrammar& g) {
    if (!g.nonterminals.count(g.start)) throw std::invalid_argument("cnf: start symbol unknown");
    for (const auto& [a, b, c] : g.binary_rules) {
        if (!g.nonterminals.count(a) || !g.nonterminals.count(b) || !g.nonterminals.count(c))
            throw std::invalid_argument("cnf: binary rule over unknown nonterminal");
        if (g.allows_empty && (b == g.start || c == g.start))
            throw std::invalid_argument("cnf: start symbol on a right-hand side with S->eps present");
    }
    for (const auto& [a, t] : g.terminal_rules) {
        if (!g.nonterminals.count(a)) throw std::invalid_argument("cnf: terminal rule over unknown nonterminal");
        if (!g.terminals.count(t)) throw std::invalid_argument("cnf: terminal rule over unknown terminal");
    }
}

CykResult cyk_member(const CnfGrammar& g, const std::vector<std::string>& input) {
    CykResult res;
    const std::size_t n = input.size();
    if (n == 0) {
        res.member = g.allows_empty;
        res.derivation_count = g.allows_empty ? 1 : 0;
        return res;
    }

    // count[i][len][A] = number of distinct parse trees of input[i, i+len)
    std::vector<std::vector<std::map<std::string, BigInt>>> count(
        n, std::vector<std::map<std::string, BigInt>>(n + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [a, t] : g.terminal_rules)
            if (t == input[i]) count[i][1][a] += 1;

    for (std::size_t len = 2; len <= n; ++len)
        for (std::size_t i = 0; i + len <= n; ++i)
            for (std::size_t split = 1; split < len; ++split)
                for (const auto& [a, b, c] : g.binary_rules) {
                    auto lb = count[i][split].find(b);
                    if (lb == count[i][split].end()) continue;
                    auto rc = count[i + split][len - split].find(c);
                    if (rc == count[i + split][len - split].end()) continue;
                    count[i][len][a] += lb->second * rc->second;
                }

    res.table.assign(n, std::vector<std::set<std::string>>(n + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t len = 1; len <= n; ++len)
            for (const auto& [nt, c] : count[i][len])
                if (c > 0) res.table[i][len].insert(nt);

    auto it = count[0][n].find(g.start);
    res.derivation_count = it == count[0][n].end() ? BigInt(0) : it->second;
    res.member = res.derivation_count > 0;
    return res;
}

// ---------------------------------------------------------------------------
// LM table
// ---------------------------------------------------------------------------

std::string LmTable::next(const std::vector<std::string>& window) const {
    auto it = delta.find(window);
    if (it != delta.end()) return it->second;
    if (!fallback.empty()) return fallback;
    throw std::invalid_argument("lm: delta undefined for window and no fallback set");
}

std::vector<std::string> lm_run(const LmTable& lm, std::vector<std::string> initial_context,
                                const std::vector<LmScheduleItem>& schedule, long steps) {
    if (static_cast<int>(initial_context.size()) != lm.context_length)
        throw std::invalid_argument("lm: initial context must have length C");
    for (const auto& item : schedule)
        if (!lm.vocabulary.count(item.token))
            throw std::invalid_argument("lm: scheduled token outside vocabulary: " + item.token);

    std::vector<std::string> sequence = std::move(initial_context);
    auto window = [&] {
        return std::vector<std::string>(sequence.end() - lm.context_length, sequence.end());
    };
    for (long step = 0; step < steps; ++step) {
        for (const auto& item : schedule)
            if (item.step == step) sequence.push_back(item.token);
        sequence.push_back(lm.next(window()));
    }
    return sequence;
}

} // namespace qg
