/* fixtures.hpp -- hand-authored machines shared by the unit and acceptance
 * suites
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <qg/automata.hpp>

#include <random>

namespace qg::fixtures {

// Appends "1" to a unary string and accepts. On "111": tape 1111, 4 steps.
inline TuringMachine tm_unary_increment() {
    TuringMachine tm;
    tm.name = "unary-increment";
    tm.states = {"scan", "done"};
    tm.tape_alphabet = {"1", "."};
    tm.input_alphabet = {"1"};
    tm.start = "scan";
    tm.blank = ".";
    tm.accepting = {"done"};
    tm.delta[{"scan", "1"}] = {"scan", "1", Dir::R};
    tm.delta[{"scan", "."}] = {"done", "1", Dir::R};
    return tm;
}

// Marker machine for a^n b^n; bad inputs walk off the left tape end.
inline TuringMachine tm_anbn() {
    TuringMachine tm;
    tm.name = "anbn-marker";
    tm.states = {"s", "r", "l", "chk", "d", "acc"};
    tm.tape_alphabet = {"a", "b", "X", "Y", "."};
    tm.input_alphabet = {"a", "b"};
    tm.start = "s";
    tm.blank = ".";
    tm.accepting = {"acc"};
    auto rule = [&](const char* st, const char* sym, const char* nst, const char* w, Dir d) {
        tm.delta[{st, sym}] = {nst, w, d};
    };
    rule("s", "a", "r", "X", Dir::R);
    rule("s", "Y", "chk", "Y", Dir::R);
    rule("s", "b", "s", "b", Dir::L);
    rule("s", ".", "acc", ".", Dir::R);
    rule("s", "X", "d", "X", Dir::L);
    rule("r", "a", "r", "a", Dir::R);
    rule("r", "Y", "r", "Y", Dir::R);
    rule("r", "b", "l", "Y", Dir::L);
    rule("r", ".", "d", ".", Dir::L);
    rule("r", "X", "d", "X", Dir::L);
    rule("l", "a", "l", "a", Dir::L);
    rule("l", "Y", "l", "Y", Dir::L);
    rule("l", "X", "s", "X", Dir::R);
    rule("l", "b", "d", "b", Dir::L);
    rule("l", ".", "d", ".", Dir::L);
    rule("chk", "Y", "chk", "Y", Dir::R);
    rule("chk", ".", "acc", ".", Dir::R);
    rule("chk", "a", "d", "a", Dir::L);
    rule("chk", "b", "d", "b", Dir::L);
    rule("chk", "X", "d", "X", Dir::L);
    for (const char* sym : {"a", "b", "X", "Y", "."}) rule("d", sym, "d", sym, Dir::L);
    return tm;
}

// LSB-first binary increment; moves right only. "111" (=7) -> "0001" (=8).
inline TuringMachine tm_binary_increment() {
    TuringMachine tm;
    tm.name = "binary-increment";
    tm.states = {"inc", "fin"};
    tm.tape_alphabet = {"0", "1", "."};
    tm.input_alphabet = {"0", "1"};
    tm.start = "inc";
    tm.blank = ".";
    tm.accepting = {"fin"};
    tm.delta[{"inc", "0"}] = {"fin", "1", Dir::R};
    tm.delta[{"inc", "1"}] = {"inc", "0", Dir::R};
    tm.delta[{"inc", "."}] = {"fin", "1", Dir::R};
    return tm;
}

// Scripted machine whose head follows the move sequence RRLRRLLL and then
// accepts; each step writes a fresh symbol. Used against the reference
// graph shape assertions.
inline TuringMachine tm_scripted_rrlrrlll() {
    TuringMachine tm;
    tm.name = "scripted-rrlrrlll";
    tm.blank = ".";
    tm.tape_alphabet = {"."};
    tm.start = "m0";
    const Dir moves[] = {Dir::R, Dir::R, Dir::L, Dir::R, Dir::R, Dir::L, Dir::L, Dir::L};
    for (int k = 0; k < 8; ++k) {
        std::string st = "m" + std::to_string(k);
        std::string nx = "m" + std::to_string(k + 1);
        std::string wr = "w" + std::to_string(k);
        tm.states.insert(st);
        tm.tape_alphabet.insert(wr);
    }
    tm.states.insert("m8");
    tm.accepting = {"m8"};
    std::vector<std::string> symbols(tm.tape_alphabet.begin(), tm.tape_alphabet.end());
    for (int k = 0; k < 8; ++k)
        for (const auto& sym : symbols)
            tm.delta[{"m" + std::to_string(k), sym}] = {"m" + std::to_string(k + 1),
                                                        "w" + std::to_string(k), moves[k]};
    return tm;
}

// Seeded generator for small total machines: 2..5 states, 2..3 tape
// symbols, one accepting state.
inline TuringMachine tm_random(std::mt19937& rng) {
    TuringMachine tm;
    tm.name = "random";
    std::uniform_int_distribution<int> nstates(2, 5);
    std::uniform_int_distribution<int> nsyms(2, 3);
    const int ns = nstates(rng);
    const int nt = nsyms(rng);
    for (int i = 0; i < ns; ++i) tm.states.insert("q" + std::to_string(i));
    tm.blank = ".";
    tm.tape_alphabet.insert(".");
    tm.input_alphabet.insert("0");
    tm.tape_alphabet.insert("0");
    if (nt == 3) {
        tm.input_alphabet.insert("1");
        tm.tape_alphabet.insert("1");
    }
    tm.start = "q0";
    std::uniform_int_distribution<int> pick_state(0, ns - 1);
    tm.accepting = {"q" + std::to_string(pick_state(rng))};
    std::vector<std::string> syms(tm.tape_alphabet.begin(), tm.tape_alphabet.end());
    std::uniform_int_distribution<int> pick_sym(0, static_cast<int>(syms.size()) - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    for (const auto& s : tm.states) {
        if (tm.accepting.count(s)) continue;
        for (const auto& t : syms)
            tm.delta[{s, t}] = {"q" + std::to_string(pick_state(rng)), syms[static_cast<std::size_t>(pick_sym(rng))],
                                coin(rng) ? Dir::R : Dir::L};
    }
    return tm;
}

// Nested-balance machine over {a,b}: pushes on a, pops on b, drains the
// bottom symbol as soon as balance returns to zero. Accepts a^n b^n and
// every fully nested string (first return to balance zero ends the word).
inline Dpda dpda_anbn() {
    Dpda d;
    d.name = "anbn";
    d.states = {"s0", "s1"};
    d.input_alphabet = {"a", "b"};
    d.stack_alphabet = {"Z", "A"};
    d.start = "s0";
    d.initial_stack_symbol = "Z";
    d.accepting = {"s0"};
    d.acceptance = DpdaAcceptance::either;
    d.rules = {
        {"s0", "a", "Z", "s1", StackPush{"A"}},
        {"s1", "a", "A", "s1", StackPush{"A"}},
        {"s1", "b", "A", "s1", StackPop{}},
        {"s1", "", "Z", "s1", StackPop{}},
    };
    return d;
}

// Balanced two-type brackets via a state reset on the bottom symbol.
inline Dpda dpda_brackets() {
    Dpda d;
    d.name = "brackets";
    d.states = {"bal", "in"};
    d.input_alphabet = {"(", ")", "[", "]"};
    d.stack_alphabet = {"Z", "P", "B"};
    d.start = "bal";
    d.initial_stack_symbol = "Z";
    d.accepting = {"bal"};
    d.acceptance = DpdaAcceptance::final_state;
    d.rules = {
        {"bal", "(", "Z", "in", StackPush{"P"}},
        {"bal", "[", "Z", "in", StackPush{"B"}},
        {"in", "(", "P", "in", StackPush{"P"}},
        {"in", "(", "B", "in", StackPush{"P"}},
        {"in", "[", "P", "in", StackPush{"B"}},
        {"in", "[", "B", "in", StackPush{"B"}},
        {"in", ")", "P", "in", StackPop{}},
        {"in", "]", "B", "in", StackPop{}},
        {"in", "", "Z", "bal", StackStay{}},
    };
    return d;
}

// Strict a^n b^n (n >= 1) accepted by empty stack.
inline Dpda dpda_strict_anbn() {
    Dpda d;
    d.name = "strict-anbn";
    d.states = {"p", "q"};
    d.input_alphabet = {"a", "b"};
    d.stack_alphabet = {"Z", "A"};
    d.start = "p";
    d.initial_stack_symbol = "Z";
    d.acceptance = DpdaAcceptance::empty_stack;
    d.rules = {
        {"p", "a", "Z", "p", StackPush{"A"}},
        {"p", "a", "A", "p", StackPush{"A"}},
        {"p", "b", "A", "q", StackPop{}},
        {"q", "b", "A", "q", StackPop{}},
        {"q", "", "Z", "q", StackPop{}},
    };
    return d;
}

// Equal numbers of a and b in any order.
inline Dpda dpda_equal_ab() {
    Dpda d;
    d.name = "equal-ab";
    d.states = {"z", "n"};
    d.input_alphabet = {"a", "b"};
    d.stack_alphabet = {"Z", "P", "N"};
    d.start = "z";
    d.initial_stack_symbol = "Z";
    d.accepting = {"z"};
    d.acceptance = DpdaAcceptance::final_state;
    d.rules = {
        {"z", "a", "Z", "n", StackPush{"P"}},
        {"z", "b", "Z", "n", StackPush{"N"}},
        {"n", "a", "P", "n", StackPush{"P"}},
        {"n", "a", "N", "n", StackPop{}},
        {"n", "b", "N", "n", StackPush{"N"}},
        {"n", "b", "P", "n", StackPop{}},
        {"n", "", "Z", "z", StackStay{}},
    };
    return d;
}

// Even number of a's; the stack is never touched (stay transitions only).
inline Dpda dpda_parity_a() {
    Dpda d;
    d.name = "parity-a";
    d.states = {"e", "o"};
    d.input_alphabet = {"a", "b"};
    d.stack_alphabet = {"Z"};
    d.start = "e";
    d.initial_stack_symbol = "Z";
    d.accepting = {"e"};
    d.acceptance = DpdaAcceptance::final_state;
    d.rules = {
        {"e", "a", "Z", "o", StackStay{}},
        {"o", "a", "Z", "e", StackStay{}},
        {"e", "b", "Z", "e", StackStay{}},
        {"o", "b", "Z", "o", StackStay{}},
    };
    return d;
}

inline std::vector<Dpda> dpda_fleet() {
    return {dpda_anbn(), dpda_brackets(), dpda_strict_anbn(), dpda_equal_ab(), dpda_parity_a()};
}

// Even number of 1's.
inline Fsm fsm_parity1() {
    Fsm f;
    f.name = "parity1";
    f.states = {"ev", "od"};
    f.input_alphabet = {"0", "1"};
    f.start = "ev";
    f.accepting = {"ev"};
    f.delta[{"ev", "0"}] = "ev";
    f.delta[{"ev", "1"}] = "od";
    f.delta[{"od", "0"}] = "od";
    f.delta[{"od", "1"}] = "ev";
    return f;
}

inline Fsm fsm_mod3_a() {
    Fsm f;
    f.name = "mod3-a";
    f.states = {"r0", "r1", "r2"};
    f.input_alphabet = {"a"};
    f.start = "r0";
    f.accepting = {"r0"};
    f.delta[{"r0", "a"}] = "r1";
    f.delta[{"r1", "a"}] = "r2";
    f.delta[{"r2", "a"}] = "r0";
    return f;
}

inline Fsm fsm_ends_ab() {
    Fsm f;
    f.name = "ends-ab";
    f.states = {"e", "a", "ab"};
    f.input_alphabet = {"a", "b"};
    f.start = "e";
    f.accepting = {"ab"};
    f.delta[{"e", "a"}] = "a";
    f.delta[{"e", "b"}] = "e";
    f.delta[{"a", "a"}] = "a";
    f.delta[{"a", "b"}] = "ab";
    f.delta[{"ab", "a"}] = "a";
    f.delta[{"ab", "b"}] = "e";
    return f;
}

inline Fsm fsm_contains_aba() {
    Fsm f;
    f.name = "contains-aba";
    f.states = {"e", "a", "ab", "hit"};
    f.input_alphabet = {"a", "b"};
    f.start = "e";
    f.accepting = {"hit"};
    f.delta[{"e", "a"}] = "a";
    f.delta[{"e", "b"}] = "e";
    f.delta[{"a", "a"}] = "a";
    f.delta[{"a", "b"}] = "ab";
    f.delta[{"ab", "a"}] = "hit";
    f.delta[{"ab", "b"}] = "e";
    f.delta[{"hit", "a"}] = "hit";
    f.delta[{"hit", "b"}] = "hit";
    return f;
}

inline Fsm fsm_single_state() {
    Fsm f;
    f.name = "all";
    f.states = {"s"};
    f.input_alphabet = {"x"};
    f.start = "s";
    f.accepting = {"s"};
    f.delta[{"s", "x"}] = "s";
    return f;
}

inline std::vector<Fsm> fsm_fleet() {
    return {fsm_parity1(), fsm_mod3_a(), fsm_ends_ab(), fsm_contains_aba(), fsm_single_state()};
}

// The worked CNF grammar: S -> CB | AB, P -> CB | AB, C -> AP, A -> a, B -> b.
inline CnfGrammar cnf_fig_grammar() {
    CnfGrammar g;
    g.name = "nested-ab";
    g.nonterminals = {"S", "P", "C", "A", "B"};
    g.terminals = {"a", "b"};
    g.start = "S";
    g.binary_rules = {{"S", "C", "B"}, {"S", "A", "B"}, {"P", "C", "B"},
                      {"P", "A", "B"}, {"C", "A", "P"}};
    g.terminal_rules = {{"A", "a"}, {"B", "b"}};
    return g;
}

// Seeded random CNF grammar over {a, b} with at most four nonterminals.
inline CnfGrammar cnf_random(std::mt19937& rng) {
    CnfGrammar g;
    g.name = "random";
    std::uniform_int_distribution<int> nnt(2, 4);
    const int k = nnt(rng);
    std::vector<std::string> nts;
    for (int i = 0; i < k; ++i) {
        nts.push_back(i == 0 ? "S" : "N" + std::to_string(i));
        g.nonterminals.insert(nts.back());
    }
    g.terminals = {"a", "b"};
    g.start = "S";
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::uniform_int_distribution<int> nrules(1, 3);
    std::uniform_int_distribution<int> coin(0, 1);
    for (const auto& nt : nts) {
        const int r = nrules(rng);
        for (int i = 0; i < r; ++i) {
            if (coin(rng))
                g.binary_rules.emplace_back(nt, nts[static_cast<std::size_t>(pick(rng))],
                                            nts[static_cast<std::size_t>(pick(rng))]);
            else
                g.terminal_rules.emplace_back(nt, coin(rng) ? "a" : "b");
        }
    }
    // Keep at least one terminal rule so some string is derivable.
    if (g.terminal_rules.empty()) g.terminal_rules.emplace_back("S", "a");
    return g;
}

// All words of length <= max_len over the alphabet, shortest first.
inline std::vector<std::vector<std::string>> words_upto(const std::vector<std::string>& alphabet,
                                                        int max_len) {
    std::vector<std::vector<std::string>> out{{}};
    std::size_t tier_begin = 0;
    for (int len = 1; len <= max_len; ++len) {
        std::size_t tier_end = out.size();
        for (std::size_t i = tier_begin; i < tier_end; ++i)
            for (const auto& s : alphabet) {
                auto w = out[i];
                w.push_back(s);
                out.push_back(std::move(w));
            }
        tier_begin = tier_end;
    }
    return out;
}

} // namespace qg::fixtures
