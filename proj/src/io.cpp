/* io.cpp -- machine JSON, edge lists, CSV and DOT
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <qg/io.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace qg {

using nlohmann::json;

namespace {

std::set<std::string> str_set(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_array())
        throw ParseError(std::string("missing or non-array field: ") + field);
    std::set<std::string> out;
    for (const auto& v : j[field]) out.insert(v.get<std::string>());
    return out;
}

std::string str_field(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw ParseError(std::string("missing or non-string field: ") + field);
    return j[field].get<std::string>();
}

TuringMachine tm_from_json(const json& j) {
    TuringMachine tm;
    tm.name = j.value("name", "tm");
    tm.states = str_set(j, "states");
    tm.tape_alphabet = str_set(j, "tape_alphabet");
    tm.input_alphabet = str_set(j, "input_alphabet");
    tm.start = str_field(j, "start");
    tm.blank = str_field(j, "blank");
    tm.accepting = str_set(j, "accepting");
    for (const auto& r : j.at("delta")) {
        std::string move = str_field(r, "move");
        if (move != "L" && move != "R") throw ParseError("tm delta move must be L or R");
        tm.delta[{str_field(r, "state"), str_field(r, "read")}] =
            TmRule{str_field(r, "next"), str_field(r, "write"), move == "L" ? Dir::L : Dir::R};
    }
    validate_tm(tm);
    return tm;
}

json tm_to_json(const TuringMachine& tm) {
    json j;
    j["kind"] = "tm";
    j["name"] = tm.name;
    j["states"] = tm.states;
    j["tape_alphabet"] = tm.tape_alphabet;
    j["input_alphabet"] = tm.input_alphabet;
    j["start"] = tm.start;
    j["blank"] = tm.blank;
    j["accepting"] = tm.accepting;
    json rules = json::array();
    for (const auto& [key, rule] : tm.delta)
        rules.push_back({{"state", key.first},
                         {"read", key.second},
                         {"next", rule.next_state},
                         {"write", rule.write},
                         {"move", std::string(1, dir_char(rule.move))}});
    j["delta"] = rules;
    return j;
}

Dpda dpda_from_json(const json& j) {
    Dpda d;
    d.name = j.value("name", "dpda");
    d.states = str_set(j, "states");
    d.input_alphabet = str_set(j, "input_alphabet");
    d.stack_alphabet = str_set(j, "stack_alphabet");
    d.start = str_field(j, "start");
    d.initial_stack_symbol = str_field(j, "initial_stack_symbol");
    if (j.contains("accepting")) d.accepting = str_set(j, "accepting");
    const std::string mode = j.value("acceptance", "either");
    if (mode == "final_state")
        d.acceptance = DpdaAcceptance::final_state;
    else if (mode == "empty_stack")
        d.acceptance = DpdaAcceptance::empty_stack;
    else if (mode == "either")
        d.acceptance = DpdaAcceptance::either;
    else
        throw ParseError("dpda acceptance must be final_state, empty_stack or either");
    for (const auto& r : j.at("rules")) {
        DpdaRule rule;
        rule.state = str_field(r, "state");
        rule.input = r.value("input", "");
        rule.top = str_field(r, "top");
        rule.next_state = str_field(r, "next");
        const std::string op = str_field(r, "op");
        if (op == "push")
            rule.op = StackPush{str_field(r, "push")};
        else if (op == "pop")
            rule.op = StackPop{};
        else if (op == "stay")
            rule.op = StackStay{};
        else
            throw ParseError("dpda rule op must be push, pop or stay");
        d.rules.push_back(std::move(rule));
    }
    auto diags = validate_dpda(d);
    if (!diags.empty()) throw ParseError("dpda is nondeterministic: " + diags.front());
    return d;
}

json dpda_to_json(const Dpda& d) {
    json j;
    j["kind"] = "dpda";
    j["name"] = d.name;
    j["states"] = d.states;
    j["input_alphabet"] = d.input_alphabet;
    j["stack_alphabet"] = d.stack_alphabet;
    j["start"] = d.start;
    j["initial_stack_symbol"] = d.initial_stack_symbol;
    j["accepting"] = d.accepting;
    j["acceptance"] = d.acceptance == DpdaAcceptance::final_state ? "final_state"
                      : d.acceptance == DpdaAcceptance::empty_stack ? "empty_stack"
                                                                    : "either";
    json rules = json::array();
    for (const auto& r : d.rules) {
        json rule{{"state", r.state}, {"input", r.input}, {"top", r.top}, {"next", r.next_state}};
        if (const auto* push = std::get_if<StackPush>(&r.op)) {
            rule["op"] = "push";
            rule["push"] = push->symbol;
        } else if (std::holds_alternative<StackPop>(r.op)) {
            rule["op"] = "pop";
        } else {
            rule["op"] = "stay";
        }
        rules.push_back(std::move(rule));
    }
    j["rules"] = rules;
    return j;
}

Fsm fsm_from_json(const json& j) {
    Fsm f;
    f.name = j.value("name", "fsm");
    f.states = str_set(j, "states");
    f.input_alphabet = str_set(j, "input_alphabet");
    f.start = str_field(j, "start");
    f.accepting = str_set(j, "accepting");
    for (const auto& r : j.at("delta"))
        f.delta[{str_field(r, "state"), str_field(r, "input")}] = str_field(r, "next");
    validate_fsm(f);
    return f;
}

json fsm_to_json(const Fsm& f) {
    json j;
    j["kind"] = "fsm";
    j["name"] = f.name;
    j["states"] = f.states;
    j["input_alphabet"] = f.input_alphabet;
    j["start"] = f.start;
    j["accepting"] = f.accepting;
    json rules = json::array();
    for (const auto& [key, next] : f.delta)
        rules.push_back({{"state", key.first}, {"input", key.second}, {"next", next}});
    j["delta"] = rules;
    return j;
}

CnfGrammar cnf_from_json(const json& j) {
    CnfGrammar g;
    g.name = j.value("name", "cnf");
    g.nonterminals = str_set(j, "nonterminals");
    g.terminals = str_set(j, "terminals");
    g.start = str_field(j, "start");
    g.allows_empty = j.value("allows_empty", false);
    for (const auto& r : j.at("rules")) {
        std::string lhs = str_field(r, "lhs");
        const auto& rhs = r.at("rhs");
        if (rhs.size() == 1)
            g.terminal_rules.emplace_back(lhs, rhs[0].get<std::string>());
        else if (rhs.size() == 2)
            g.binary_rules.emplace_back(lhs, rhs[0].get<std::string>(), rhs[1].get<std::string>());
        else
            throw ParseError("cnf rule rhs must have one terminal or two nonterminals");
    }
    validate_cnf(g);
    return g;
}

json cnf_to_json(const CnfGrammar& g) {
    json j;
    j["kind"] = "cnf_grammar";
    j["name"] = g.name;
    j["nonterminals"] = g.nonterminals;
    j["terminals"] = g.terminals;
    j["start"] = g.start;
    j["allows_empty"] = g.allows_empty;
    json rules = json::array();
    for (const auto& [a, b, c] : g.binary_rules)
        rules.push_back({{"lhs", a}, {"rhs", {b, c}}});
    for (const auto& [a, t] : g.terminal_rules) rules.push_back({{"lhs", a}, {"rhs", {t}}});
    j["rules"] = rules;
    return j;
}

LmTable lm_from_json(const json& j) {
    LmTable lm;
    lm.name = j.value("name", "lm");
    lm.vocabulary = str_set(j, "vocabulary");
    lm.context_length = j.at("context_length").get<int>();
    lm.fallback = j.value("fallback", "");
    if (j.contains("delta"))
        for (const auto& r : j.at("delta")) {
            std::vector<std::string> window;
            for (const auto& t : r.at("window")) window.push_back(t.get<std::string>());
            if (static_cast<int>(window.size()) != lm.context_length)
                throw ParseError("lm window length must equal context_length");
            lm.delta[window] = str_field(r, "next");
        }
    return lm;
}

json lm_to_json(const LmTable& lm) {
    json j;
    j["kind"] = "lm";
    j["name"] = lm.name;
    j["vocabulary"] = lm.vocabulary;
    j["context_length"] = lm.context_length;
    j["fallback"] = lm.fallback;
    json rules = json::array();
    for (const auto& [window, next] : lm.delta)
        rules.push_back({{"window", window}, {"next", next}});
    j["delta"] = rules;
    return j;
}

} // namespace

Machine parse_machine_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid json: ") + e.what());
    }
    const std::string kind = str_field(j, "kind");
    try {
        if (kind == "tm") return tm_from_json(j);
        if (kind == "dpda") return dpda_from_json(j);
        if (kind == "fsm") return fsm_from_json(j);
        if (kind == "cnf_grammar") return cnf_from_json(j);
        if (kind == "lm") return lm_from_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + kind + " definition: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid ") + kind + " definition: " + e.what());
    }
    throw ParseError("unknown machine kind: " + kind);
}

Machine load_machine(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open machine file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_machine_json(ss.str());
}

std::string machine_to_json(const Machine& m) {
    json j = std::visit(
        [](const auto& machine) -> json {
            using T = std::decay_t<decltype(machine)>;
            if constexpr (std::is_same_v<T, TuringMachine>) return tm_to_json(machine);
            else if constexpr (std::is_same_v<T, Dpda>) return dpda_to_json(machine);
            else if constexpr (std::is_same_v<T, Fsm>) return fsm_to_json(machine);
            else if constexpr (std::is_same_v<T, CnfGrammar>) return cnf_to_json(machine);
            else return lm_to_json(machine);
        },
        m);
    return j.dump(2) + "\n";
}

const char* machine_kind(const Machine& m) {
    switch (m.index()) {
    case 0: return "tm";
    case 1: return "dpda";
    case 2: return "fsm";
    case 3: return "cnf_grammar";
    default: return "lm";
    }
}

Dag parse_dag_edge_list(const std::string& text) {
    Dag dag;
    std::map<std::string, int> ids;
    auto id_of = [&](const std::string& label) {
        auto it = ids.find(label);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(dag.labels.size());
        ids[label] = id;
        dag.labels.push_back(label);
        return id;
    };
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue; // blank line
        if (!(ls >> b) || (ls >> extra))
            throw ParseError("edge list line " + std::to_string(lineno) +
                             ": expected 'source target'");
        dag.edges.push_back({id_of(a), id_of(b)});
    }
    if (dag.labels.empty()) throw ParseError("edge list is empty");
    return dag;
}

Dag load_dag_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dag_edge_list(ss.str());
}

std::string mcg_to_edge_list(const Mcg& mcg) {
    std::string out = "# mcg: " + std::to_string(mcg.size()) + " nodes, " +
                      std::to_string(mcg.edge_count()) + " edges\n";
    for (int i = 0; i < mcg.size(); ++i)
        for (int j = i + 1; j < mcg.size(); ++j)
            out += mcg.labels[static_cast<std::size_t>(i)] + " " +
                   mcg.labels[static_cast<std::size_t>(j)] + "\n";
    return out;
}

std::string bmcg_to_edge_list(const Bmcg& b, const std::vector<std::string>& labels) {
    auto name = [&](int v) {
        const auto& node = b.nodes[static_cast<std::size_t>(v)];
        if (node.kind == Bmcg::Kind::proxy)
            return "proxy" + std::to_string(v) + "_of_" + std::to_string(node.owner);
        if (static_cast<std::size_t>(v) < labels.size()) return labels[static_cast<std::size_t>(v)];
        return "n" + std::to_string(v);
    };
    std::string out = "# bmcg: " + std::to_string(b.size()) + " nodes, " +
                      std::to_string(b.edge_total()) + " edges, bound " +
                      std::to_string(b.bound) + "\n";
    for (int v = 0; v < b.size(); ++v)
        for (int u : b.in_edges[static_cast<std::size_t>(v)]) out += name(u) + " " + name(v) + "\n";
    return out;
}

std::string csv_header() { return "variant,N,C,raw_ops,weighted_cost,wall_ms"; }

std::string csv_row(const ReportRow& row) {
    std::ostringstream os;
    os << row.variant << ',' << row.n << ',' << row.c << ',' << row.raw_ops << ','
       << row.weighted_cost << ',' << row.wall_ms;
    return os.str();
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string node_label(const QuestNode& n) {
    return dot_escape(n.goal.str()) + "\\n" + dot_escape(response_str(n.response));
}

} // namespace

std::string export_trace_dot(const QdpRunResult& run) {
    if (run.trace.empty()) throw std::invalid_argument("export_trace_dot: empty trace");
    std::ostringstream os;
    os << "digraph rollout {\n  rankdir=TB;\n  node [shape=box];\n";
    for (int v = 0; v < run.graph.size(); ++v) {
        os << "  n" << v << " [label=\"" << node_label(run.graph.node(v)) << "\"";
        if (v == run.graph.focus()) os << ", peripheries=2";
        os << "];\n";
    }
    // Label parent->child edges by the action that created the child.
    std::map<NodeId, std::string> edge_label;
    NodeId next_id = run.tree.root() + 1;
    for (const auto& ev : run.trace) {
        if (std::holds_alternative<DiscoverInput>(ev.action))
            edge_label[next_id++] = "in";
        else if (const auto* ds = std::get_if<DiscoverSubquest>(&ev.action))
            edge_label[next_id++] = ds->goal.tag == "q" ? "R" : "sub";
        else if (std::holds_alternative<Retrieve>(ev.action))
            edge_label[next_id++] = "ret";
    }
    for (int v = 0; v < run.graph.size(); ++v) {
        auto p = run.tree.parent(static_cast<NodeId>(v));
        if (!p) continue;
        os << "  n" << *p << " -> n" << v;
        auto it = edge_label.find(static_cast<NodeId>(v));
        if (it != edge_label.end()) os << " [label=\"" << it->second << "\"]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string export_trace_dot(const RunResult& run) {
    if (run.trace.empty()) throw std::invalid_argument("export_trace_dot: empty trace");
    std::ostringstream os;
    os << "digraph rollout {\n  rankdir=TB;\n  node [shape=box];\n";
    for (int v = 0; v < run.graph.size(); ++v) {
        os << "  n" << v << " [label=\"" << node_label(run.graph.node(v)) << "\"";
        if (v == run.graph.focus()) os << ", peripheries=2";
        os << "];\n";
    }
    std::set<std::pair<int, int>> seen;
    for (int v = 0; v < run.graph.size(); ++v)
        for (NodeId u : run.graph.neighbors(static_cast<NodeId>(v))) {
            int a = std::min(v, static_cast<int>(u)), b = std::max(v, static_cast<int>(u));
            if (seen.insert({a, b}).second)
                os << "  n" << a << " -> n" << b << " [dir=none];\n";
        }
    os << "}\n";
    return os.str();
}

} // namespace qg
