/* qg.cpp -- command-line front end: run constructions against their
 * oracles, benchmark the computation-graph simulations, transform DAGs
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qg/cgsim.hpp>
#include <qg/constructions.hpp>
#include <qg/io.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDisagree = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

long default_budget() {
    if (const char* env = std::getenv("QG_BUDGET")) {
        try {
            return std::stol(env);
        } catch (...) {
            std::cerr << "warning: ignoring unparsable QG_BUDGET\n";
        }
    }
    return 10000;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    return static_cast<bool>(out);
}

const char* verdict(bool accepted) { return accepted ? "accept" : "reject"; }

struct RunOutcome {
    bool sim_accept = false;
    bool oracle_accept = false;
    bool budget_hit = false;
    std::string dot;
};

int report(const std::string& name, const RunOutcome& out, const std::string& dot_path) {
    if (!dot_path.empty() && !out.dot.empty() && !write_file(dot_path, out.dot)) {
        std::cerr << "error: cannot write " << dot_path << "\n";
        return kExitInput;
    }
    if (out.budget_hit) {
        std::cout << name << ": budget exhausted";
        if (!dot_path.empty() && !out.dot.empty())
            std::cout << " (partial trace written to " << dot_path << ")";
        std::cout << "\n";
        return kExitBudget;
    }
    const bool agree = out.sim_accept == out.oracle_accept;
    std::cout << name << ": " << verdict(out.sim_accept) << " / oracle: "
              << verdict(out.oracle_accept) << " / " << (agree ? "AGREE" : "DISAGREE") << "\n";
    return agree ? kExitOk : kExitDisagree;
}

int cmd_run(const std::string& construction, const std::string& machine_path,
            const std::string& input_str, long budget, const std::string& dot_path) {
    qg::Machine machine = qg::load_machine(machine_path);
    std::vector<std::string> input = qg::symbols_of(input_str);
    RunOutcome out;

    if (construction == "tm-qg") {
        const auto* tm = std::get_if<qg::TuringMachine>(&machine);
        if (!tm) throw qg::ParseError("tm-qg needs a machine of kind tm");
        qg::TmQgConformance res = qg::simulate_tm_on_questgraph(*tm, input, budget);
        out.sim_accept = res.sim_outcome == qg::TmOutcome::accepted;
        out.oracle_accept = res.oracle_outcome == qg::TmOutcome::accepted;
        out.budget_hit = !res.comparable && !res.illegal;
        if (!dot_path.empty()) {
            qg::RunResult rr;
            rr.graph = res.graph;
            rr.trace = res.trace;
            out.dot = qg::export_trace_dot(rr);
        }
    } else if (construction == "dpda-fqdp") {
        const auto* d = std::get_if<qg::Dpda>(&machine);
        if (!d) throw qg::ParseError("dpda-fqdp needs a machine of kind dpda");
        qg::DpdaSimResult res = qg::simulate_dpda_on_fqdp(*d, input, budget);
        qg::DpdaResult oracle = qg::dpda_run(*d, input, budget);
        out.sim_accept = res.accepted;
        out.oracle_accept = oracle.outcome == qg::DpdaOutcome::accepted;
        out.budget_hit = res.budget_hit || oracle.outcome == qg::DpdaOutcome::budget_exhausted;
        if (!dot_path.empty()) out.dot = qg::export_trace_dot(res.run);
    } else if (construction == "cfl-nfqdp") {
        const auto* g = std::get_if<qg::CnfGrammar>(&machine);
        if (!g) throw qg::ParseError("cfl-nfqdp needs a machine of kind cnf_grammar");
        qg::CflSimResult res = qg::simulate_cfl_on_nfqdp(*g, input, budget);
        out.sim_accept = res.accepted;
        out.oracle_accept = qg::cyk_member(*g, input).member;
        out.budget_hit = res.budget_hit;
        if (!dot_path.empty()) out.dot = qg::export_trace_dot(res.run);
    } else if (construction == "tm-rqdp") {
        const auto* tm = std::get_if<qg::TuringMachine>(&machine);
        if (!tm) throw qg::ParseError("tm-rqdp needs a machine of kind tm");
        qg::RqdpTmResult res = qg::simulate_tm_on_rqdp(*tm, input, budget);
        out.sim_accept = res.sim_outcome == qg::TmOutcome::accepted;
        out.oracle_accept = res.oracle_outcome == qg::TmOutcome::accepted;
        out.budget_hit = !res.comparable && !res.illegal;
        if (!dot_path.empty()) out.dot = qg::export_trace_dot(res.run.run);
    } else if (construction == "lm-fsm") {
        const auto* f = std::get_if<qg::Fsm>(&machine);
        if (!f) throw qg::ParseError("lm-fsm needs a machine of kind fsm");
        qg::LmTable lm = qg::lm_from_fsm(*f);
        out.sim_accept = qg::lm_fsm_accepts(lm, *f, input);
        out.oracle_accept = qg::fsm_run(*f, input).accepted;
        if (!dot_path.empty())
            std::cerr << "warning: lm-fsm runs have no rollout graph to render\n";
    } else {
        throw qg::ParseError("unknown construction: " + construction);
    }
    return report(construction, out, construction == "lm-fsm" ? "" : dot_path);
}

qg::Mcg chain_mcg(int n) {
    qg::Dag d;
    for (int i = 0; i < n; ++i) d.labels.push_back("n" + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i) d.edges.push_back({i, i + 1});
    return qg::mcg_from_dag(d);
}

int cmd_bench(const std::string& variants_csv, const std::string& n_csv, int c, int cap,
              const std::string& csv_path) {
    std::vector<std::string> variants = split_list(variants_csv);
    std::vector<int> sizes;
    for (const auto& s : split_list(n_csv)) sizes.push_back(std::stoi(s));
    if (variants.empty() || sizes.empty()) {
        std::cerr << "error: bench needs nonempty variant and N lists\n";
        return kExitInput;
    }

    std::ostringstream csv;
    csv << qg::csv_header() << "\n";
    std::map<std::string, std::vector<qg::SimReport>> by_variant;
    for (const auto& variant : variants) {
        for (int n : sizes) {
            qg::SimReport rep;
            if (variant == "qg") {
                rep = qg::sim_questgraph(qg::bmcg_from_mcg(chain_mcg(n), c));
            } else if (variant == "rqdp") {
                rep = qg::sim_rqdp(chain_mcg(n), c);
            } else if (variant == "fqdp") {
                if (n > cap) {
                    std::cerr << "warning: fqdp N=" << n << " above the cap " << cap
                              << ", skipped\n";
                    continue;
                }
                rep = qg::sim_fqdp(qg::bmcg_from_mcg(chain_mcg(n), c), cap);
            } else {
                std::cerr << "error: unknown variant " << variant << " (use qg,rqdp,fqdp)\n";
                return kExitInput;
            }
            if (!rep.halted) {
                std::cerr << "error: " << variant << " N=" << n << " did not halt\n";
                return kExitBudget;
            }
            csv << qg::csv_row({rep.variant, rep.n, rep.c, rep.ops.raw_total(),
                                rep.ops.weighted_total(), rep.wall_ms})
                << "\n";
            by_variant[variant].push_back(rep);
        }
    }
    if (!write_file(csv_path, csv.str())) {
        std::cerr << "error: cannot write " << csv_path << "\n";
        return kExitInput;
    }

    for (const auto& [variant, reports] : by_variant) {
        std::cout << variant << ": " << reports.size() << " runs";
        if (reports.size() >= 5) {
            qg::GrowthFit fit = qg::growth_fit(reports);
            std::cout << ", log-log slope " << fit.slope
                      << (fit.superpolynomial ? " (super-polynomial)" : "");
        }
        std::cout << "\n";
    }
    std::cout << "wrote " << csv_path << "\n";
    return kExitOk;
}

int cmd_graph(const std::string& edges_path, int c, const std::string& emit,
              const std::string& out_path) {
    qg::Dag dag = qg::load_dag_edge_list(edges_path);
    qg::Mcg mcg;
    try {
        mcg = qg::mcg_from_dag(dag);
    } catch (const qg::CycleError& e) {
        std::cerr << "error: cycle through edge " << dag.labels[static_cast<std::size_t>(e.from)]
                  << " -> " << dag.labels[static_cast<std::size_t>(e.to)] << "\n";
        return kExitInput;
    }

    std::ostringstream out;
    qg::ProxyTotals totals = qg::total_proxy_count(mcg.size(), c);
    long long proxies_added = 0;
    if (emit == "mcg") {
        out << qg::mcg_to_edge_list(mcg);
    } else if (emit == "bmcg") {
        // Bounds the DAG's own in-degrees; the MCG numbers below give the
        // worst case for the same node count.
        qg::Bmcg b = qg::bound_dag(dag, c);
        proxies_added = b.size() - b.original_count;
        out << qg::bmcg_to_edge_list(b, dag.labels);
    } else {
        std::cerr << "error: --emit must be mcg or bmcg\n";
        return kExitInput;
    }
    out << "# stats: N=" << mcg.size() << " mcg_edges=" << mcg.edge_count();
    if (emit == "bmcg") out << " proxies_added=" << proxies_added;
    out << " mcg_proxies_closed_form=" << totals.closed_form
        << " mcg_proxies_brute_sum=" << totals.brute_sum << "\n";

    if (out_path.empty()) {
        std::cout << out.str();
    } else if (!write_file(out_path, out.str())) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitInput;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quest graph toolkit: agentic automata, constructions and benchmarks"};
    app.require_subcommand(1);

    std::string construction, machine_path, input_str, dot_path;
    long budget = default_budget();
    auto* run_cmd = app.add_subcommand("run", "run a construction against its oracle");
    run_cmd->add_option("construction", construction,
                        "one of tm-qg, dpda-fqdp, cfl-nfqdp, tm-rqdp, lm-fsm")
        ->required();
    run_cmd->add_option("machine", machine_path, "machine definition file (json)")->required();
    run_cmd->add_option("input", input_str, "input string")->default_val("");
    run_cmd->add_option("--budget", budget, "step budget");
    run_cmd->add_option("--trace-dot", dot_path, "write the rollout as DOT");

    std::string variants = "qg,rqdp";
    std::string sizes = "8,16,32,64";
    int bench_c = 4;
    int cap = 16;
    std::string csv_path;
    auto* bench_cmd = app.add_subcommand("bench", "operation-count benchmark over chain graphs");
    bench_cmd->add_option("--variants", variants, "comma list of qg,rqdp,fqdp");
    bench_cmd->add_option("--N", sizes, "comma list of node counts");
    bench_cmd->add_option("--C", bench_c, "context bound");
    bench_cmd->add_option("--cap", cap, "node cap for the exponential fqdp variant");
    bench_cmd->add_option("csv", csv_path, "output csv path")->required();

    std::string edges_path, emit = "mcg", graph_out;
    int graph_c = 2;
    auto* graph_cmd = app.add_subcommand("graph", "transform a DAG edge list");
    graph_cmd->add_option("edges", edges_path, "edge-list file")->required();
    graph_cmd->add_option("--C", graph_c, "in-degree bound for bmcg");
    graph_cmd->add_option("--emit", emit, "mcg or bmcg");
    graph_cmd->add_option("--output", graph_out, "output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (run_cmd->parsed())
            return cmd_run(construction, machine_path, input_str, budget, dot_path);
        if (bench_cmd->parsed()) return cmd_bench(variants, sizes, bench_c, cap, csv_path);
        if (graph_cmd->parsed()) return cmd_graph(edges_path, graph_c, emit, graph_out);
    } catch (const qg::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
