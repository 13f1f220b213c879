// Command-line front end: enumeration, clustering tables, payoff-curve
// thresholds, and the sweeps behind the cooperation-vs-clustering results.
// Every output file gets a JSON sidecar with the resolved configuration so
// any artifact can be regenerated from its sidecar alone.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repnet/canonical.hpp"
#include "repnet/enumerate.hpp"
#include "repnet/errors.hpp"
#include "repnet/experiment.hpp"
#include "repnet/game.hpp"
#include "repnet/graph.hpp"
#include "repnet/graph6.hpp"
#include "repnet/text.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_unexpected = 1;
constexpr int exit_parameter = 2;
constexpr int exit_io = 3;
constexpr int exit_capacity = 4;
constexpr int exit_generation = 5;

struct PayoffFlags {
    double cc = 1.0;
    double cd = -1.6;
    double dc = 1.5;
    double dd = 0.0;
};

void add_payoff_flags(CLI::App* cmd, PayoffFlags& flags) {
    cmd->add_option("--pcc", flags.cc, "Payoff when both cooperate")
        ->capture_default_str();
    cmd->add_option("--pcd", flags.cd, "Cooperator's payoff against a cheater")
        ->capture_default_str();
    cmd->add_option("--pdc", flags.dc, "Cheater's payoff against a cooperator")
        ->capture_default_str();
    cmd->add_option("--pdd", flags.dd, "Payoff when both cheat")
        ->capture_default_str();
}

repnet::PayoffMatrix resolve_payoffs(const PayoffFlags& flags) {
    repnet::PayoffMatrix payoffs{flags.cc, flags.cd, flags.dc, flags.dd};
    if (!payoffs.is_cooperation_dilemma()) {
        std::fprintf(stderr,
                     "warning: payoffs do not satisfy the cooperation-dilemma "
                     "inequalities (1 < pdc < 2 and pcd < pdd < pcc)\n");
    }
    return payoffs;
}

ordered_json payoff_json(const repnet::PayoffMatrix& p) {
    return ordered_json{{"cc", p.cc}, {"cd", p.cd}, {"dc", p.dc}, {"dd", p.dd}};
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw repnet::io_error("cannot open " + path + " for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw repnet::io_error("failed writing " + path);
    }
}

// Sits next to every output file; the full resolved configuration plus a
// short results summary. Thread count is deliberately not recorded: it can
// never affect output bytes.
void write_sidecar(const std::string& out_path, const ordered_json& doc) {
    write_file(out_path + ".json", doc.dump(2) + "\n");
}

struct NamedGraph {
    std::string token;
    repnet::Graph graph;
};

std::vector<NamedGraph> load_graph6_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw repnet::io_error("cannot open " + path + " for reading");
    }
    std::vector<NamedGraph> graphs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            graphs.push_back(NamedGraph{line, repnet::graph6_decode(line)});
        } catch (const repnet::parse_error& e) {
            throw repnet::parse_error(
                path + ":" + std::to_string(line_no) + ": " + e.what(),
                e.byte_offset());
        }
    }
    if (graphs.empty()) {
        throw repnet::parse_error(path + ": no graphs found", 0);
    }
    return graphs;
}

std::string model_name(repnet::Model model) {
    return model == repnet::Model::vanilla ? "vanilla" : "gossip";
}

repnet::Model parse_model(const std::string& name) {
    if (name == "vanilla") return repnet::Model::vanilla;
    if (name == "gossip") return repnet::Model::gossip;
    throw repnet::invalid_parameter_error("unknown model '" + name + "'");
}

// ---- enumerate ------------------------------------------------------------

struct EnumerateOpts {
    int n = 10;
    int k = 4;
    std::string out;
    int threads = 1;
};

int cmd_enumerate(const EnumerateOpts& opt) {
    const auto set = repnet::enumerate_k_regular_connected(opt.n, opt.k);
    std::string body;
    for (const auto& entry : set) {
        body += entry.canonical_key;
        body += '\n';
    }
    write_file(opt.out, body);
    ordered_json doc;
    doc["command"] = "enumerate";
    doc["config"] = {{"n", opt.n}, {"k", opt.k}, {"out", opt.out}};
    doc["results"] = {{"count", set.size()}};
    write_sidecar(opt.out, doc);
    std::printf("%zu\n", set.size());
    return exit_ok;
}

// ---- clustering -----------------------------------------------------------

struct ClusteringOpts {
    std::string graphs;
    std::string out;
};

int cmd_clustering(const ClusteringOpts& opt) {
    const auto graphs = load_graph6_file(opt.graphs);
    std::string body = "graph_id,chi,triangles\n";
    double chi_min = 1.0;
    double chi_max = 0.0;
    for (const auto& named : graphs) {
        const double chi = repnet::average_clustering(
            named.graph, [&](const std::string& message) {
                std::fprintf(stderr, "warning: %s: %s\n", named.token.c_str(),
                             message.c_str());
            });
        chi_min = std::min(chi_min, chi);
        chi_max = std::max(chi_max, chi);
        body += named.token;
        body += ',';
        body += repnet::format_number(chi);
        body += ',';
        for (int v = 0; v < named.graph.node_count(); ++v) {
            if (v > 0) body += ';';
            body += std::to_string(repnet::local_triangle_count(named.graph, v));
        }
        body += '\n';
    }
    write_file(opt.out, body);
    ordered_json doc;
    doc["command"] = "clustering";
    doc["config"] = {{"graphs", opt.graphs}, {"out", opt.out}};
    doc["results"] = {{"count", graphs.size()},
                      {"chi_min", chi_min},
                      {"chi_max", chi_max}};
    write_sidecar(opt.out, doc);
    std::printf("%zu graphs, chi in [%s, %s]\n", graphs.size(),
                repnet::format_number(chi_min).c_str(),
                repnet::format_number(chi_max).c_str());
    return exit_ok;
}

// ---- threshold ------------------------------------------------------------

struct ThresholdOpts {
    std::string model = "vanilla";
    int n = 10;
    int k = 4;
    int m = 1;
    int runs = 1000;
    double horizon = 50.0;
    std::uint64_t seed = 1;
    std::string graphs;  // optional fixed graph for the gossip model
    std::string out;
    int threads = 1;
    PayoffFlags payoffs;
};

int cmd_threshold(const ThresholdOpts& opt) {
    repnet::RunConfig cfg;
    cfg.model = parse_model(opt.model);
    cfg.n = opt.n;
    cfg.k = opt.k;
    cfg.m = opt.m;
    cfg.runs = opt.runs;
    cfg.horizon_r = opt.horizon;
    cfg.master_seed = opt.seed;
    cfg.threads = opt.threads;
    cfg.payoffs = resolve_payoffs(opt.payoffs);

    std::optional<repnet::Graph> fixed;
    if (!opt.graphs.empty()) {
        if (cfg.model != repnet::Model::gossip) {
            throw repnet::invalid_parameter_error(
                "--graphs applies to the gossip model only");
        }
        const auto graphs = load_graph6_file(opt.graphs);
        if (graphs.size() != 1) {
            throw repnet::invalid_parameter_error(
                "fixed graph source expects exactly one graph, " + opt.graphs +
                " has " + std::to_string(graphs.size()));
        }
        fixed = graphs.front().graph;
        cfg.graph_source = repnet::GraphSource::fixed;
    }

    const auto curves =
        repnet::run_curves(cfg, fixed ? &*fixed : nullptr);
    const auto threshold = repnet::threshold_from_curves(curves);

    std::string body = "r,coop_mean,cheat_mean\n";
    for (const auto& point : curves.points) {
        body += repnet::format_number(point.r);
        body += ',';
        body += repnet::format_number(point.coop_mean);
        body += ',';
        body += repnet::format_number(point.cheat_mean);
        body += '\n';
    }
    write_file(opt.out, body);

    ordered_json doc;
    doc["command"] = "threshold";
    doc["config"] = {{"model", opt.model},
                     {"n", opt.n},
                     {"k", opt.k},
                     {"m", opt.m},
                     {"runs", opt.runs},
                     {"horizon", opt.horizon},
                     {"seed", opt.seed},
                     {"graphs", opt.graphs.empty()
                                    ? ordered_json(nullptr)
                                    : ordered_json(opt.graphs)},
                     {"out", opt.out},
                     {"payoffs", payoff_json(cfg.payoffs)}};
    doc["results"] = {{"steps", curves.points.size()},
                      {"r_star", threshold.r_star
                                     ? ordered_json(*threshold.r_star)
                                     : ordered_json(nullptr)}};
    write_sidecar(opt.out, doc);
    std::printf("r_star,%s\n", repnet::format_number(threshold.r_star).c_str());
    return exit_ok;
}

// ---- sweep-m ----------------------------------------------------------------

struct SweepMOpts {
    std::string model = "both";
    int n = 10;
    int k = 4;
    std::vector<int> m_values;
    int runs = 1000;
    double horizon = 50.0;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
    PayoffFlags payoffs;
};

int cmd_sweep_m(const SweepMOpts& opt) {
    std::vector<repnet::Model> models;
    if (opt.model == "both") {
        models = {repnet::Model::vanilla, repnet::Model::gossip};
    } else {
        models = {parse_model(opt.model)};
    }
    std::vector<int> m_values = opt.m_values;
    if (m_values.empty()) {
        for (int m = 1; m <= opt.n - 1; ++m) m_values.push_back(m);
    }

    repnet::RunConfig base;
    base.n = opt.n;
    base.k = opt.k;
    base.runs = opt.runs;
    base.horizon_r = opt.horizon;
    base.master_seed = opt.seed;
    base.threads = opt.threads;
    base.payoffs = resolve_payoffs(opt.payoffs);

    std::string body = "m,model,r_star\n";
    std::size_t rows = 0;
    for (const auto model : models) {
        base.model = model;
        const auto results = repnet::sweep_m(base, m_values);
        for (const auto& [m, threshold] : results) {
            body += std::to_string(m);
            body += ',';
            body += model_name(model);
            body += ',';
            body += repnet::format_number(threshold.r_star);
            body += '\n';
            ++rows;
        }
    }
    write_file(opt.out, body);

    ordered_json doc;
    doc["command"] = "sweep-m";
    doc["config"] = {{"model", opt.model},
                     {"n", opt.n},
                     {"k", opt.k},
                     {"m", m_values},
                     {"runs", opt.runs},
                     {"horizon", opt.horizon},
                     {"seed", opt.seed},
                     {"out", opt.out},
                     {"payoffs", payoff_json(base.payoffs)}};
    doc["results"] = {{"rows", rows}};
    write_sidecar(opt.out, doc);
    std::printf("%zu rows\n", rows);
    return exit_ok;
}

// ---- sweep-clustering -------------------------------------------------------

struct SweepClusteringOpts {
    std::string graphs;
    std::vector<int> m_values{1};
    int runs = 1000;
    double horizon = 50.0;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
    PayoffFlags payoffs;
};

int cmd_sweep_clustering(const SweepClusteringOpts& opt) {
    const auto named = load_graph6_file(opt.graphs);
    std::vector<repnet::GraphSetEntry> set;
    set.reserve(named.size());
    for (const auto& entry : named) {
        set.push_back(repnet::GraphSetEntry{
            entry.graph, repnet::canonical_key(entry.graph),
            repnet::average_clustering(entry.graph)});
    }

    repnet::RunConfig base;
    base.runs = opt.runs;
    base.horizon_r = opt.horizon;
    base.master_seed = opt.seed;
    base.threads = opt.threads;
    base.payoffs = resolve_payoffs(opt.payoffs);

    std::string body = "graph_id,chi,m,r_star\n";
    ordered_json fits = ordered_json::array();
    for (const int m : opt.m_values) {
        const auto records = repnet::sweep_clustering(set, m, base);
        for (const auto& record : records) {
            body += record.graph_id;
            body += ',';
            body += repnet::format_number(record.chi);
            body += ',';
            body += std::to_string(record.m);
            body += ',';
            body += repnet::format_number(record.threshold.r_star);
            body += '\n';
        }
        const auto input = repnet::threshold_points(records);
        const auto fit = repnet::ols_fit(input.points);
        fits.push_back(ordered_json{{"m", m},
                                    {"slope", fit.slope},
                                    {"intercept", fit.intercept},
                                    {"r_squared", fit.r_squared},
                                    {"points_used", input.points.size()},
                                    {"excluded", input.excluded}});
        std::printf("m=%d slope=%s intercept=%s r_squared=%s excluded=%zu\n", m,
                    repnet::format_number(fit.slope).c_str(),
                    repnet::format_number(fit.intercept).c_str(),
                    repnet::format_number(fit.r_squared).c_str(),
                    input.excluded);
    }
    write_file(opt.out, body);

    ordered_json doc;
    doc["command"] = "sweep-clustering";
    doc["config"] = {{"graphs", opt.graphs},
                     {"m", opt.m_values},
                     {"runs", opt.runs},
                     {"horizon", opt.horizon},
                     {"seed", opt.seed},
                     {"out", opt.out},
                     {"payoffs", payoff_json(base.payoffs)}};
    doc["results"] = {{"graphs", set.size()}, {"ols", fits}};
    write_sidecar(opt.out, doc);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "repnet: repeated prisoner's-dilemma simulations with reputation and "
        "gossip on k-regular networks"};
    app.require_subcommand(1);

    EnumerateOpts enum_opts;
    auto* enum_cmd = app.add_subcommand(
        "enumerate",
        "Enumerate connected k-regular graphs up to isomorphism (graph6 out)");
    enum_cmd->add_option("--n", enum_opts.n, "Number of nodes")
        ->capture_default_str();
    enum_cmd->add_option("--k", enum_opts.k, "Degree")->capture_default_str();
    enum_cmd->add_option("--out", enum_opts.out, "Output graph6 file")
        ->required();
    enum_cmd->add_option("--threads", enum_opts.threads, "Worker cap")
        ->capture_default_str();

    ClusteringOpts clus_opts;
    auto* clus_cmd = app.add_subcommand(
        "clustering", "Clustering coefficients and triangle counts per graph");
    clus_cmd->add_option("--graphs", clus_opts.graphs, "Input graph6 file")
        ->required();
    clus_cmd->add_option("--out", clus_opts.out, "Output CSV file")->required();

    ThresholdOpts thr_opts;
    auto* thr_cmd = app.add_subcommand(
        "threshold",
        "Run-averaged payoff curves and the cooperation threshold");
    thr_cmd->add_option("--model", thr_opts.model, "vanilla or gossip")
        ->capture_default_str();
    thr_cmd->add_option("--n", thr_opts.n, "Group size")->capture_default_str();
    thr_cmd->add_option("--k", thr_opts.k, "Degree (gossip model)")
        ->capture_default_str();
    thr_cmd->add_option("--m", thr_opts.m, "Number of cheaters")
        ->capture_default_str();
    thr_cmd->add_option("--runs", thr_opts.runs, "Monte Carlo repetitions")
        ->capture_default_str();
    thr_cmd->add_option("--horizon", thr_opts.horizon, "Max plays per agent")
        ->capture_default_str();
    thr_cmd->add_option("--seed", thr_opts.seed, "Master seed")
        ->capture_default_str();
    thr_cmd->add_option("--graphs", thr_opts.graphs,
                        "graph6 file with one fixed interaction graph");
    thr_cmd->add_option("--out", thr_opts.out, "Output CSV file")->required();
    thr_cmd->add_option("--threads", thr_opts.threads, "Worker cap")
        ->capture_default_str();
    add_payoff_flags(thr_cmd, thr_opts.payoffs);

    SweepMOpts swm_opts;
    auto* swm_cmd = app.add_subcommand(
        "sweep-m", "Cooperation threshold as a function of the cheater count");
    swm_cmd->add_option("--model", swm_opts.model, "vanilla, gossip, or both")
        ->capture_default_str();
    swm_cmd->add_option("--n", swm_opts.n, "Group size")->capture_default_str();
    swm_cmd->add_option("--k", swm_opts.k, "Degree (gossip model)")
        ->capture_default_str();
    swm_cmd->add_option("--m", swm_opts.m_values,
                        "Cheater counts (comma separated; default 1..n-1)")
        ->delimiter(',');
    swm_cmd->add_option("--runs", swm_opts.runs, "Monte Carlo repetitions")
        ->capture_default_str();
    swm_cmd->add_option("--horizon", swm_opts.horizon, "Max plays per agent")
        ->capture_default_str();
    swm_cmd->add_option("--seed", swm_opts.seed, "Master seed")
        ->capture_default_str();
    swm_cmd->add_option("--out", swm_opts.out, "Output CSV file")->required();
    swm_cmd->add_option("--threads", swm_opts.threads, "Worker cap")
        ->capture_default_str();
    add_payoff_flags(swm_cmd, swm_opts.payoffs);

    SweepClusteringOpts swc_opts;
    auto* swc_cmd = app.add_subcommand(
        "sweep-clustering",
        "Cooperation threshold per graph of a set, with the OLS fit vs chi");
    swc_cmd->add_option("--graphs", swc_opts.graphs, "Input graph6 file")
        ->required();
    swc_cmd->add_option("--m", swc_opts.m_values,
                        "Cheater counts (comma separated)")
        ->delimiter(',');
    swc_cmd->add_option("--runs", swc_opts.runs, "Monte Carlo repetitions")
        ->capture_default_str();
    swc_cmd->add_option("--horizon", swc_opts.horizon, "Max plays per agent")
        ->capture_default_str();
    swc_cmd->add_option("--seed", swc_opts.seed, "Master seed")
        ->capture_default_str();
    swc_cmd->add_option("--out", swc_opts.out, "Output CSV file")->required();
    swc_cmd->add_option("--threads", swc_opts.threads, "Worker cap")
        ->capture_default_str();
    add_payoff_flags(swc_cmd, swc_opts.payoffs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_parameter;
    }

    try {
        if (*enum_cmd) return cmd_enumerate(enum_opts);
        if (*clus_cmd) return cmd_clustering(clus_opts);
        if (*thr_cmd) return cmd_threshold(thr_opts);
        if (*swm_cmd) return cmd_sweep_m(swm_opts);
        if (*swc_cmd) return cmd_sweep_clustering(swc_opts);
    } catch (const repnet::invalid_parameter_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_parameter;
    } catch (const repnet::degenerate_regression_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_parameter;
    } catch (const repnet::capacity_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_capacity;
    } catch (const repnet::generation_failure_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_generation;
    } catch (const repnet::parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_io;
    } catch (const repnet::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_io;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return exit_unexpected;
    }
    return exit_unexpected;
}
