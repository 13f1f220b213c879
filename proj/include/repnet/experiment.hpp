#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "repnet/enumerate.hpp"
#include "repnet/errors.hpp"
#include "repnet/game.hpp"
#include "repnet/graph.hpp"
#include "repnet/random_regular.hpp"
#include "repnet/rng.hpp"

namespace repnet {

enum class Model { vanilla, gossip };

enum class GraphSource { random_per_run, fixed };

struct RunConfig {
    Model model = Model::vanilla;
    int n = 10;
    int k = 4;
    int m = 1;
    PayoffMatrix payoffs = PayoffMatrix::defaults();
    double horizon_r = 50.0;  // max plays per agent
    int runs = 1000;
    std::uint64_t master_seed = 1;
    GraphSource graph_source = GraphSource::random_per_run;
    int threads = 1;
};

// Run-averaged payoff curves on the plays-per-agent grid r_t = 2t/n.
// Each mean exists only where at least one run had it defined; counts and
// standard errors describe the averaged runs.
struct PayoffCurves {
    struct Point {
        double r = 0.0;
        std::optional<double> coop_mean;
        std::optional<double> cheat_mean;
        std::int64_t coop_runs = 0;
        std::int64_t cheat_runs = 0;
        std::optional<double> coop_stderr;
        std::optional<double> cheat_stderr;
    };
    std::vector<Point> points;
};

struct ThresholdResult {
    std::optional<double> r_star;

    bool operator==(const ThresholdResult&) const = default;
};

struct SweepRecord {
    std::string graph_id;
    double chi = 0.0;
    int m = 0;
    ThresholdResult threshold;
};

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

namespace detail {

inline void validate_config(const RunConfig& cfg, const Graph* fixed_graph) {
    if (cfg.n < 2) {
        throw invalid_parameter_error("group size must be at least 2");
    }
    if (cfg.m < 0 || cfg.m > cfg.n) {
        throw invalid_parameter_error("cheater count outside 0..n");
    }
    if (cfg.runs < 1) {
        throw invalid_parameter_error("need at least one run");
    }
    if (!(cfg.horizon_r > 0.0)) {
        throw invalid_parameter_error("horizon must be positive");
    }
    if (cfg.threads < 1) {
        throw invalid_parameter_error("thread count must be at least 1");
    }
    if (cfg.model == Model::vanilla) {
        if (fixed_graph != nullptr) {
            throw invalid_parameter_error(
                "the unstructured model takes no interaction graph");
        }
        return;
    }
    if (cfg.graph_source == GraphSource::fixed) {
        if (fixed_graph == nullptr) {
            throw invalid_parameter_error(
                "fixed graph source requires a graph");
        }
        if (fixed_graph->node_count() != cfg.n) {
            throw invalid_parameter_error("graph size does not match n");
        }
        const auto degree = fixed_graph->regular_degree();
        if (!degree.has_value()) {
            throw invalid_parameter_error("interaction graph must be regular");
        }
        if (*degree != cfg.k) {
            throw invalid_parameter_error(
                "graph degree " + std::to_string(*degree) +
                " does not match k=" + std::to_string(cfg.k));
        }
        if (!is_connected(*fixed_graph)) {
            throw invalid_parameter_error("interaction graph must be connected");
        }
    } else {
        if (fixed_graph != nullptr) {
            throw invalid_parameter_error(
                "random-per-run graph source takes no fixed graph");
        }
        if (cfg.k < 1 || cfg.k >= cfg.n || (cfg.n * cfg.k) % 2 != 0) {
            throw invalid_parameter_error(
                "no k-regular graph exists for n=" + std::to_string(cfg.n) +
                ", k=" + std::to_string(cfg.k));
        }
    }
}

// Runs `total` jobs on up to `threads` workers. Each job writes only its
// own slots, so scheduling cannot change results. The lowest-index
// exception wins, to keep error reporting deterministic too.
template <typename Job>
inline void parallel_runs(int total, int threads, Job&& job) {
    if (threads <= 1 || total <= 1) {
        for (int r = 0; r < total; ++r) job(r);
        return;
    }
    const int workers = std::min(threads, total);
    std::atomic<int> next{0};
    std::vector<std::pair<int, std::exception_ptr>> failures(
        static_cast<std::size_t>(workers), {total, nullptr});
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= total) return;
                try {
                    job(r);
                } catch (...) {
                    auto& slot = failures[static_cast<std::size_t>(w)];
                    if (r < slot.first) slot = {r, std::current_exception()};
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::pair<int, std::exception_ptr> first{total, nullptr};
    for (const auto& failure : failures) {
        if (failure.second && failure.first < first.first) first = failure;
    }
    if (first.second) std::rethrow_exception(first.second);
}

}  // namespace detail

inline int curve_step_count(const RunConfig& cfg) {
    return static_cast<int>(std::ceil(cfg.horizon_r * cfg.n / 2.0));
}

// cfg.runs independent simulations (fresh types each run; fresh graph each
// run when the source is random-per-run), recording the per-type payoff
// averages after every step and averaging them pointwise over the runs in
// which they are defined. Bit-identical for any thread count: per-run
// results land in per-run slots and are reduced in run order.
inline PayoffCurves run_curves(const RunConfig& cfg,
                               const Graph* fixed_graph = nullptr) {
    detail::validate_config(cfg, fixed_graph);
    const int steps = curve_step_count(cfg);
    const std::size_t cells =
        static_cast<std::size_t>(cfg.runs) * static_cast<std::size_t>(steps);
    constexpr double undefined = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> coop_vals(cells, undefined);
    std::vector<double> cheat_vals(cells, undefined);

    detail::parallel_runs(cfg.runs, cfg.threads, [&](int run) {
        Rng rng = seed_schedule(cfg.master_seed, static_cast<std::uint64_t>(run));
        Graph local(1);
        const Graph* g = fixed_graph;
        if (cfg.model == Model::gossip &&
            cfg.graph_source == GraphSource::random_per_run) {
            local = random_k_regular_connected(cfg.n, cfg.k, rng);
            g = &local;
        }
        SimulationState state = new_state(cfg.n, cfg.m, rng);
        const std::size_t base =
            static_cast<std::size_t>(run) * static_cast<std::size_t>(steps);
        for (int t = 0; t < steps; ++t) {
            if (cfg.model == Model::gossip) {
                step_gossip(state, *g, cfg.payoffs, rng);
            } else {
                step_vanilla(state, cfg.payoffs, rng);
            }
            const TypeAverages averages = type_average_payoffs(state);
            if (averages.coop_mean) coop_vals[base + t] = *averages.coop_mean;
            if (averages.cheat_mean) cheat_vals[base + t] = *averages.cheat_mean;
        }
    });

    PayoffCurves curves;
    curves.points.resize(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        auto& point = curves.points[static_cast<std::size_t>(t)];
        point.r = 2.0 * (t + 1) / cfg.n;
        // Welford accumulation in run order.
        double mean[2] = {0.0, 0.0};
        double m2[2] = {0.0, 0.0};
        std::int64_t count[2] = {0, 0};
        for (int run = 0; run < cfg.runs; ++run) {
            const std::size_t cell =
                static_cast<std::size_t>(run) * static_cast<std::size_t>(steps) +
                static_cast<std::size_t>(t);
            const double* vals[2] = {&coop_vals[cell], &cheat_vals[cell]};
            for (int ty = 0; ty < 2; ++ty) {
                const double v = *vals[ty];
                if (std::isnan(v)) continue;
                ++count[ty];
                const double delta = v - mean[ty];
                mean[ty] += delta / static_cast<double>(count[ty]);
                m2[ty] += delta * (v - mean[ty]);
            }
        }
        point.coop_runs = count[0];
        point.cheat_runs = count[1];
        if (count[0] > 0) point.coop_mean = mean[0];
        if (count[1] > 0) point.cheat_mean = mean[1];
        if (count[0] > 1) {
            point.coop_stderr = std::sqrt(
                m2[0] / static_cast<double>(count[0] - 1) /
                static_cast<double>(count[0]));
        }
        if (count[1] > 1) {
            point.cheat_stderr = std::sqrt(
                m2[1] / static_cast<double>(count[1] - 1) /
                static_cast<double>(count[1]));
        }
    }
    return curves;
}

// Smallest grid point where the cooperator mean meets or beats the cheater
// mean, both being defined; absent when they never cross in the horizon.
inline ThresholdResult threshold_from_curves(const PayoffCurves& curves) {
    if (curves.points.empty()) {
        throw invalid_parameter_error("curves must be nonempty");
    }
    for (const auto& point : curves.points) {
        if (point.coop_mean && point.cheat_mean &&
            *point.coop_mean >= *point.cheat_mean) {
            return ThresholdResult{point.r};
        }
    }
    return ThresholdResult{};
}

// One threshold per cheater count. Seeds branch per m from the master seed
// and are shared between models, so gossip/plain comparisons at equal m see
// the same schedule.
inline std::vector<std::pair<int, ThresholdResult>> sweep_m(
    const RunConfig& base, const std::vector<int>& m_values) {
    std::vector<std::pair<int, ThresholdResult>> out;
    out.reserve(m_values.size());
    for (const int m : m_values) {
        if (m < 1 || m > base.n - 1) {
            throw invalid_parameter_error("cheater count " + std::to_string(m) +
                                          " outside 1.." +
                                          std::to_string(base.n - 1));
        }
        RunConfig cfg = base;
        cfg.m = m;
        cfg.master_seed =
            derive_seed(base.master_seed, static_cast<std::uint64_t>(m));
        out.emplace_back(m, threshold_from_curves(run_curves(cfg)));
    }
    return out;
}

// One record per graph of the set: gossip on the fixed graph, cheater
// identities re-randomized every run. Per-graph seeds branch from the
// master seed by canonical key, independent of m, so sweeps at different m
// share the schedule.
inline std::vector<SweepRecord> sweep_clustering(
    const std::vector<GraphSetEntry>& graph_set, int m, const RunConfig& base) {
    if (graph_set.empty()) {
        throw invalid_parameter_error("graph set is empty");
    }
    const int n = graph_set.front().graph.node_count();
    const auto k = graph_set.front().graph.regular_degree();
    if (!k.has_value()) {
        throw invalid_parameter_error("graphs must be regular");
    }
    if (m < 1 || m > n - 1) {
        throw invalid_parameter_error("cheater count " + std::to_string(m) +
                                      " outside 1.." + std::to_string(n - 1));
    }
    std::vector<SweepRecord> out;
    out.reserve(graph_set.size());
    for (const auto& entry : graph_set) {
        if (entry.graph.node_count() != n ||
            entry.graph.regular_degree() != k) {
            throw invalid_parameter_error(
                "graph set mixes sizes or degrees (offending graph: " +
                entry.canonical_key + ")");
        }
        RunConfig cfg = base;
        cfg.model = Model::gossip;
        cfg.graph_source = GraphSource::fixed;
        cfg.n = n;
        cfg.k = *k;
        cfg.m = m;
        cfg.master_seed =
            derive_seed(base.master_seed, fnv1a64(entry.canonical_key));
        const PayoffCurves curves = run_curves(cfg, &entry.graph);
        out.push_back(SweepRecord{entry.canonical_key, entry.chi, m,
                                  threshold_from_curves(curves)});
    }
    return out;
}

struct RegressionInput {
    std::vector<std::pair<double, double>> points;
    std::size_t excluded = 0;  // records with no threshold
};

inline RegressionInput threshold_points(const std::vector<SweepRecord>& records) {
    RegressionInput input;
    input.points.reserve(records.size());
    for (const auto& record : records) {
        if (record.threshold.r_star) {
            input.points.emplace_back(record.chi, *record.threshold.r_star);
        } else {
            ++input.excluded;
        }
    }
    return input;
}

inline OlsFit ols_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) {
        throw degenerate_regression_error("need at least 2 points");
    }
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (const auto& [x, y] : points) {
        x_mean += x;
        y_mean += y;
    }
    x_mean /= static_cast<double>(points.size());
    y_mean /= static_cast<double>(points.size());
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
        syy += (y - y_mean) * (y - y_mean);
    }
    if (sxx == 0.0) {
        throw degenerate_regression_error(
            "all x values identical; no line is determined");
    }
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    if (syy == 0.0) {
        fit.r_squared = 1.0;  // flat data, flat fit
    } else {
        double residual = 0.0;
        for (const auto& [x, y] : points) {
            const double e = y - (fit.intercept + fit.slope * x);
            residual += e * e;
        }
        fit.r_squared = 1.0 - residual / syy;
        if (fit.r_squared < 0.0) fit.r_squared = 0.0;
        if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    }
    return fit;
}

}  // namespace repnet
