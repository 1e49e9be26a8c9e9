#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dda/consensus.hpp"
#include "dda/cost_model.hpp"
#include "dda/dda_core.hpp"
#include "dda/graph.hpp"
#include "dda/instance_io.hpp"
#include "dda/schedule.hpp"

namespace dda {

// Configuration problems are reported with this type so the CLI can map
// them to its config-error exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TopologySpec {
    std::string kind = "complete";  // "complete" | "regular" | "ring"
    int degree = 0;                 // regular only
    std::uint64_t seed = 0;
};

struct SimConfig {
    ProblemSpec problem;
    TopologySpec topology;
    Schedule schedule = Schedule::every();

    std::optional<double> step_scale;  // A; derived from the regime formula when absent
    double step_exponent = 0.5;        // q

    double r = 0.0;  // communication/computation tradeoff ratio

    // Stopping conditions; at least one must be present. target_gap stops
    // at avg_F <= F* + gap and needs an instance with a certified F*;
    // target_value is an absolute avg_F threshold.
    std::optional<long> max_iters;
    std::optional<double> target_gap;
    std::optional<double> target_value;
    std::optional<double> time_budget;
    bool stop_on_target = true;

    long record_every = 1;
    int workers = 1;

    // Collects every problem in one pass so the CLI can report them together.
    // Generation fields are not checked when an instance file supplies the
    // data; the loader validates the file instead.
    std::vector<std::string> validation_errors() const {
        std::vector<std::string> errs;
        const bool from_file = !problem.instance_file.empty();
        if (!from_file) {
            if (problem.kind != "quadmax" && problem.kind != "metric")
                errs.push_back("problem: kind must be 'quadmax' or 'metric', got '" +
                               problem.kind + "'");
            if (problem.dim < 1) errs.push_back("problem: dim must be >= 1");
            if (problem.nodes < 1) errs.push_back("problem: nodes must be >= 1");
            if (problem.data_points < 1) errs.push_back("problem: data_points must be >= 1");
            if (problem.nodes >= 1 && problem.data_points >= 1 &&
                problem.data_points % problem.nodes != 0)
                errs.push_back("problem: nodes must divide data_points");
        }
        if (topology.kind != "complete" && topology.kind != "regular" && topology.kind != "ring")
            errs.push_back("topology: kind must be 'complete', 'regular', or 'ring', got '" +
                           topology.kind + "'");
        if (topology.kind == "regular" && !from_file) {
            if (topology.degree < 1 || topology.degree >= problem.nodes)
                errs.push_back("topology: regular graphs need 1 <= degree < nodes");
            else if ((static_cast<long long>(problem.nodes) * topology.degree) % 2 != 0)
                errs.push_back("topology: regular graphs need nodes*degree even");
        }
        if (step_scale && *step_scale <= 0.0) errs.push_back("step_scale must be positive");
        if (step_exponent <= 0.0 || step_exponent >= 1.0)
            errs.push_back("step_exponent must lie in (0, 1)");
        if (r < 0.0) errs.push_back("r must be >= 0");
        if (!max_iters && !target_gap && !target_value && !time_budget)
            errs.push_back("at least one stopping condition is required "
                           "(max_iters, target_gap, target_value, or time_budget)");
        if (max_iters && *max_iters < 1) errs.push_back("max_iters must be >= 1");
        if (target_gap && *target_gap <= 0.0) errs.push_back("target_gap must be positive");
        if (time_budget && *time_budget <= 0.0) errs.push_back("time_budget must be positive");
        if (target_gap && target_value)
            errs.push_back("target_gap and target_value are mutually exclusive");
        if (record_every < 1) errs.push_back("record_every must be >= 1");
        if (workers < 1) errs.push_back("workers must be >= 1");
        return errs;
    }

    void validate() const {
        const auto errs = validation_errors();
        if (errs.empty()) return;
        std::ostringstream out;
        out << "invalid config:";
        for (const auto& e : errs) out << "\n  - " << e;
        throw ConfigError(out.str());
    }
};

struct TraceRow {
    long t = 0;
    double virtual_time = 0.0;
    double avg_F = 0.0;
    double max_F = 0.0;
    double max_net_err = 0.0;
    long comm_rounds = 0;
    double max_subgrad_norm = 0.0;
};

struct Trace {
    std::vector<TraceRow> rows;
    long iterations = 0;
    long comm_rounds = 0;
    double virtual_time = 0.0;
    double final_avg_F = std::numeric_limits<double>::quiet_NaN();
    double f_star = std::numeric_limits<double>::quiet_NaN();

    bool target_reached = false;
    long iters_to_target = -1;
    double time_to_target = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Static-partition fork/join helper. Results are bit-identical for any
// worker count because each node's arithmetic never depends on which
// thread runs it and all reductions happen on the caller thread in node
// order.
class WorkerPool {
public:
    WorkerPool(int workers, int items) : items_(items) {
        const int usable = std::max(1, std::min(workers, items));
        if (usable <= 1) return;
        threads_.reserve(usable);
        for (int w = 0; w < usable; ++w) {
            const int lo = static_cast<int>(static_cast<long>(items_) * w / usable);
            const int hi = static_cast<int>(static_cast<long>(items_) * (w + 1) / usable);
            threads_.emplace_back([this, lo, hi] { worker_loop(lo, hi); });
        }
    }

    ~WorkerPool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            shutdown_ = true;
        }
        start_.notify_all();
        for (auto& t : threads_) t.join();
    }

    void run(const std::function<void(int)>& fn) {
        if (threads_.empty()) {
            for (int i = 0; i < items_; ++i) fn(i);
            return;
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            fn_ = &fn;
            error_ = nullptr;
            pending_ = static_cast<int>(threads_.size());
            ++generation_;
        }
        start_.notify_all();
        std::unique_lock<std::mutex> lock(mutex_);
        done_.wait(lock, [this] { return pending_ == 0; });
        fn_ = nullptr;
        if (error_) std::rethrow_exception(error_);
    }

private:
    void worker_loop(int lo, int hi) {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(int)>* fn = nullptr;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                start_.wait(lock, [&] { return shutdown_ || generation_ != seen; });
                if (shutdown_) return;
                seen = generation_;
                fn = fn_;
            }
            try {
                for (int i = lo; i < hi; ++i) (*fn)(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex_);
                if (!error_) error_ = std::current_exception();
            }
            {
                std::lock_guard<std::mutex> lock(mutex_);
                if (--pending_ == 0) done_.notify_one();
            }
        }
    }

    int items_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_, done_;
    const std::function<void(int)>* fn_ = nullptr;
    std::exception_ptr error_;
    int pending_ = 0;
    std::uint64_t generation_ = 0;
    bool shutdown_ = false;
};

}  // namespace detail

struct SimSetup {
    std::unique_ptr<ObjectiveOracle> oracle;
    Graph graph;
    ConsensusMatrix matrix;
    SpectralInfo spectral;
    int degree = 0;
};

inline SimSetup prepare(const SimConfig& config) {
    config.validate();
    SimSetup setup;
    setup.oracle = make_oracle(config.problem);
    const int n = setup.oracle->node_count();
    if (config.topology.kind == "complete") {
        setup.graph = complete_graph(n);
    } else if (config.topology.kind == "ring") {
        setup.graph = ring_graph(n);
    } else {
        setup.graph = random_regular_graph(n, config.topology.degree, config.topology.seed);
    }
    setup.matrix = metropolis_matrix(setup.graph);
    setup.spectral = spectral_info(setup.matrix);
    setup.degree = n > 1 ? setup.graph.degree(0) : 0;
    return setup;
}

// Bulk-synchronous DDA round loop under the virtual clock. Every round
// costs 1/n; rounds with a consensus exchange add k*r. Function values for
// the trace are bookkeeping and are never charged to the clock.
inline Trace run_simulation(const SimConfig& config, const ObjectiveOracle& oracle,
                            const ConsensusMatrix& matrix, int degree, double lambda2) {
    config.validate();
    const int n = oracle.node_count();
    if (matrix.size() != n)
        throw ConfigError("consensus matrix size does not match the problem's node count");

    Trace trace;
    if (oracle.reference_optimum()) trace.f_star = *oracle.reference_optimum();

    std::optional<double> target_abs;
    if (config.target_value) target_abs = *config.target_value;
    if (config.target_gap) {
        if (!oracle.reference_optimum())
            throw ConfigError("target_gap needs an instance with a certified optimum; "
                              "use target_value or a quadmax instance");
        target_abs = *oracle.reference_optimum() + *config.target_gap;
    }

    const double step_scale =
        config.step_scale ? *config.step_scale
                          : optimal_step_scale(config.schedule, oracle.lipschitz(),
                                               oracle.radius(), lambda2);
    const StepSize step{step_scale, config.step_exponent};

    std::vector<Eigen::VectorXd> z_prev(n), z_cur(n), x(n), x_hat(n), grads(n);
    const Eigen::VectorXd x0 = oracle.project(Eigen::VectorXd::Zero(oracle.dim()));
    for (int i = 0; i < n; ++i) {
        z_prev[i] = Eigen::VectorXd::Zero(oracle.dim());
        x[i] = x0;
        x_hat[i] = x0;
    }
    std::vector<double> node_F(n, 0.0);

    detail::WorkerPool pool(config.workers, n);
    ScheduleCursor cursor(config.schedule);

    long comm_rounds = 0;
    double max_grad_norm = 0.0;

    auto clock_at = [&](long t, long comms) {
        return static_cast<double>(t) / n + static_cast<double>(comms) * degree * config.r;
    };

    bool row_pending = false;
    TraceRow last_row;
    auto flush_row = [&] {
        if (row_pending) {
            trace.rows.push_back(last_row);
            row_pending = false;
        }
    };

    for (long t = 1;; ++t) {
        if (config.max_iters && t > *config.max_iters) break;
        const bool comm_now = cursor.advance();
        if (config.time_budget &&
            clock_at(t, comm_rounds + (comm_now ? 1 : 0)) > *config.time_budget + 1e-12)
            break;

        // Subgradients at x(t-1), one oracle call per node per round.
        pool.run([&](int i) { grads[i] = oracle.subgradient(i, x[i]); });

        if (comm_now) {
            ++comm_rounds;
            pool.run([&](int i) {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(oracle.dim());
                for (int j = 0; j < n; ++j) acc += matrix.weights(i, j) * z_prev[j];
                z_cur[i] = acc + grads[i];
            });
        } else {
            pool.run([&](int i) { z_cur[i] = z_prev[i] + grads[i]; });
        }

        // x(t) = project(-a(t-1) z(t)) with a(0) taken as a(1).
        const double a = step.at(std::max<long>(t - 1, 1));
        pool.run([&](int i) {
            x[i] = oracle.project(-a * z_cur[i]);
            x_hat[i] = running_average(x_hat[i], x[i], t);
            node_F[i] = oracle.eval_global(x_hat[i]);
        });

        double avg_F = 0.0, max_F = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            avg_F += node_F[i];
            max_F = std::max(max_F, node_F[i]);
        }
        avg_F /= n;
        for (int i = 0; i < n; ++i)
            max_grad_norm = std::max(max_grad_norm, grads[i].norm());
        const NetworkError net = network_error(z_cur);

        if (!std::isfinite(avg_F) || !std::isfinite(net.max))
            throw std::runtime_error("simulation diverged at round " + std::to_string(t) +
                                     "; reduce the step scale");

        trace.iterations = t;
        trace.comm_rounds = comm_rounds;
        trace.virtual_time = clock_at(t, comm_rounds);
        trace.final_avg_F = avg_F;

        last_row = TraceRow{t,     trace.virtual_time, avg_F, max_F, net.max,
                            comm_rounds, max_grad_norm};
        row_pending = true;
        if (t % config.record_every == 0) flush_row();

        if (target_abs && !trace.target_reached && avg_F <= *target_abs) {
            trace.target_reached = true;
            trace.iters_to_target = t;
            trace.time_to_target = trace.virtual_time;
            if (config.stop_on_target) break;
        }

        std::swap(z_prev, z_cur);
    }
    flush_row();
    return trace;
}

inline Trace run_simulation(const SimConfig& config) {
    SimSetup setup = prepare(config);
    return run_simulation(config, *setup.oracle, setup.matrix, setup.degree,
                          setup.spectral.lambda2);
}

struct SweepPoint {
    std::string point;
    long iterations = 0;
    long comm_rounds = 0;
    long iters_to_target = -1;
    double time_to_target = std::numeric_limits<double>::quiet_NaN();
    double final_avg_F = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<Trace> traces;  // empty Trace for failed points
    bool partial_failure = false;
};

// One run per processor count on complete graphs with k = n-1. Instances
// are regenerated per point from the shared seed with the per-node data
// share held fixed, so the objective keeps the same scale at every n.
inline SweepResult sweep_n(const SimConfig& base, const std::vector<int>& n_values) {
    base.validate();
    if (n_values.empty()) throw ConfigError("sweep-n: empty processor-count set");
    if (!base.problem.instance_file.empty())
        throw ConfigError("sweep-n regenerates the instance per point; "
                          "drop instance_file and pass generation parameters instead");
    const int per_node = base.problem.data_points / base.problem.nodes;

    SweepResult result;
    for (int n : n_values) {
        SimConfig cfg = base;
        cfg.problem.nodes = n;
        cfg.problem.data_points = per_node * n;
        cfg.topology = TopologySpec{"complete", 0, base.topology.seed};
        SweepPoint point;
        point.point = std::to_string(n);
        try {
            Trace trace = run_simulation(cfg);
            point.iterations = trace.iterations;
            point.comm_rounds = trace.comm_rounds;
            point.iters_to_target = trace.iters_to_target;
            point.time_to_target = trace.time_to_target;
            point.final_avg_F = trace.final_avg_F;
            point.converged = trace.target_reached;
            result.traces.push_back(std::move(trace));
        } catch (const std::exception& e) {
            point.failed = true;
            point.error = e.what();
            result.traces.emplace_back();
            result.partial_failure = true;
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

// One run per schedule over a shared instance, topology, and seed. Runs
// continue to the full budget (targets are watched, not stopped on) so
// communication counts are comparable at matched budget.
inline SweepResult sweep_schedule(const SimConfig& base, const std::vector<Schedule>& schedules) {
    base.validate();
    if (schedules.empty()) throw ConfigError("sweep-schedule: empty schedule set");
    if (!base.time_budget && !base.max_iters)
        throw ConfigError("sweep-schedule: runs continue past the target for matched-budget "
                          "comparison and need a time_budget or max_iters");
    SimSetup setup = prepare(base);

    SweepResult result;
    for (const Schedule& schedule : schedules) {
        SimConfig cfg = base;
        cfg.schedule = schedule;
        cfg.stop_on_target = false;
        SweepPoint point;
        point.point = schedule.label();
        try {
            Trace trace = run_simulation(cfg, *setup.oracle, setup.matrix, setup.degree,
                                         setup.spectral.lambda2);
            point.iterations = trace.iterations;
            point.comm_rounds = trace.comm_rounds;
            point.iters_to_target = trace.iters_to_target;
            point.time_to_target = trace.time_to_target;
            point.final_avg_F = trace.final_avg_F;
            point.converged = trace.target_reached;
            result.traces.push_back(std::move(trace));
        } catch (const std::exception& e) {
            point.failed = true;
            point.error = e.what();
            result.traces.emplace_back();
            result.partial_failure = true;
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

}  // namespace dda
