// ddasim — consensus-optimization simulator and tradeoff planner.
//
// Subcommands:
//   run            one simulation from a JSON config; writes trace.csv + manifest.json
//   sweep-n        one run per processor count on complete graphs
//   sweep-schedule one run per communication schedule over a shared instance
//   plan           closed-form planner: n_opt, h_opt, error constants, predicted times
//   gen            generate and serialize a synthetic problem instance
//
// Exit codes: 0 success, 2 config error, 3 runtime error, 4 sweep with failed points.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <dda/dda.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitPartial = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> r;
    std::optional<double> step_scale;
    std::optional<long> max_iters;
    std::optional<double> target_gap;
    std::optional<double> time_budget;
    std::optional<int> workers;
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path, "JSON config file");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override problem seed");
    cmd->add_option("--r", args.r, "override communication/computation ratio");
    cmd->add_option("--step-scale", args.step_scale, "override step-size scale A");
    cmd->add_option("--max-iters", args.max_iters, "override iteration cap");
    cmd->add_option("--target-gap", args.target_gap, "override target gap above F*");
    cmd->add_option("--time-budget", args.time_budget, "override virtual-time budget");
    cmd->add_option("--workers", args.workers, "override worker thread count");
}

dda::SimConfig load_config(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw dda::ConfigError("cannot open config file: " + args.config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw dda::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    // Manifests embed the config under "config"; accept them directly.
    if (j.contains("config") && j.at("config").is_object()) j = j.at("config");
    dda::SimConfig cfg = dda::config_from_json(j);
    if (args.seed) cfg.problem.seed = *args.seed;
    if (args.r) cfg.r = *args.r;
    if (args.step_scale) cfg.step_scale = *args.step_scale;
    if (args.max_iters) cfg.max_iters = *args.max_iters;
    if (args.target_gap) cfg.target_gap = *args.target_gap;
    if (args.time_budget) cfg.time_budget = *args.time_budget;
    if (args.workers) cfg.workers = *args.workers;
    return cfg;
}

void write_outputs(const std::string& out_dir, const std::string& command,
                   const dda::SimConfig& cfg,
                   const std::vector<std::pair<std::string, std::string>>& files) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> names;
    for (const auto& [name, content] : files) {
        dda::write_text_file(out_dir + "/" + name, content);
        names.push_back(name);
    }
    const nlohmann::json manifest = dda::make_manifest(command, cfg, names);
    dda::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

// "1..14" or "2,4,8"
std::vector<int> parse_int_set(const std::string& text) {
    std::vector<int> values;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (hi < lo) throw dda::ConfigError("empty range: " + text);
        for (int v = lo; v <= hi; ++v) values.push_back(v);
        return values;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) values.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return values;
}

int cmd_run(const CommonArgs& args) {
    dda::SimConfig cfg = load_config(args);
    cfg.validate();
    dda::Trace trace = dda::run_simulation(cfg);
    write_outputs(args.out_dir, "run", cfg, {{"trace.csv", dda::trace_to_csv(trace)}});
    std::printf("run: %ld iterations, %ld comm rounds, virtual time %.6g, avg_F %.10g\n",
                trace.iterations, trace.comm_rounds, trace.virtual_time, trace.final_avg_F);
    if (trace.target_reached)
        std::printf("target reached at t=%ld (virtual time %.6g)\n", trace.iters_to_target,
                    trace.time_to_target);
    return kExitOk;
}

int report_sweep(const std::string& label, const dda::SweepResult& sweep) {
    std::string best_point;
    double best_time = std::numeric_limits<double>::infinity();
    for (const auto& p : sweep.points) {
        if (p.failed) {
            std::printf("%s %-6s FAILED: %s\n", label.c_str(), p.point.c_str(), p.error.c_str());
        } else {
            std::printf("%s %-6s iters=%ld comms=%ld time_to_target=%.6g converged=%d\n",
                        label.c_str(), p.point.c_str(), p.iterations, p.comm_rounds,
                        p.time_to_target, int(p.converged));
            if (p.converged && p.time_to_target < best_time) {
                best_time = p.time_to_target;
                best_point = p.point;
            }
        }
    }
    if (!best_point.empty())
        std::printf("fastest to target: %s (virtual time %.6g)\n", best_point.c_str(), best_time);
    return sweep.partial_failure ? kExitPartial : kExitOk;
}

int cmd_sweep_n(const CommonArgs& args, const std::string& n_set) {
    dda::SimConfig cfg = load_config(args);
    const std::vector<int> n_values = parse_int_set(n_set);
    dda::SweepResult sweep = dda::sweep_n(cfg, n_values);
    std::vector<std::pair<std::string, std::string>> files = {
        {"sweep.csv", dda::sweep_to_csv(sweep)}};
    for (std::size_t i = 0; i < sweep.points.size(); ++i)
        if (!sweep.points[i].failed)
            files.push_back({"trace_n" + sweep.points[i].point + ".csv",
                             dda::trace_to_csv(sweep.traces[i])});
    write_outputs(args.out_dir, "sweep-n", cfg, files);
    return report_sweep("n", sweep);
}

int cmd_sweep_schedule(const CommonArgs& args, const std::string& set) {
    dda::SimConfig cfg = load_config(args);
    std::vector<dda::Schedule> schedules;
    std::size_t pos = 0;
    while (pos <= set.size()) {
        const auto comma = set.find(',', pos);
        const std::string tok =
            set.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) {
            auto s = dda::Schedule::parse(tok);
            if (!s) throw dda::ConfigError("schedule '" + tok + "' not understood");
            schedules.push_back(*s);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    dda::SweepResult sweep = dda::sweep_schedule(cfg, schedules);
    std::vector<std::pair<std::string, std::string>> files = {
        {"sweep.csv", dda::sweep_to_csv(sweep)}};
    for (std::size_t i = 0; i < sweep.points.size(); ++i)
        if (!sweep.points[i].failed)
            files.push_back({"trace_" + sweep.points[i].point + ".csv",
                             dda::trace_to_csv(sweep.traces[i])});
    write_outputs(args.out_dir, "sweep-schedule", cfg, files);
    return report_sweep("schedule", sweep);
}

struct PlanArgs {
    double r = 0.0;
    std::optional<int> n;
    std::optional<int> k;
    double lambda2 = 0.0;
    double lipschitz = 1.0;
    double radius = 1.0;
    double epsilon = 0.1;
    std::optional<long> h;
    double p = 0.3;
};

int cmd_plan(const PlanArgs& args) {
    if (args.r < 0.0) throw dda::ConfigError("plan: r must be >= 0");
    if (args.r == 0.0) {
        std::printf("n_opt: unbounded (r = 0 means communication is free; with a fixed-degree\n"
                    "graph every added processor reduces the per-iteration cost 1/n + k*r,\n"
                    "so there is no finite optimal processor count)\n");
        return kExitOk;
    }
    const double nopt = dda::n_opt(args.r);
    const int n = args.n.value_or(std::max(1, static_cast<int>(std::llround(nopt))));
    const int k = args.k.value_or(std::max(0, n - 1));
    dda::TradeoffParams params{args.r, n, k, args.lambda2, args.lipschitz, args.radius};
    params.validate();
    const double hopt = dda::h_opt(params);
    const long h = args.h.value_or(std::max<long>(1, static_cast<long>(std::llround(hopt))));

    std::printf("r               %.6g\n", args.r);
    std::printf("n_opt           %.4f  (complete graph; using n=%d, k=%d)\n", nopt, n, k);
    std::printf("h_opt           %.4f  (clamped to h=%ld)\n", hopt, h);
    std::printf("C_1             %.6g\n",
                dda::constant_C1(args.lipschitz, args.radius, args.lambda2));
    std::printf("C_h (h=%-4ld)    %.6g\n", h,
                dda::constant_Ch(args.lipschitz, args.radius, args.lambda2, h));
    std::printf("C_p (p=%-4g)    %.6g\n", args.p,
                dda::constant_Cp(args.lipschitz, args.radius, args.lambda2, args.p));
    std::printf("iteration cost  %.6g time units\n", dda::iteration_cost(params));
    std::printf("predicted time to reach epsilon=%g:\n", args.epsilon);
    std::printf("  every round   %.6g\n",
                dda::tau_epsilon(args.epsilon, params, dda::Schedule::every()));
    std::printf("  fixed h=%-4ld  %.6g\n", h,
                dda::tau_epsilon(args.epsilon, params, dda::Schedule::fixed(h)));
    if (args.p < 0.5)
        std::printf("  power p=%-4g %.6g\n", args.p,
                    dda::tau_epsilon(args.epsilon, params, dda::Schedule::power(args.p)));
    else
        std::printf("  power p=%-4g divergent (needs p < 1/2)\n", args.p);
    return kExitOk;
}

struct GenArgs {
    std::string kind = "quadmax";
    int dim = 10;
    int data_points = 40;
    int nodes = 4;
    std::uint64_t seed = 1;
    std::string out_path = "instance.json";
};

int cmd_gen(const GenArgs& args) {
    dda::ProblemSpec spec{args.kind, args.dim, args.data_points, args.nodes, args.seed, ""};
    const nlohmann::json j = dda::generate_instance_json(spec);
    const auto parent = std::filesystem::path(args.out_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    dda::write_text_file(args.out_path, j.dump(2) + "\n");
    std::printf("gen: wrote %s (%s, dim=%d, data_points=%d, nodes=%d, seed=%llu)\n",
                args.out_path.c_str(), args.kind.c_str(), args.dim, args.data_points, args.nodes,
                static_cast<unsigned long long>(args.seed));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consensus-optimization simulator and communication/computation planner"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_n_args, sweep_s_args;
    std::string n_set = "1..8", schedule_set = "h1,h2,p0.3";
    PlanArgs plan_args;
    GenArgs gen_args;

    auto* run = app.add_subcommand("run", "execute one simulation");
    add_common_options(run, run_args, true);

    auto* sweepn = app.add_subcommand("sweep-n", "sweep processor counts on complete graphs");
    add_common_options(sweepn, sweep_n_args, true);
    sweepn->add_option("--n", n_set, "processor counts, e.g. 1..14 or 2,4,8");

    auto* sweeps = app.add_subcommand("sweep-schedule", "sweep communication schedules");
    add_common_options(sweeps, sweep_s_args, true);
    sweeps->add_option("--set", schedule_set, "schedules, e.g. h1,h2,p0.3,p1");

    auto* plan = app.add_subcommand("plan", "closed-form tradeoff planner");
    plan->add_option("--r", plan_args.r, "communication/computation ratio")->required();
    plan->add_option("--n", plan_args.n, "processor count (default: round(n_opt))");
    plan->add_option("--k", plan_args.k, "per-node degree (default: n-1)");
    plan->add_option("--lambda2", plan_args.lambda2, "second-largest eigenvalue of P");
    plan->add_option("--L", plan_args.lipschitz, "subgradient norm bound");
    plan->add_option("--R", plan_args.radius, "radius with psi(x*) <= R^2");
    plan->add_option("--epsilon", plan_args.epsilon, "target accuracy");
    plan->add_option("--period", plan_args.h, "fixed period (default: round(h_opt))");
    plan->add_option("--p", plan_args.p, "power-law exponent");

    auto* gen = app.add_subcommand("gen", "generate a synthetic instance file");
    gen->add_option("--kind", gen_args.kind, "quadmax or metric");
    gen->add_option("--d", gen_args.dim, "dimension (feature dimension for metric)");
    gen->add_option("--m", gen_args.data_points, "total data points");
    gen->add_option("--n", gen_args.nodes, "node count (must divide m)");
    gen->add_option("--seed", gen_args.seed, "generation seed");
    gen->add_option("--out", gen_args.out_path, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweepn->parsed()) return cmd_sweep_n(sweep_n_args, n_set);
        if (sweeps->parsed()) return cmd_sweep_schedule(sweep_s_args, schedule_set);
        if (plan->parsed()) return cmd_plan(plan_args);
        if (gen->parsed()) return cmd_gen(gen_args);
    } catch (const dda::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitConfig;
}
