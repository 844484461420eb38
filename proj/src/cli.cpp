/*
 * Copyright 2026 The desplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "desplan/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "desplan/errors.hpp"
#include "desplan/models.hpp"
#include "desplan/oracle.hpp"
#include "desplan/planner.hpp"
#include "desplan/simulator.hpp"
#include "desplan/synthesis.hpp"

namespace desplan {
namespace {

struct RunConfig {
    std::string builtin;
    std::string model_path;
    std::string algo = "pmt";
    std::uint32_t batch = 1;
    std::string sigmas = "0..5";
    std::uint32_t replications = 30;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string raw_path;
    std::string plan_path;
    std::string dump_path;
    std::string mode = "memoized";
    std::uint64_t node_budget = OracleOptions::default_budget();
    std::size_t max_frontier = PlannerOptions{}.max_frontier;
    std::vector<std::uint32_t> bench_batches{1, 5, 10, 15, 50, 100};
    std::vector<std::string> bench_algos{"pmt", "hmm"};
};

void add_model_source(CLI::App* cmd, RunConfig& cfg, bool required = true) {
    auto* b = cmd->add_option("--builtin", cfg.builtin, "Built-in model: small-factory or fms");
    auto* m = cmd->add_option("--model", cfg.model_path, "Model file");
    b->excludes(m);
    m->excludes(b);
    if (required) cmd->require_option(1, 0);
}

ModelBundle load_bundle(const RunConfig& cfg) {
    if (!cfg.builtin.empty() && !cfg.model_path.empty()) throw InputError("give exactly one of --builtin and --model");
    if (!cfg.model_path.empty()) return load_model(cfg.model_path);
    if (!cfg.builtin.empty()) return builtin_model(cfg.builtin);
    throw InputError("a model source is required (--builtin or --model)");
}

Automaton supervisor_of(const ModelBundle& bundle) {
    bundle.validate();
    auto report = synthesize(bundle.plants, bundle.specs);
    if (report.supervisor.empty()) throw PlanningError(0, "the supervisor of model '" + bundle.name + "' is empty");
    return std::move(report.supervisor);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

/// Writes through `fallback` when `path` is empty.
template <class F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw InputError("cannot write '" + path + "'");
    write(file);
    if (!file) throw InputError("error writing '" + path + "'");
}

std::string join(const Word& w) {
    std::string s;
    for (const auto& e : w) {
        if (!s.empty()) s += ' ';
        s += e;
    }
    return s;
}

PlanResult run_planner(const std::string& algo, const Automaton& sup, const ModelBundle& bundle,
                       std::uint32_t batch, std::size_t max_frontier) {
    const auto recipes = bundle.recipes_for(batch);
    const RecipeBook book(recipes, sup);
    const TimingModel timing(bundle.timing, sup);
    const auto n = book.batch_events(timing);
    PlannerOptions options;
    options.max_frontier = max_frontier;
    if (algo == "pmt") return plan_pmt(sup, bundle.timing, recipes, n, options);
    if (algo == "hmm") return plan_hmm(sup, bundle.timing, recipes, n, options);
    throw InputError("unknown algorithm '" + algo + "' (expected pmt or hmm)");
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto bundle = load_bundle(cfg);
    bundle.validate();
    const auto report = synthesize(bundle.plants, bundle.specs);
    const double wall = seconds_since(start);
    out << "states=" << report.state_count << " transitions=" << report.transition_count << '\n'
        << "wall_seconds=" << fixed(wall, 3) << '\n';
    if (!cfg.dump_path.empty()) {
        ModelBundle dump;
        dump.name = bundle.name + "-supervisor";
        dump.plants.push_back(report.supervisor);
        emit(cfg.dump_path, out, [&](std::ostream& o) { o << serialize_model(dump); });
    }
    return 0;
}

int cmd_plan(const RunConfig& cfg, std::ostream& out) {
    const auto bundle = load_bundle(cfg);
    const auto sup = supervisor_of(bundle);
    const auto plan = run_planner(cfg.algo, sup, bundle, cfg.batch, cfg.max_frontier);
    out << cfg.algo << ',' << cfg.batch << ',' << format_time(plan.makespan) << ',' << plan.parallelism << ','
        << fixed(plan.wall_seconds, 3) << '\n';
    emit(cfg.out_path, out, [&](std::ostream& o) { write_plan(o, plan); });
    return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto bundle = load_bundle(cfg);
    const auto sup = supervisor_of(bundle);
    const bool fms = bundle.name == "fms";
    bool complete = true;
    emit(cfg.out_path, out, [&](std::ostream& o) {
        o << "N,algo,makespan,parallelism,wall_seconds,optimal_formula\n";
        for (auto batch : cfg.bench_batches) {
            for (const auto& algo : cfg.bench_algos) {
                o << batch << ',' << algo << ',';
                try {
                    const auto plan = run_planner(algo, sup, bundle, batch, cfg.max_frontier);
                    o << format_time(plan.makespan) << ',' << plan.parallelism << ',' << fixed(plan.wall_seconds, 3);
                } catch (const Error& e) {
                    complete = false;
                    err << "bench N=" << batch << " " << algo << ": " << e.what() << '\n';
                    o << ",,";
                }
                o << ',';
                if (fms) o << 157ull * batch + 81;
                o << '\n' << std::flush;
            }
        }
    });
    return complete ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    std::ifstream in(cfg.plan_path);
    if (!in) throw InputError("cannot read plan file '" + cfg.plan_path + "'");
    const auto plan = read_plan(in);
    const auto bundle = load_bundle(cfg);
    const auto sup = supervisor_of(bundle);
    DisturbanceSpec spec;
    spec.sigmas = parse_sigma_list(cfg.sigmas);
    spec.replications = cfg.replications;
    spec.seed = cfg.seed;
    const auto controls = project_controllables(sup, plan.sequence);
    const auto report = robustness_experiment(sup, bundle.timing, controls, spec, &plan.sequence);
    emit(cfg.out_path, out, [&](std::ostream& o) { write_summary_csv(o, report.rows); });
    if (!cfg.raw_path.empty()) emit(cfg.raw_path, out, [&](std::ostream& o) { write_raw_csv(o, report.runs); });
    return 0;
}

void print_oracle(std::ostream& out, const OracleResult& r) {
    out << "optimal_makespan=" << format_time(r.optimal_makespan) << '\n'
        << "min_makespan_sequence=" << join(r.min_makespan_sequence) << '\n'
        << "max_parallelism=" << r.max_parallelism << '\n'
        << "max_parallelism_sequence=" << join(r.max_parallelism_sequence) << '\n'
        << "sequences_explored=" << r.sequences_explored << '\n'
        << "nodes_visited=" << r.nodes_visited << '\n'
        << "authoritative=" << (r.authoritative ? "true" : "false") << '\n';
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto bundle = load_bundle(cfg);
    const auto sup = supervisor_of(bundle);
    const auto recipes = bundle.recipes_for(cfg.batch);
    const RecipeBook book(recipes, sup);
    const auto n = book.batch_events(TimingModel(bundle.timing, sup));
    OracleOptions options;
    options.node_budget = cfg.node_budget;
    if (cfg.mode == "enumerate") options.mode = OracleOptions::Mode::Enumerate;
    else if (cfg.mode == "memoized") options.mode = OracleOptions::Mode::Memoized;
    else throw InputError("unknown oracle mode '" + cfg.mode + "' (expected enumerate or memoized)");
    try {
        print_oracle(out, exhaustive(sup, bundle.timing, recipes, n, options));
    } catch (const OracleBudgetError& e) {
        print_oracle(out, e.partial());
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

} // namespace

std::vector<double> parse_sigma_list(std::string_view text) {
    std::vector<double> sigmas;
    auto number = [&](std::string_view s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(std::string(s), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v) || v < 0)
            throw InputError("bad sigma '" + std::string(s) + "' in '" + std::string(text) + "'");
        return v;
    };
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const double lo = number(text.substr(0, dots));
        const double hi = number(text.substr(dots + 2));
        if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo)
            throw InputError("sigma range '" + std::string(text) + "' needs integer bounds a <= b");
        for (double s = lo; s <= hi; s += 1) sigmas.push_back(s);
        return sigmas;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        sigmas.push_back(number(text.substr(pos, end - pos)));
        pos = end + 1;
    }
    return sigmas;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Supervisory-control planning: synthesis, scheduling, exact search and robustness replay", "desplan"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* synth = app.add_subcommand("synth", "Synthesize the supervisor and print its size");
    add_model_source(synth, cfg);
    synth->add_option("--dump", cfg.dump_path, "Write the supervisor in model format");

    auto* plan = app.add_subcommand("plan", "Plan one batch");
    add_model_source(plan, cfg);
    plan->add_option("--algo", cfg.algo, "pmt or hmm")->check(CLI::IsMember({"pmt", "hmm"}));
    plan->add_option("-N,--batch", cfg.batch, "Batch size")->required()->check(CLI::PositiveNumber);
    plan->add_option("--out", cfg.out_path, "Plan file (default: standard output)");
    plan->add_option("--max-frontier", cfg.max_frontier, "Largest depth layer before giving up");

    auto* bench = app.add_subcommand("bench", "Both planners over a range of batch sizes, as CSV");
    add_model_source(bench, cfg, false);
    bench->add_option("--batches", cfg.bench_batches, "Batch sizes")->delimiter(',')->check(CLI::PositiveNumber);
    bench->add_option("--algos", cfg.bench_algos, "Planners")->delimiter(',')->check(CLI::IsMember({"pmt", "hmm"}));
    bench->add_option("--out", cfg.out_path, "CSV file (default: standard output)");
    bench->add_option("--max-frontier", cfg.max_frontier, "Largest depth layer before giving up");

    auto* simulate = app.add_subcommand("simulate", "Replay a plan under normally distributed durations");
    add_model_source(simulate, cfg);
    simulate->add_option("--plan", cfg.plan_path, "Plan file")->required();
    simulate->add_option("--sigmas", cfg.sigmas, "Range a..b or comma list");
    simulate->add_option("--reps", cfg.replications, "Replications per sigma")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", cfg.seed, "Base seed");
    simulate->add_option("--out", cfg.out_path, "Summary CSV (default: standard output)");
    simulate->add_option("--raw", cfg.raw_path, "Per-replication CSV");

    auto* oracle = app.add_subcommand("oracle", "Exact optima by exhaustive search");
    add_model_source(oracle, cfg);
    oracle->add_option("-N,--batch", cfg.batch, "Batch size")->required()->check(CLI::PositiveNumber);
    oracle->add_option("--mode", cfg.mode, "enumerate or memoized")->check(CLI::IsMember({"enumerate", "memoized"}));
    oracle->add_option("--budget", cfg.node_budget, "Node budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    if (bench->parsed() && cfg.builtin.empty() && cfg.model_path.empty()) cfg.builtin = "fms";

    try {
        if (synth->parsed()) return cmd_synth(cfg, out);
        if (plan->parsed()) return cmd_plan(cfg, out);
        if (bench->parsed()) return cmd_bench(cfg, out, err);
        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (oracle->parsed()) return cmd_oracle(cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace desplan
