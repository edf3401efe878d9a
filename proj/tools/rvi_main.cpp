// Command-line front end: analyze, solve, simulate, gen.

#include "rvi/generators.hpp"
#include "rvi/io.hpp"
#include "rvi/policy.hpp"
#include "rvi/solvers.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

using namespace rvi;

namespace {

enum ExitCode { ok = 0, failure = 1, capped = 2, aborted = 3 };

PomdpModel load_model(const std::string& path) {
    std::vector<std::string> warnings;
    PomdpModel model = parse_pomdp(read_text(path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return model;
}

std::string pair_name(const PomdpModel& m, ActionObservation p) {
    return (p.action < 0 ? std::string("*") : m.action_name(p.action)) + " " + m.observation_name(p.observation);
}

int run_analyze(const std::string& path) {
    const PomdpModel model = load_model(path);
    std::ostringstream out;
    out << "model: " << model.num_states() << " states, " << model.num_actions() << " actions, "
        << model.num_observations() << " observations, discount " << model.discount() << "\n";
    const auto proper = analyze_properness(model);
    out << "transformational matrices:\n";
    for (const auto& p : proper.pairs)
        out << "  " << pair_name(model, p.pair) << ": rank " << p.rank << (p.degenerate ? " degenerate" : " invertible")
            << "\n";
    out << "verdict: " << (proper.proper ? "proper" : "not proper") << "\n";
    const auto info = informativeness_report(model);
    out << "observation supports:\n";
    for (const auto& p : info.pairs) out << "  " << pair_name(model, p.pair) << ": " << p.support_size << "\n";
    out << "max support size: " << info.max_support_size << " of " << info.num_states << "\n";
    out << "suggested classes:\n";
    std::istringstream classes(format_classes(classify_actions_heuristic(model), model));
    for (std::string line; std::getline(classes, line);) out << "  " << line << "\n";
    std::cout << out.str();
    return ok;
}

struct SolveArgs {
    std::string model;
    std::string algo = "vi";
    std::string mode = "collective";
    std::string criterion = "auto";
    std::string classes;
    std::string out;
    std::string stats;
    SolveConfig config;
    bool incremental = false;
    bool full_dimension = false;
};

int run_solve(SolveArgs& args) {
    const PomdpModel model = load_model(args.model);
    SolveConfig& cfg = args.config;
    cfg.mode = args.mode == "individual" ? UpdateMode::individual : UpdateMode::collective;
    static const std::map<std::string, StoppingCriterion> criteria{
        {"auto", StoppingCriterion::automatic}, {"loose", StoppingCriterion::loose}, {"strict", StoppingCriterion::strict}};
    cfg.criterion = criteria.at(args.criterion);
    cfg.dp.incremental = args.incremental;
    cfg.low_dimension = !args.full_dimension;

    SolveResult res;
    if (args.algo == "vi") {
        res = solve_vi(model, cfg);
    } else if (args.algo == "ssvi") {
        res = solve_ssvi(model, cfg);
    } else if (args.algo == "infovi") {
        res = solve_infovi(model, cfg);
    } else {
        const ActionClassification classes = args.classes.empty() ? classify_actions_heuristic(model)
                                                                  : parse_classes(read_text(args.classes), model);
        res = solve_spvi(model, cfg, classes);
    }

    if (!args.out.empty())
        write_text(args.out, res.family ? format_family(*res.family, model.num_states())
                                        : format_vector_set(res.vectors, model.num_states()));
    if (!args.stats.empty()) write_text(args.stats, format_stats_csv(res.stats));

    std::ostream& report = args.out == "-" || args.stats == "-" ? std::cerr : std::cout;
    const std::size_t vectors = res.family ? res.family->total_vectors() : res.vectors.size();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %s after %zu iterations, residual %.6g (threshold %.6g), %zu vectors\n",
                  args.algo.c_str(), to_string(res.termination).c_str(), res.iterations(), res.residual, res.threshold,
                  vectors);
    report << buf;
    for (const auto& e : res.expansions) {
        std::snprintf(buf, sizeof buf, "  expansion %d: %zu histories, %d iterations, %zu vectors, residual %.6g\n",
                      e.expansion, e.histories, e.iterations, e.vectors, e.residual);
        report << buf;
    }
    if (args.algo == "spvi" && !res.history_bound_held)
        report << "  note: history count exceeded |A_IR||Z_IR|(|A_IP||Z_IP|)^i\n";

    switch (res.termination) {
    case Termination::iteration_cap: return capped;
    case Termination::resource_abort: return aborted;
    default: return ok;
    }
}

struct SimulateArgs {
    std::string model;
    std::string policy;
    SimulationOptions options;
    bool csv = false;
};

int run_simulate(const SimulateArgs& args) {
    auto model = std::make_shared<const PomdpModel>(load_model(args.model));
    Policy policy = args.policy == "qmdp" ? Policy::qmdp(*model) : [&] {
        auto value = parse_value_function(read_text(args.policy), *model);
        return std::visit([&](auto& v) { return Policy::improving(model, std::move(v)); }, value);
    }();
    const auto report = simulate(*model, policy, args.options);
    if (args.csv)
        std::cout << simulation_csv_header() << "\n" << simulation_csv_row(report) << "\n";
    else
        std::cout << policy.kind() << ": " << simulation_summary(report) << "\n";
    return ok;
}

struct GenArgs {
    std::string problem;
    std::string out = "-";
    std::uint64_t seed = 1;
    double discount = 0.95;
    int states = 3, actions = 2, observations = 2;
    double sparsity = 0.0;
    int width = 3, height = 2;
    double look_noise = 0.0;
    int patterns = 3, request_bits = 4;
};

int run_gen(const GenArgs& args) {
    PomdpModel model;
    if (args.problem == "example3") {
        model = make_example3();
    } else if (args.problem == "maze1") {
        model = make_maze1(args.discount);
    } else if (args.problem == "maze2") {
        model = make_maze2(args.discount);
    } else if (args.problem == "office") {
        model = make_office(args.discount);
    } else if (args.problem == "elevator") {
        model = make_elevator({args.patterns, args.request_bits, args.discount});
    } else if (args.problem == "random") {
        model = make_random_model({args.seed, args.states, args.actions, args.observations, args.sparsity, args.discount});
    } else {
        GridParams gp;
        gp.seed = args.seed;
        gp.width = args.width;
        gp.height = args.height;
        gp.discount = args.discount;
        gp.look_noise = args.look_noise;
        model = make_near_discernible_grid(gp);
    }
    write_text(args.out, serialize_pomdp(model));
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value iteration over reachable belief subsets"};
    app.require_subcommand(1);

    std::string analyze_model;
    auto* analyze = app.add_subcommand("analyze", "Degeneracy, supports and a suggested action classification");
    analyze->add_option("model", analyze_model, "POMDP file, or - for stdin")->required();

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Run a solver and write its value function");
    solve->add_option("model", solve_args.model, "POMDP file, or - for stdin")->required();
    solve->add_option("--algo", solve_args.algo)->check(CLI::IsMember({"vi", "ssvi", "infovi", "spvi"}))->capture_default_str();
    solve->add_option("--mode", solve_args.mode)->check(CLI::IsMember({"collective", "individual"}))->capture_default_str();
    solve->add_option("--criterion", solve_args.criterion, "Stopping threshold")
        ->check(CLI::IsMember({"auto", "loose", "strict"}))
        ->capture_default_str();
    solve->add_option("--epsilon", solve_args.config.epsilon)->capture_default_str();
    solve->add_option("--max-iter", solve_args.config.max_iterations)->capture_default_str();
    solve->add_option("--deadline", solve_args.config.deadline_seconds, "Seconds; 0 for none")->capture_default_str();
    solve->add_option("--classes", solve_args.classes, "spvi action classes (`name rich|poor` per line)");
    solve->add_option("--max-expansions", solve_args.config.max_expansions, "spvi; negative for no limit")
        ->capture_default_str();
    solve->add_option("--out", solve_args.out, "Value function file, or - for stdout");
    solve->add_option("--stats", solve_args.stats, "Per-iteration CSV, or - for stdout");
    solve->add_option("--seed", solve_args.config.seed)->capture_default_str();
    solve->add_option("--enum-cap", solve_args.config.dp.enumeration_cap)->capture_default_str();
    solve->add_flag("--incremental", solve_args.incremental, "Prune after each observation term");
    solve->add_flag("--full-dimension", solve_args.full_dimension, "infovi: keep full-length vectors");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo evaluation of a policy");
    sim->add_option("model", sim_args.model, "POMDP file, or - for stdin")->required();
    sim->add_option("policy", sim_args.policy, "Value function file, or qmdp")->required();
    sim->add_option("--trials", sim_args.options.trials)->capture_default_str();
    sim->add_option("--horizon", sim_args.options.horizon)->capture_default_str();
    sim->add_option("--seed", sim_args.options.seed)->capture_default_str();
    sim->add_flag("--csv", sim_args.csv, "Print a CSV header and row");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Write a generated model");
    gen->add_option("problem", gen_args.problem)
        ->required()
        ->check(CLI::IsMember({"example3", "maze1", "maze2", "elevator", "office", "random", "grid"}));
    gen->add_option("--out", gen_args.out)->capture_default_str();
    gen->add_option("--seed", gen_args.seed)->capture_default_str();
    gen->add_option("--discount", gen_args.discount)->capture_default_str();
    gen->add_option("--states", gen_args.states, "random")->capture_default_str();
    gen->add_option("--actions", gen_args.actions, "random")->capture_default_str();
    gen->add_option("--observations", gen_args.observations, "random")->capture_default_str();
    gen->add_option("--sparsity", gen_args.sparsity, "random")->capture_default_str();
    gen->add_option("--width", gen_args.width, "grid")->capture_default_str();
    gen->add_option("--height", gen_args.height, "grid")->capture_default_str();
    gen->add_option("--look-noise", gen_args.look_noise, "grid")->capture_default_str();
    gen->add_option("--patterns", gen_args.patterns, "elevator")->capture_default_str();
    gen->add_option("--request-bits", gen_args.request_bits, "elevator")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(analyze_model);
        if (solve->parsed()) return run_solve(solve_args);
        if (sim->parsed()) return run_simulate(sim_args);
        if (gen->parsed()) return run_gen(gen_args);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const ModelError& e) {
        std::cerr << "error: invalid model: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return failure;
}
