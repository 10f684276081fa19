#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "fueltreat/config.hpp"
#include "fueltreat/experiment.hpp"
#include "fueltreat/fauna_sim.hpp"
#include "fueltreat/landscape.hpp"
#include "fueltreat/mip_model.hpp"
#include "fueltreat/schedule.hpp"
#include "fueltreat/schedule_eval.hpp"

namespace fs = std::filesystem;
using namespace fueltreat;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInvalid = 2;

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
};

// Options shared by every command that needs a landscape and a setting.
struct ProblemArgs {
    std::string landscape;
    int rows = 10;
    int cols = 10;
    int setting = 4;
    int horizon = 10;
    std::optional<int> target;
    std::optional<double> rho;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& p) {
    cmd->add_option("-l,--landscape", p.landscape, "Landscape JSON; generated from the seed when omitted");
    cmd->add_option("--rows", p.rows, "Rows of a generated landscape")->check(CLI::PositiveNumber);
    cmd->add_option("--cols", p.cols, "Columns of a generated landscape")->check(CLI::PositiveNumber);
    cmd->add_option("-s,--setting", p.setting, "Setting 1-4")->check(CLI::Range(1, 4));
    cmd->add_option("-T,--horizon", p.horizon, "Planning horizon in years")->check(CLI::PositiveNumber);
    cmd->add_option("-G,--target", p.target,
                    "Habitat connectivity target for every year (settings 1-2; default: initial value)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--rho", p.rho, "Fraction of total area treatable per year (default from config)")
        ->check(CLI::Range(0.0, 1.0));
}

ExperimentConfig resolve_config(const Globals& g) {
    ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    if (!g.out.empty()) cfg.output_dir = g.out;
    return cfg;
}

Landscape problem_landscape(const ProblemArgs& p, const ExperimentConfig& cfg) {
    if (!p.landscape.empty()) return load_landscape(p.landscape);
    GenerationConfig gen;
    gen.rows = p.rows;
    gen.cols = p.cols;
    gen.ages = cfg.ages;
    gen.seed = cfg.seed;
    CellParams params = cfg.cell;
    params.initial_age = 0;
    return generate_random(gen, params);
}

SettingSpec problem_setting(const ProblemArgs& p, const Landscape& l, const ExperimentConfig& cfg) {
    const int base = p.target ? *p.target : initial_habitat_connectivity(l);
    return SettingSpec::table(p.setting, base, p.horizon, p.rho.value_or(cfg.budget_fraction));
}

// Output directory for a command, created on demand; empty means stdout only.
std::optional<fs::path> out_dir(const ExperimentConfig& cfg) {
    if (cfg.output_dir.empty()) return std::nullopt;
    fs::create_directories(cfg.output_dir);
    return fs::path(cfg.output_dir);
}

void save_resolved(const ExperimentConfig& cfg) {
    if (auto dir = out_dir(cfg)) save_config((*dir / "resolved_config.json").string(), cfg);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void print_report(const ConstraintReport& report) {
    for (const auto& v : report.violations) {
        std::cout << "violation " << to_string(v.kind) << " cell=" << v.cell << " year=" << v.year
                  << " magnitude=" << format_number(v.magnitude) << "\n";
    }
}

void print_metrics(std::ostream& out, const std::vector<YearMetrics>& metrics) {
    out << "year";
    for (Metric m : kAllMetrics) out << "," << to_string(m);
    out << "\n";
    for (std::size_t t = 0; t < metrics.size(); ++t) {
        out << t;
        for (double v : metrics[t]) out << "," << format_number(v);
        out << "\n";
    }
}

int cmd_generate(const Globals& g, const ProblemArgs& p) {
    ExperimentConfig cfg = resolve_config(g);
    const Landscape l = problem_landscape(p, cfg);
    if (auto dir = out_dir(cfg)) {
        save_landscape((*dir / "landscape.json").string(), l);
        save_resolved(cfg);
    } else {
        write_landscape(std::cout, l);
    }
    std::cerr << "cells=" << l.size() << " high_conn=" << initial_high_connectivity(l)
              << " habitat_conn=" << initial_habitat_connectivity(l) << "\n";
    return kOk;
}

int cmd_solve(const Globals& g, const ProblemArgs& p, const std::string& solver) {
    ExperimentConfig cfg = resolve_config(g);
    if (!solver.empty()) cfg.solver = solver_kind_from_string(solver);
    if (p.rho) cfg.budget_fraction = *p.rho;
    cfg.validate();
    Landscape l = problem_landscape(p, cfg);
    const auto dir = out_dir(cfg);

    const std::string mps = dir ? (*dir / "model.mps").string() : "";
    if (cfg.solver == SolverKind::external_mps && mps.empty()) {
        throw std::invalid_argument("the external solver needs --out");
    }
    const SettingRun run = run_setting(l, p.setting, p.horizon, cfg, cfg.anneal.seed, mps, p.target);

    std::cout << "status=" << to_string(run.status) << " objective=" << run.objective
              << " relaxed_years=" << run.relaxed_years << "\n";
    if (run.status == RunStatus::exported) {
        std::cout << "model written to " << (*dir / "model.mps").string() << "\n";
        save_resolved(cfg);
        return kOk;
    }
    if (dir) {
        if (p.landscape.empty()) save_landscape((*dir / "landscape.json").string(), l);
        save_schedule((*dir / "schedule.txt").string(), run.schedule);
        auto occ = open_out(*dir / "occupancy.txt");
        write_occupancy(occ, run.occupancy);
        auto m = open_out(*dir / "metrics.csv");
        print_metrics(m, run.metrics);
        save_resolved(cfg);
    } else {
        write_schedule(std::cout, run.schedule);
    }
    return run.solved() ? kOk : kInfeasible;
}

int cmd_evaluate(const Globals& g, const ProblemArgs& p, const std::string& schedule_path) {
    ExperimentConfig cfg = resolve_config(g);
    const Landscape l = problem_landscape(p, cfg);
    const Schedule s = load_schedule(schedule_path);
    ProblemArgs q = p;
    q.horizon = s.horizon();
    const SettingSpec spec = problem_setting(q, l, cfg);
    const DerivedState state = derive(l, s);
    const ConstraintReport report = check(l, s, state, spec);
    const OccupancyState occ = simulate_occupancy(l, s, state);
    std::cout << "objective=" << objective(state) << " feasible=" << (report.feasible() ? 1 : 0)
              << " violations=" << report.violations.size() << "\n";
    print_report(report);
    print_metrics(std::cout, compute_metrics(l, state, occ));
    return report.feasible() ? kOk : kInfeasible;
}

int cmd_simulate(const Globals& g, const ProblemArgs& p, const std::string& schedule_path) {
    ExperimentConfig cfg = resolve_config(g);
    const Landscape l = problem_landscape(p, cfg);
    const Schedule s = load_schedule(schedule_path);
    const DerivedState state = derive(l, s);
    const OccupancyState occ = simulate_occupancy(l, s, state);
    if (auto dir = out_dir(cfg)) {
        auto out = open_out(*dir / "occupancy.txt");
        write_occupancy(out, occ);
        save_resolved(cfg);
    } else {
        write_occupancy(std::cout, occ);
    }
    for (int t = 0; t <= occ.horizon; ++t) {
        std::cerr << "year " << t << " occupied=" << format_number(occupancy_fraction(occ, t)) << "\n";
    }
    return kOk;
}

int cmd_export(const Globals& g, const ProblemArgs& p, const std::string& path) {
    ExperimentConfig cfg = resolve_config(g);
    const Landscape l = problem_landscape(p, cfg);
    const MipInstance inst = build_mip(l, problem_setting(p, l, cfg), p.horizon);
    fs::path target = path;
    if (target.empty()) {
        if (auto dir = out_dir(cfg)) target = *dir / "model.mps";
    }
    if (target.empty()) {
        write_mps(std::cout, inst);
    } else {
        save_mps(target.string(), inst);
        if (p.landscape.empty()) save_landscape((target.parent_path() / "landscape.json").string(), l);
    }
    std::cerr << "variables=" << inst.variables().size() << " rows=" << inst.rows().size()
              << " big_m=" << format_number(inst.big_m) << "\n";
    save_resolved(cfg);
    return kOk;
}

int cmd_import(const Globals& g, const ProblemArgs& p, const std::string& solution, const std::string& mps) {
    ExperimentConfig cfg = resolve_config(g);
    const Landscape l = problem_landscape(p, cfg);
    MipInstance inst;
    if (!mps.empty()) {
        std::ifstream in(mps);
        if (!in) throw std::invalid_argument("cannot read " + mps);
        inst = read_mps(in);
    } else {
        inst = build_mip(l, problem_setting(p, l, cfg), p.horizon);
    }
    const SolutionVector sol = import_solution_file(inst, solution);
    std::cout << "status=" << to_string(sol.status) << " objective=" << format_number(sol.objective_value);
    if (sol.claimed_objective) std::cout << " claimed=" << format_number(*sol.claimed_objective);
    std::cout << " violated_rows=" << sol.violations.size() << "\n";
    for (const auto& v : sol.violations) {
        const std::string name = v.row >= 0 ? inst.rows()[static_cast<std::size_t>(v.row)].name
                                            : inst.variable(-1 - v.row).name;
        std::cout << "violated " << name << " by " << format_number(v.amount) << "\n";
    }
    if (sol.objective_mismatch) std::cout << "warning: reported objective differs from recomputed value\n";
    const Schedule s = schedule_from_point(inst, l.size(), sol.values);
    if (auto dir = out_dir(cfg)) {
        save_schedule((*dir / "schedule.txt").string(), s);
        save_resolved(cfg);
    }
    return sol.status == SolutionStatus::feasible ? kOk : kInfeasible;
}

int cmd_experiment(const Globals& g, bool illustration, const std::optional<int>& replicates,
                   const std::string& solver, const std::optional<int>& threads) {
    ExperimentConfig cfg = resolve_config(g);
    if (cfg.output_dir.empty()) cfg.output_dir = "results";
    if (replicates) cfg.replicates = *replicates;
    if (threads) cfg.threads = *threads;
    if (!solver.empty()) cfg.solver = solver_kind_from_string(solver);
    cfg.validate();
    const fs::path dir = *out_dir(cfg);
    save_resolved(cfg);

    if (illustration) {
        Landscape l = cfg.illustration_landscape.empty()
                          ? problem_landscape(ProblemArgs{"", cfg.illustration_rows, cfg.illustration_cols}, cfg)
                          : load_landscape(cfg.illustration_landscape);
        const auto runs = run_illustration(l, cfg);
        write_illustration(l, runs, dir.string());
        bool all = true;
        for (const auto& r : runs) {
            std::cout << "setting " << r.setting << ": " << to_string(r.status) << " objective=" << r.objective
                      << " relaxed_years=" << r.relaxed_years << "\n";
            all = all && (r.solved() || r.status == RunStatus::exported);
        }
        return all ? kOk : kInfeasible;
    }

    const ExperimentResult res = run_experiments(cfg);
    emit_report(res.series, dir.string());
    write_replicates_csv(res.records, (dir / "replicates.csv").string());
    write_summary_csv(res.records, (dir / "summary.csv").string());
    std::cout << "runs=" << res.records.size() << " failures=" << res.failures << " output=" << dir.string()
              << "\n";
    return res.failures == 0 ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-year fuel treatment scheduling on cell landscapes"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed (landscape generation)");
    app.add_option("-o,--out", g.out, "Output directory");

    ProblemArgs p;
    std::string solver, schedule_path, mps_path, solution_path;
    bool illustration = false;
    std::optional<int> replicates, threads;

    auto* gen = app.add_subcommand("generate", "Generate a random landscape");
    gen->add_option("--rows", p.rows, "Rows")->check(CLI::PositiveNumber);
    gen->add_option("--cols", p.cols, "Columns")->check(CLI::PositiveNumber);

    auto* solve = app.add_subcommand("solve", "Solve one setting on one landscape");
    add_problem_options(solve, p);
    solve->add_option("--solver", solver, "exact, anneal or external-mps");

    auto* evaluate = app.add_subcommand("evaluate", "Objective, constraint check and metrics of a schedule");
    add_problem_options(evaluate, p);
    evaluate->add_option("schedule", schedule_path, "Schedule file")->required()->check(CLI::ExistingFile);

    auto* simulate = app.add_subcommand("simulate", "Fauna occupancy under a schedule");
    add_problem_options(simulate, p);
    simulate->add_option("schedule", schedule_path, "Schedule file")->required()->check(CLI::ExistingFile);

    auto* exp = app.add_subcommand("experiment", "Replicate experiment over all settings");
    exp->add_flag("--illustration", illustration, "Single-landscape run instead of replicates");
    exp->add_option("--replicates", replicates, "Replicates per size")->check(CLI::PositiveNumber);
    exp->add_option("--solver", solver, "exact, anneal or external-mps");
    exp->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* exp_mps = app.add_subcommand("export-mps", "Write the MIP model in MPS format");
    add_problem_options(exp_mps, p);
    exp_mps->add_option("file", mps_path, "MPS file (default: <out>/model.mps, or stdout)");

    auto* imp = app.add_subcommand("import-solution", "Check an external solver's solution");
    add_problem_options(imp, p);
    imp->add_option("solution", solution_path, "Solution file")->required()->check(CLI::ExistingFile);
    imp->add_option("--mps", mps_path, "Model file to check against instead of rebuilding")
        ->check(CLI::ExistingFile);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*gen) return cmd_generate(g, p);
        if (*solve) return cmd_solve(g, p, solver);
        if (*evaluate) return cmd_evaluate(g, p, schedule_path);
        if (*simulate) return cmd_simulate(g, p, schedule_path);
        if (*exp) return cmd_experiment(g, illustration, replicates, solver, threads);
        if (*exp_mps) return cmd_export(g, p, mps_path);
        if (*imp) return cmd_import(g, p, solution_path, mps_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
