#include "fueltreat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fueltreat/mip_model.hpp"

namespace fueltreat {

namespace fs = std::filesystem;

std::string_view to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::exact: return "exact";
        case SolverKind::anneal: return "anneal";
        case SolverKind::external_mps: return "external-mps";
    }
    return "anneal";
}

SolverKind solver_kind_from_string(std::string_view text) {
    if (text == "exact") return SolverKind::exact;
    if (text == "anneal") return SolverKind::anneal;
    if (text == "external-mps" || text == "external") return SolverKind::external_mps;
    throw std::invalid_argument("unknown solver '" + std::string(text) + "' (exact, anneal, external-mps)");
}

std::string GridSize::label() const { return std::to_string(rows) + "x" + std::to_string(cols); }

void ExperimentConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
        throw std::invalid_argument("budget_fraction must lie in (0, 1]");
    }
    for (const auto& s : sizes) {
        if (s.rows < 1 || s.cols < 1) throw std::invalid_argument("grid sizes must be positive");
    }
    for (int s : settings) {
        if (s < 1 || s > 4) throw std::invalid_argument("settings must be drawn from 1..4");
    }
    if (ramp_low < 0) throw std::invalid_argument("ramp_low must be nonnegative");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (illustration_rows < 1 || illustration_cols < 1 || illustration_horizon < 1) {
        throw std::invalid_argument("illustration dimensions must be positive");
    }
    CellParams probe = cell;
    probe.initial_age = 0;
    probe.validate();
    ages.validate(cell.max_tfi);
    anneal.validate();
}

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::high_conn: return "high_conn";
        case Metric::habitat_conn: return "habitat_conn";
        case Metric::pct_high: return "pct_high";
        case Metric::pct_mature: return "pct_mature";
        case Metric::pct_occupied: return "pct_occupied";
    }
    return "unknown";
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::optimal: return "optimal";
        case RunStatus::feasible: return "feasible";
        case RunStatus::infeasible: return "infeasible";
        case RunStatus::exported: return "exported";
    }
    return "unknown";
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

std::vector<YearMetrics> compute_metrics(const Landscape& landscape, const DerivedState& state,
                                         const OccupancyState& occupancy) {
    const double n = static_cast<double>(landscape.size());
    std::vector<YearMetrics> out(static_cast<std::size_t>(state.horizon + 1));
    for (int t = 0; t <= state.horizon; ++t) {
        auto& m = out[static_cast<std::size_t>(t)];
        m[static_cast<std::size_t>(Metric::high_conn)] = state.high_conn[static_cast<std::size_t>(t)];
        m[static_cast<std::size_t>(Metric::habitat_conn)] = state.habitat_conn[static_cast<std::size_t>(t)];
        m[static_cast<std::size_t>(Metric::pct_high)] = 100.0 * state.high_count(t) / n;
        m[static_cast<std::size_t>(Metric::pct_mature)] = 100.0 * state.mature_count(t) / n;
        m[static_cast<std::size_t>(Metric::pct_occupied)] = 100.0 * occupancy.count(t) / n;
    }
    return out;
}

SettingRun run_setting(const Landscape& landscape, int setting, int horizon, const ExperimentConfig& config,
                       std::uint64_t solver_seed, const std::string& mps_path, std::optional<int> base_target) {
    SettingRun run;
    run.setting = setting;
    run.base_target = setting <= 2 ? base_target.value_or(initial_habitat_connectivity(landscape)) : 0;
    const SettingSpec base = SettingSpec::table(setting, run.base_target, horizon, config.budget_fraction);

    struct Attempt {
        bool ok = false;
        RunStatus status = RunStatus::infeasible;
        Schedule schedule;
        long objective = 0;
    };
    Attempt last;
    auto spec_for = [&](const std::vector<int>& targets) {
        SettingSpec spec = base;
        spec.habitat_target = targets;
        return spec;
    };
    auto solve = [&](const std::vector<int>& targets) {
        const SettingSpec spec = spec_for(targets);
        Attempt a;
        if (config.solver == SolverKind::exact) {
            auto r = solve_exact(landscape, spec, horizon, config.exact);
            a.ok = r.status == ExactStatus::optimal;
            a.status = a.ok ? RunStatus::optimal : RunStatus::infeasible;
            a.schedule = std::move(r.schedule);
            a.objective = r.objective;
        } else {
            AnnealConfig ac = config.anneal;
            ac.seed = solver_seed;
            auto r = solve_anneal(landscape, spec, horizon, ac);
            a.ok = r.feasible;
            a.status = a.ok ? RunStatus::feasible : RunStatus::infeasible;
            a.schedule = std::move(r.schedule);
            a.objective = r.objective;
        }
        last = std::move(a);
        return last.ok;
    };

    if (config.solver == SolverKind::external_mps) {
        run.targets = base.habitat_target;
        run.status = RunStatus::exported;
        run.schedule = Schedule(landscape.size(), horizon);
        if (!mps_path.empty()) save_mps(mps_path, build_mip(landscape, base, horizon));
    } else {
        if (setting <= 2 && run.base_target > 0) {
            const int low = std::min(config.ramp_low, run.base_target);
            const RampResult ramp = ramp_targets(landscape, run.base_target, horizon, solve, low);
            run.relaxed_years = ramp.relaxed_years;
            run.targets = ramp.targets;
        } else {
            run.targets = base.habitat_target;
            solve(run.targets);
        }
        run.status = last.status;
        run.schedule = std::move(last.schedule);
        run.objective = last.objective;
        if (config.emit_mps && !mps_path.empty()) {
            save_mps(mps_path, build_mip(landscape, spec_for(run.targets), horizon));
        }
    }
    run.state = derive(landscape, run.schedule);
    run.occupancy = simulate_occupancy(landscape, run.schedule, run.state);
    run.metrics = compute_metrics(landscape, run.state, run.occupancy);
    if (run.solved() && run.objective != objective(run.state)) {
        throw std::logic_error("solver objective disagrees with evaluator");
    }
    return run;
}

namespace {

std::uint64_t solver_seed_for(const ExperimentConfig& config, int replicate, int setting) {
    return config.anneal.seed + 1000ULL * static_cast<std::uint64_t>(replicate) +
           static_cast<std::uint64_t>(setting);
}

std::string mps_path_for(const ExperimentConfig& config, const std::string& stem) {
    if (config.output_dir.empty() || (!config.emit_mps && config.solver != SolverKind::external_mps)) return "";
    const fs::path dir = fs::path(config.output_dir) / "mps";
    fs::create_directories(dir);
    return (dir / (stem + ".mps")).string();
}

Landscape replicate_landscape(const ExperimentConfig& config, const GridSize& size, int replicate) {
    GenerationConfig gen;
    gen.rows = size.rows;
    gen.cols = size.cols;
    gen.ages = config.ages;
    gen.seed = config.seed + static_cast<std::uint64_t>(replicate);
    CellParams params = config.cell;
    params.initial_age = 0;
    return generate_random(gen, params);
}

std::ofstream open_csv(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::vector<SettingRun> run_illustration(const Landscape& landscape, const ExperimentConfig& config) {
    std::vector<SettingRun> runs;
    for (int s : config.settings) {
        runs.push_back(run_setting(landscape, s, config.illustration_horizon, config, solver_seed_for(config, 0, s),
                                   mps_path_for(config, "illustration_s" + std::to_string(s))));
    }
    return runs;
}

const SeriesPoint* MetricSeries::find(Metric metric, int setting, const std::string& size, int year) const {
    for (const auto& p : points) {
        if (p.metric == metric && p.setting == setting && p.size == size && p.year == year) return &p;
    }
    return nullptr;
}

MetricSeries aggregate(const std::vector<ReplicateRecord>& records, const ExperimentConfig& config) {
    MetricSeries series;
    for (const auto& size : config.sizes) {
        const std::string label = size.label();
        for (int setting : config.settings) {
            std::vector<const ReplicateRecord*> group;
            for (const auto& r : records) {
                if (r.size == label && r.setting == setting &&
                    (r.status == RunStatus::optimal || r.status == RunStatus::feasible)) {
                    group.push_back(&r);
                }
            }
            if (group.empty()) continue;
            for (int t = 0; t <= config.horizon; ++t) {
                for (Metric m : kAllMetrics) {
                    const auto k = static_cast<std::size_t>(m);
                    double sum = 0.0;
                    for (const auto* r : group) sum += r->metrics[static_cast<std::size_t>(t)][k];
                    const double n = static_cast<double>(group.size());
                    const double mean = sum / n;
                    SeriesPoint p{m, setting, label, t, mean, 0.0, static_cast<int>(group.size()), false};
                    if (group.size() > 1) {
                        double ss = 0.0;
                        for (const auto* r : group) {
                            const double d = r->metrics[static_cast<std::size_t>(t)][k] - mean;
                            ss += d * d;
                        }
                        const double sd = std::sqrt(ss / (n - 1.0));
                        p.half_width = 1.96 * sd / std::sqrt(n);
                        p.ci_defined = true;
                    }
                    series.points.push_back(p);
                }
            }
        }
    }
    return series;
}

ExperimentResult run_experiments(const ExperimentConfig& config) {
    config.validate();
    struct Unit {
        std::size_t size_index;
        int replicate;
    };
    std::vector<Unit> units;
    for (std::size_t s = 0; s < config.sizes.size(); ++s) {
        for (int r = 0; r < config.replicates; ++r) units.push_back(Unit{s, r});
    }
    std::vector<std::vector<ReplicateRecord>> slots(units.size());
    std::vector<std::exception_ptr> errors(units.size());

    auto work = [&](std::size_t u) {
        const auto& unit = units[u];
        const auto& size = config.sizes[unit.size_index];
        const Landscape landscape = replicate_landscape(config, size, unit.replicate);
        for (int setting : config.settings) {
            const auto run = run_setting(
                landscape, setting, config.horizon, config, solver_seed_for(config, unit.replicate, setting),
                mps_path_for(config, size.label() + "_r" + std::to_string(unit.replicate) + "_s" +
                                         std::to_string(setting)));
            ReplicateRecord rec;
            rec.size = size.label();
            rec.replicate = unit.replicate;
            rec.setting = setting;
            rec.status = run.status;
            rec.base_target = run.base_target;
            rec.relaxed_years = run.relaxed_years;
            rec.objective = run.objective;
            rec.targets = run.targets;
            rec.metrics = run.metrics;
            slots[u].push_back(std::move(rec));
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u = next++; u < units.size(); u = next++) {
            try {
                work(u);
            } catch (...) {
                errors[u] = std::current_exception();
            }
        }
    };
    const int threads = std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(units.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentResult result;
    for (auto& group : slots) {
        for (auto& rec : group) {
            if (rec.status == RunStatus::infeasible) ++result.failures;
            result.records.push_back(std::move(rec));
        }
    }
    result.series = aggregate(result.records, config);
    return result;
}

namespace {

const char* kSeriesColumns = "setting,size,year,mean,ci_low,ci_high,n,ci_defined";

void write_point(std::ostream& out, const SeriesPoint& p) {
    out << p.setting << ',' << p.size << ',' << p.year << ',' << format_number(p.mean) << ','
        << format_number(p.mean - p.half_width) << ',' << format_number(p.mean + p.half_width) << ',' << p.n
        << ',' << (p.ci_defined ? 1 : 0) << '\n';
}

}  // namespace

void emit_report(const MetricSeries& series, const std::string& directory) {
    const fs::path dir(directory);
    auto combined = open_csv(dir / "metrics_long.csv");
    combined << "metric," << kSeriesColumns << '\n';
    for (Metric m : kAllMetrics) {
        auto out = open_csv(dir / ("metric_" + std::string(to_string(m)) + ".csv"));
        out << kSeriesColumns << '\n';
        for (const auto& p : series.points) {
            if (p.metric != m) continue;
            write_point(out, p);
        }
    }
    for (const auto& p : series.points) {
        combined << to_string(p.metric) << ',';
        write_point(combined, p);
    }
}

void write_replicates_csv(const std::vector<ReplicateRecord>& records, const std::string& path) {
    auto out = open_csv(path);
    out << "size,replicate,setting,status,base_target,relaxed_years,objective,year";
    for (Metric m : kAllMetrics) out << ',' << to_string(m);
    out << '\n';
    for (const auto& r : records) {
        for (std::size_t t = 0; t < r.metrics.size(); ++t) {
            out << r.size << ',' << r.replicate << ',' << r.setting << ',' << to_string(r.status) << ','
                << r.base_target << ',' << r.relaxed_years << ',' << r.objective << ',' << t;
            for (double v : r.metrics[t]) out << ',' << format_number(v);
            out << '\n';
        }
    }
}

void write_summary_csv(const std::vector<ReplicateRecord>& records, const std::string& path) {
    struct Counts {
        int solved = 0, infeasible = 0, exported = 0, ramped = 0;
    };
    std::vector<std::pair<std::pair<std::string, int>, Counts>> table;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.size, r.setting);
        auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end()) {
            table.push_back({key, {}});
            it = std::prev(table.end());
        }
        switch (r.status) {
            case RunStatus::optimal:
            case RunStatus::feasible: ++it->second.solved; break;
            case RunStatus::infeasible: ++it->second.infeasible; break;
            case RunStatus::exported: ++it->second.exported; break;
        }
        if (r.relaxed_years > 0) ++it->second.ramped;
    }
    auto out = open_csv(path);
    out << "size,setting,solved,infeasible,exported,ramped\n";
    for (const auto& [key, c] : table) {
        out << key.first << ',' << key.second << ',' << c.solved << ',' << c.infeasible << ',' << c.exported << ','
            << c.ramped << '\n';
    }
}

void write_illustration(const Landscape& landscape, const std::vector<SettingRun>& runs,
                        const std::string& directory) {
    const fs::path dir(directory);
    {
        std::ofstream lf = open_csv(dir / "landscape.json");
        write_landscape(lf, landscape);
    }
    auto summary = open_csv(dir / "illustration_summary.csv");
    summary << "setting,status,base_target,relaxed_years,objective,initial_high_conn\n";
    auto metrics = open_csv(dir / "illustration_metrics.csv");
    metrics << "setting,year,target";
    for (Metric m : kAllMetrics) metrics << ',' << to_string(m);
    metrics << '\n';
    auto mosaic = open_csv(dir / "illustration_mosaic.csv");
    mosaic << "setting,year,cell,row,col,age,treated,high,mature,occupied\n";

    for (const auto& run : runs) {
        summary << run.setting << ',' << to_string(run.status) << ',' << run.base_target << ','
                << run.relaxed_years << ',' << run.objective << ',' << initial_high_connectivity(landscape) << '\n';
        for (std::size_t t = 0; t < run.metrics.size(); ++t) {
            const int target = t == 0 ? 0 : run.targets.at(t - 1);
            metrics << run.setting << ',' << t << ',' << target;
            for (double v : run.metrics[t]) metrics << ',' << format_number(v);
            metrics << '\n';
        }
        for (int t = 0; t <= run.state.horizon; ++t) {
            for (int i = 0; i < landscape.size(); ++i) {
                const int row = landscape.is_grid() ? i / landscape.cols() : -1;
                const int col = landscape.is_grid() ? i % landscape.cols() : -1;
                const bool treated = t > 0 && run.schedule.treated(i, t);
                mosaic << run.setting << ',' << t << ',' << i << ',' << row << ',' << col << ','
                       << run.state.age_of(i, t) << ',' << (treated ? 1 : 0) << ','
                       << (run.state.is_high(i, t) ? 1 : 0) << ',' << (run.state.is_mature(i, t) ? 1 : 0) << ','
                       << (run.occupancy.is_occupied(i, t) ? 1 : 0) << '\n';
            }
        }
        {
            std::ofstream sf = open_csv(dir / ("schedule_setting" + std::to_string(run.setting) + ".txt"));
            write_schedule(sf, run.schedule);
        }
        {
            std::ofstream of = open_csv(dir / ("occupancy_setting" + std::to_string(run.setting) + ".txt"));
            write_occupancy(of, run.occupancy);
        }
    }
}

}  // namespace fueltreat
