#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fueltreat/fauna_sim.hpp"
#include "fueltreat/landscape.hpp"
#include "fueltreat/schedule_eval.hpp"
#include "fueltreat/solver.hpp"

namespace fueltreat {

enum class SolverKind { exact, anneal, external_mps };
std::string_view to_string(SolverKind kind);
SolverKind solver_kind_from_string(std::string_view text);

struct GridSize {
    int rows = 10;
    int cols = 10;
    std::string label() const;
};

struct ExperimentConfig {
    std::vector<GridSize> sizes{{10, 10}, {15, 15}};
    int replicates = 30;
    int horizon = 10;
    double budget_fraction = 0.10;
    std::vector<int> settings{1, 2, 3, 4};
    std::uint64_t seed = 1;
    SolverKind solver = SolverKind::anneal;
    AnnealConfig anneal;
    ExactOptions exact;
    AgeDistribution ages = AgeDistribution::uniform(16);
    CellParams cell;            // threshold template; initial_age ignored
    int ramp_low = 0;           // G_t during relaxed years
    int threads = 1;
    bool emit_mps = false;
    std::string output_dir;     // MPS files go here when emit_mps or external

    // Single-landscape run (`experiment --illustration`).
    int illustration_rows = 10;
    int illustration_cols = 10;
    int illustration_horizon = 13;
    std::string illustration_landscape;  // optional landscape file

    void validate() const;
};

enum class Metric { high_conn, habitat_conn, pct_high, pct_mature, pct_occupied };
inline constexpr std::array<Metric, 5> kAllMetrics{Metric::high_conn, Metric::habitat_conn, Metric::pct_high,
                                                   Metric::pct_mature, Metric::pct_occupied};
std::string_view to_string(Metric metric);

/// Per-year values for t = 0..horizon.
using YearMetrics = std::array<double, kAllMetrics.size()>;

/// The metrics of one solved landscape, indexed by year.
std::vector<YearMetrics> compute_metrics(const Landscape& landscape, const DerivedState& state,
                                         const OccupancyState& occupancy);

enum class RunStatus { optimal, feasible, infeasible, exported };
std::string_view to_string(RunStatus status);

/// One setting solved on one landscape, including any habitat-target ramp.
struct SettingRun {
    int setting = 0;
    RunStatus status = RunStatus::infeasible;
    int base_target = 0;
    int relaxed_years = 0;
    std::vector<int> targets;
    long objective = 0;
    Schedule schedule;
    DerivedState state;
    OccupancyState occupancy;
    std::vector<YearMetrics> metrics;

    bool solved() const { return status == RunStatus::optimal || status == RunStatus::feasible; }
};

/// Solves one setting: settings 1-2 target the initial habitat connectivity
/// and are ramped (early years relaxed to config.ramp_low) until the solver
/// reports a feasible schedule. `solver_seed` seeds annealing. With
/// emit_mps or the external solver, the final model is written to
/// `mps_path` (if non-empty). `base_target` replaces the initial habitat
/// connectivity as the settings 1-2 target.
SettingRun run_setting(const Landscape& landscape, int setting, int horizon, const ExperimentConfig& config,
                       std::uint64_t solver_seed, const std::string& mps_path = "",
                       std::optional<int> base_target = std::nullopt);

/// All configured settings on a single landscape.
std::vector<SettingRun> run_illustration(const Landscape& landscape, const ExperimentConfig& config);

struct ReplicateRecord {
    std::string size;
    int replicate = 0;
    int setting = 0;
    RunStatus status = RunStatus::infeasible;
    int base_target = 0;
    int relaxed_years = 0;
    long objective = 0;
    std::vector<int> targets;          // G_t actually enforced, t = 1..T
    std::vector<YearMetrics> metrics;
};

struct SeriesPoint {
    Metric metric;
    int setting = 0;
    std::string size;
    int year = 0;
    double mean = 0.0;
    double half_width = 0.0;
    int n = 0;
    bool ci_defined = false;
};

struct MetricSeries {
    std::vector<SeriesPoint> points;

    const SeriesPoint* find(Metric metric, int setting, const std::string& size, int year) const;
};

struct ExperimentResult {
    std::vector<ReplicateRecord> records;   // size, replicate, setting order
    MetricSeries series;
    int failures = 0;                       // infeasible after ramp
};

/// Mean and 1.96 * s / sqrt(n) over solved records; n = 1 gives a zero
/// half-width with ci_defined = false.
MetricSeries aggregate(const std::vector<ReplicateRecord>& records, const ExperimentConfig& config);

/// Replicate r of each size uses landscape seed config.seed + r.
ExperimentResult run_experiments(const ExperimentConfig& config);

/// metric_<name>.csv for each metric plus metrics_long.csv.
void emit_report(const MetricSeries& series, const std::string& directory);
void write_replicates_csv(const std::vector<ReplicateRecord>& records, const std::string& path);
void write_summary_csv(const std::vector<ReplicateRecord>& records, const std::string& path);

/// Illustration outputs: per-year metrics, age mosaic, schedules, occupancy.
void write_illustration(const Landscape& landscape, const std::vector<SettingRun>& runs,
                        const std::string& directory);

/// Decimal text used in every CSV (shortest round-trip form).
std::string format_number(double value);

}  // namespace fueltreat
