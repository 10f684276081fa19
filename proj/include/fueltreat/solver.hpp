#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fueltreat/landscape.hpp"
#include "fueltreat/schedule.hpp"
#include "fueltreat/schedule_eval.hpp"

namespace fueltreat {

enum class ExactStatus { optimal, infeasible };
std::string_view to_string(ExactStatus status);

struct ExactOptions {
    /// Only schedules with objective strictly below this are accepted.
    std::optional<long> incumbent_limit;
    /// Largest cells x horizon product the enumeration will attempt.
    int cap = 36;
};

struct ExactResult {
    Schedule schedule;
    long objective = 0;
    ExactStatus status = ExactStatus::infeasible;
    long nodes = 0;
};

/// Depth-first branch and bound over per-year treatment subsets.
///
/// Years are decided in order; within a year cells are branched in order of
/// descending fuel age (treat before skip). Budget and minimum-interval
/// limits are enforced while generating subsets, forced treatments as soon
/// as both cells of an old/mature-neighbour pair are decided, and the
/// neighbour-habitat and habitat-target rows when the year is complete.
/// The bound is the accumulated objective.
///
/// Throws std::invalid_argument if cells * horizon exceeds options.cap.
ExactResult solve_exact(const Landscape& landscape, const SettingSpec& setting, int horizon,
                        const ExactOptions& options = {});

struct AnnealConfig {
    double initial_temperature = 2.0;
    double cooling_rate = 0.99997;
    long iterations = 200000;
    double target_penalty_weight = 20.0;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

struct AnnealResult {
    Schedule schedule;
    long objective = 0;
    bool feasible = false;
    double penalized = 0.0;            // objective + weight * soft violation
    std::vector<double> best_trace;    // best penalized score after each iteration
};

/// Simulated annealing over single-entry flips of the treatment matrix.
///
/// Budget and minimum-interval limits hold for every visited schedule: a
/// flip-on that would break the interval is rejected, later treatments of
/// the same cell that it invalidates are dropped, and budget overflow is
/// repaired by switching off random treated cells of that year. Neighbour
/// habitat, forced treatment and habitat targets are penalised. Returns the
/// best feasible schedule seen, or the best penalised one if none was
/// feasible. Deterministic for a given config.
AnnealResult solve_anneal(const Landscape& landscape, const SettingSpec& setting, int horizon,
                          const AnnealConfig& config);

/// Annealing start. Cells are treated by the year they would first be
/// forced, earliest deadline first, bringing treatments forward when a
/// later window would run out of budget.
Schedule greedy_schedule(const Landscape& landscape, const SettingSpec& setting, int horizon);

}  // namespace fueltreat
