#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "fueltreat/landscape.hpp"
#include "fueltreat/schedule.hpp"

namespace fueltreat {

/// Everything that follows deterministically from (landscape, schedule).
///
/// All per-cell matrices are stored for years 0..horizon. The model only
/// constrains high/mature for t >= 1 and old for t <= horizon - 1; the extra
/// entries are filled with the same threshold rule so that year-0 metrics and
/// occupancy can be read from one place.
struct DerivedState {
    int cells = 0;
    int horizon = 0;
    std::vector<int> age;               // A[i,t]
    std::vector<std::uint8_t> high;     // A[i,t] >= high_threshold
    std::vector<std::uint8_t> mature;   // A[i,t] >= mature_threshold
    std::vector<std::uint8_t> old;      // A[i,t] >= max_tfi
    std::vector<int> high_conn;         // adjacent pairs both high, per year
    std::vector<int> habitat_conn;      // adjacent pairs both mature, per year

    std::size_t at(int cell, int year) const {
        return static_cast<std::size_t>(year) * static_cast<std::size_t>(cells) +
               static_cast<std::size_t>(cell);
    }
    int age_of(int cell, int year) const { return age[at(cell, year)]; }
    bool is_high(int cell, int year) const { return high[at(cell, year)] != 0; }
    bool is_mature(int cell, int year) const { return mature[at(cell, year)] != 0; }
    bool is_old(int cell, int year) const { return old[at(cell, year)] != 0; }

    int high_count(int year) const;
    int mature_count(int year) const;

    bool operator==(const DerivedState&) const = default;
};

/// One of the habitat-protection configurations plus the treatment budget.
struct SettingSpec {
    std::vector<int> habitat_target;    // G_t for t = 1..T, stored at [t - 1]
    bool require_neighbor_habitat = false;
    double budget_fraction = 0.10;      // rho

    int target(int year) const { return habitat_target.at(static_cast<std::size_t>(year - 1)); }
    int horizon() const { return static_cast<int>(habitat_target.size()); }

    /// Throws std::invalid_argument on negative targets or rho outside (0, 1].
    void validate() const;

    /// Table settings 1-4. Settings 1 and 2 hold habitat connectivity at
    /// base_target every year; settings 1 and 3 require a mature neighbour
    /// for any treated cell.
    static SettingSpec table(int setting, int base_target, int horizon, double budget_fraction);
};

enum class ConstraintKind { budget, min_tfi, neighbor_habitat, forced_treatment, habitat_target };

std::string_view to_string(ConstraintKind kind);

struct Violation {
    ConstraintKind kind;
    int cell = -1;      // -1 for landscape-wide constraints
    int year = 0;
    double magnitude = 0.0;
};

struct ConstraintReport {
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }
    int count(ConstraintKind kind) const;
    double magnitude(ConstraintKind kind) const;
};

/// Fills `state` (reusing its storage) from the tight age recursion.
/// Throws std::invalid_argument if the schedule does not cover every cell.
void derive_into(const Landscape& landscape, const Schedule& schedule, DerivedState& state);
DerivedState derive(const Landscape& landscape, const Schedule& schedule);

/// Sum of high-fuel pair connections over years 1..T.
long objective(const DerivedState& state);

/// Evaluates every constraint for t = 1..T and reports all violations.
/// Magnitudes are the amount by which the corresponding linear row is
/// exceeded (area for budget, years for min_tfi, pairs for habitat_target).
ConstraintReport check(const Landscape& landscape, const Schedule& schedule, const SettingSpec& setting);
ConstraintReport check(const Landscape& landscape, const Schedule& schedule, const DerivedState& state,
                       const SettingSpec& setting);

/// Per-kind violation magnitude totals without building a report.
struct ViolationTotals {
    double budget = 0.0;
    double min_tfi = 0.0;
    double neighbor_habitat = 0.0;
    double forced_treatment = 0.0;
    double habitat_target = 0.0;

    double soft() const { return neighbor_habitat + forced_treatment + habitat_target; }
    double hard() const { return budget + min_tfi; }
};

ViolationTotals violation_totals(const Landscape& landscape, const Schedule& schedule,
                                 const DerivedState& state, const SettingSpec& setting);

/// Count of adjacent pairs that are both mature from the initial ages; the
/// habitat target of settings 1 and 2.
int initial_habitat_connectivity(const Landscape& landscape);
int initial_high_connectivity(const Landscape& landscape);

/// Largest treated area allowed in one year (rho * R).
double budget_limit(const Landscape& landscape, const SettingSpec& setting);

}  // namespace fueltreat
