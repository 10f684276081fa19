#include "fueltreat/schedule_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fueltreat {

int DerivedState::high_count(int year) const {
    int n = 0;
    for (int i = 0; i < cells; ++i) n += high[at(i, year)];
    return n;
}

int DerivedState::mature_count(int year) const {
    int n = 0;
    for (int i = 0; i < cells; ++i) n += mature[at(i, year)];
    return n;
}

void SettingSpec::validate() const {
    if (habitat_target.empty()) {
        throw std::invalid_argument("setting needs a target for every year (horizon >= 1)");
    }
    for (int g : habitat_target) {
        if (g < 0) throw std::invalid_argument("habitat targets must be nonnegative");
    }
    if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
        throw std::invalid_argument("budget_fraction must lie in (0, 1]");
    }
}

SettingSpec SettingSpec::table(int setting, int base_target, int horizon, double budget_fraction) {
    if (setting < 1 || setting > 4) {
        throw std::invalid_argument("setting must be 1, 2, 3 or 4");
    }
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    SettingSpec s;
    const bool hold_habitat = setting <= 2;
    s.habitat_target.assign(static_cast<std::size_t>(horizon), hold_habitat ? base_target : 0);
    s.require_neighbor_habitat = setting == 1 || setting == 3;
    s.budget_fraction = budget_fraction;
    s.validate();
    return s;
}

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::budget: return "budget";
        case ConstraintKind::min_tfi: return "min_tfi";
        case ConstraintKind::neighbor_habitat: return "neighbor_habitat";
        case ConstraintKind::forced_treatment: return "forced_treatment";
        case ConstraintKind::habitat_target: return "habitat_target";
    }
    return "unknown";
}

int ConstraintReport::count(ConstraintKind kind) const {
    return static_cast<int>(std::count_if(violations.begin(), violations.end(),
                                          [kind](const Violation& v) { return v.kind == kind; }));
}

double ConstraintReport::magnitude(ConstraintKind kind) const {
    double total = 0.0;
    for (const auto& v : violations) {
        if (v.kind == kind) total += v.magnitude;
    }
    return total;
}

void derive_into(const Landscape& landscape, const Schedule& schedule, DerivedState& state) {
    const int n = landscape.size();
    const int horizon = schedule.horizon();
    if (schedule.cells() != n) {
        throw std::invalid_argument("schedule has " + std::to_string(schedule.cells()) +
                                    " cells, landscape has " + std::to_string(n));
    }
    const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(horizon + 1);
    state.cells = n;
    state.horizon = horizon;
    state.age.resize(slots);
    state.high.resize(slots);
    state.mature.resize(slots);
    state.old.resize(slots);
    state.high_conn.assign(static_cast<std::size_t>(horizon + 1), 0);
    state.habitat_conn.assign(static_cast<std::size_t>(horizon + 1), 0);

    for (int t = 0; t <= horizon; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto& c = landscape.cell(i);
            int a = 0;
            if (t == 0) {
                a = c.initial_age;
            } else if (!schedule.treated(i, t)) {
                a = state.age[state.at(i, t - 1)] + 1;
            }
            const auto k = state.at(i, t);
            state.age[k] = a;
            state.high[k] = a >= c.high_threshold;
            state.mature[k] = a >= c.mature_threshold;
            state.old[k] = a >= c.max_tfi;
        }
        int hc = 0;
        int mc = 0;
        for (const auto& [i, j] : landscape.connection_pairs()) {
            hc += state.high[state.at(i, t)] & state.high[state.at(j, t)];
            mc += state.mature[state.at(i, t)] & state.mature[state.at(j, t)];
        }
        state.high_conn[static_cast<std::size_t>(t)] = hc;
        state.habitat_conn[static_cast<std::size_t>(t)] = mc;
    }
}

DerivedState derive(const Landscape& landscape, const Schedule& schedule) {
    DerivedState state;
    derive_into(landscape, schedule, state);
    return state;
}

long objective(const DerivedState& state) {
    long z = 0;
    for (int t = 1; t <= state.horizon; ++t) z += state.high_conn[static_cast<std::size_t>(t)];
    return z;
}

double budget_limit(const Landscape& landscape, const SettingSpec& setting) {
    return setting.budget_fraction * landscape.total_area();
}

namespace {

template <typename Sink>
void scan_constraints(const Landscape& landscape, const Schedule& schedule, const DerivedState& state,
                      const SettingSpec& setting, Sink&& sink) {
    const int n = landscape.size();
    const int horizon = schedule.horizon();
    if (schedule.cells() != n || state.cells != n || state.horizon != horizon) {
        throw std::invalid_argument("schedule, state and landscape dimensions differ");
    }
    if (setting.horizon() != horizon) {
        throw std::invalid_argument("setting horizon " + std::to_string(setting.horizon()) +
                                    " does not match schedule horizon " + std::to_string(horizon));
    }
    const double limit = budget_limit(landscape, setting);
    const double slack = 1e-9 * std::max(1.0, limit);

    for (int t = 1; t <= horizon; ++t) {
        double used = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& c = landscape.cell(i);
            const bool x = schedule.treated(i, t);
            const auto nb = landscape.neighbors(i);
            int mature_nb = 0;
            for (int j : nb) mature_nb += state.mature[state.at(j, t)];

            if (x) {
                used += c.area;
                const int prev_age = state.age[state.at(i, t - 1)];
                if (prev_age < c.min_tfi) {
                    sink(ConstraintKind::min_tfi, i, t, static_cast<double>(c.min_tfi - prev_age));
                }
                if (setting.require_neighbor_habitat && mature_nb == 0) {
                    sink(ConstraintKind::neighbor_habitat, i, t, 1.0);
                }
            } else if (!nb.empty() && state.old[state.at(i, t - 1)] && mature_nb > 0) {
                // Old_{t-1} + (1/|nb|) sum Mature_{j,t} <= 1 + x_t, with x_t = 0.
                sink(ConstraintKind::forced_treatment, i, t,
                     static_cast<double>(mature_nb) / static_cast<double>(nb.size()));
            }
        }
        if (used > limit + slack) {
            sink(ConstraintKind::budget, -1, t, used - limit);
        }
        const int shortfall = setting.target(t) - state.habitat_conn[static_cast<std::size_t>(t)];
        if (shortfall > 0) {
            sink(ConstraintKind::habitat_target, -1, t, static_cast<double>(shortfall));
        }
    }
}

}  // namespace

ConstraintReport check(const Landscape& landscape, const Schedule& schedule, const DerivedState& state,
                       const SettingSpec& setting) {
    ConstraintReport report;
    scan_constraints(landscape, schedule, state, setting,
                     [&](ConstraintKind kind, int cell, int year, double magnitude) {
                         report.violations.push_back(Violation{kind, cell, year, magnitude});
                     });
    return report;
}

ConstraintReport check(const Landscape& landscape, const Schedule& schedule, const SettingSpec& setting) {
    return check(landscape, schedule, derive(landscape, schedule), setting);
}

ViolationTotals violation_totals(const Landscape& landscape, const Schedule& schedule,
                                 const DerivedState& state, const SettingSpec& setting) {
    ViolationTotals totals;
    scan_constraints(landscape, schedule, state, setting,
                     [&](ConstraintKind kind, int, int, double magnitude) {
                         switch (kind) {
                             case ConstraintKind::budget: totals.budget += magnitude; break;
                             case ConstraintKind::min_tfi: totals.min_tfi += magnitude; break;
                             case ConstraintKind::neighbor_habitat: totals.neighbor_habitat += magnitude; break;
                             case ConstraintKind::forced_treatment: totals.forced_treatment += magnitude; break;
                             case ConstraintKind::habitat_target: totals.habitat_target += magnitude; break;
                         }
                     });
    return totals;
}

int initial_habitat_connectivity(const Landscape& landscape) {
    int count = 0;
    for (const auto& [i, j] : landscape.connection_pairs()) {
        const auto& a = landscape.cell(i);
        const auto& b = landscape.cell(j);
        count += (a.initial_age >= a.mature_threshold && b.initial_age >= b.mature_threshold) ? 1 : 0;
    }
    return count;
}

int initial_high_connectivity(const Landscape& landscape) {
    int count = 0;
    for (const auto& [i, j] : landscape.connection_pairs()) {
        const auto& a = landscape.cell(i);
        const auto& b = landscape.cell(j);
        count += (a.initial_age >= a.high_threshold && b.initial_age >= b.high_threshold) ? 1 : 0;
    }
    return count;
}

}  // namespace fueltreat
