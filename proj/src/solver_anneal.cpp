#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "fueltreat/incremental_eval.hpp"
#include "fueltreat/rng.hpp"
#include "fueltreat/solver.hpp"

namespace fueltreat {

void AnnealConfig::validate() const {
    if (!(initial_temperature > 0.0) || !std::isfinite(initial_temperature)) {
        throw std::invalid_argument("initial_temperature must be positive");
    }
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) {
        throw std::invalid_argument("cooling_rate must lie in (0, 1)");
    }
    if (iterations < 1) throw std::invalid_argument("iterations must be positive");
    if (!(target_penalty_weight > 0.0) || !std::isfinite(target_penalty_weight)) {
        throw std::invalid_argument("target_penalty_weight must be positive");
    }
}

// Earliest-deadline-first. A cell's deadline is the first year in which it
// starts the year old and so may be forced. Each year the cells due now are
// treated, then cells due later are brought forward while the demand of any
// future window would exceed the budget of that window.
Schedule greedy_schedule(const Landscape& landscape, const SettingSpec& setting, int horizon) {
    const int n = landscape.size();
    const double limit = budget_limit(landscape, setting);
    const double slack = 1e-9 * std::max(1.0, limit);
    Schedule s(n, horizon);
    std::vector<int> prev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) prev[static_cast<std::size_t>(i)] = landscape.cell(i).initial_age;
    auto age = [&](int i) { return prev[static_cast<std::size_t>(i)]; };

    std::vector<int> due;
    std::vector<double> demand(static_cast<std::size_t>(horizon) + 2);
    for (int t = 1; t <= horizon; ++t) {
        auto deadline = [&](int i) { return t + std::max(0, landscape.cell(i).max_tfi - age(i)); };
        auto has_mature_neighbor = [&](int i) {
            const auto nb = landscape.neighbors(i);
            return std::any_of(nb.begin(), nb.end(), [&](int j) {
                return !s.treated(j, t) && age(j) + 1 >= landscape.cell(j).mature_threshold;
            });
        };
        // Treating i must not strip an already treated neighbour of its last
        // mature neighbour.
        auto keeps_support = [&](int i) {
            for (int j : landscape.neighbors(i)) {
                if (!s.treated(j, t)) continue;
                const auto nb = landscape.neighbors(j);
                const bool other = std::any_of(nb.begin(), nb.end(), [&](int k) {
                    return k != i && !s.treated(k, t) && age(k) + 1 >= landscape.cell(k).mature_threshold;
                });
                if (!other) return false;
            }
            return true;
        };
        auto eligible = [&](int i) {
            return age(i) >= landscape.cell(i).min_tfi &&
                   (!setting.require_neighbor_habitat || (has_mature_neighbor(i) && keeps_support(i)));
        };

        due.clear();
        for (int i = 0; i < n; ++i) {
            if (deadline(i) <= horizon && !landscape.neighbors(i).empty()) due.push_back(i);
        }
        std::stable_sort(due.begin(), due.end(), [&](int a, int b) {
            const int da = deadline(a), db = deadline(b);
            return da != db ? da < db : age(a) > age(b);
        });

        double used = 0.0;
        auto treat = [&](int i) {
            const double a = landscape.cell(i).area;
            if (used + a > limit + slack) return false;
            s.set(i, t, true);
            used += a;
            return true;
        };
        // Without the neighbour-habitat rule a cell is treated at its deadline
        // even before a neighbour matures, so the demand plan stays exact.
        for (int i : due) {
            if (deadline(i) == t && (!setting.require_neighbor_habitat || has_mature_neighbor(i)) && eligible(i)) {
                treat(i);
            }
        }

        // Largest shortfall of budget over windows [t+1, d].
        auto excess = [&] {
            std::fill(demand.begin(), demand.end(), 0.0);
            for (int i : due) {
                if (!s.treated(i, t) && deadline(i) > t) {
                    demand[static_cast<std::size_t>(deadline(i))] += landscape.cell(i).area;
                }
            }
            double worst = 0.0, cumulative = 0.0;
            for (int d = t + 1; d <= horizon; ++d) {
                cumulative += demand[static_cast<std::size_t>(d)];
                worst = std::max(worst, cumulative - limit * (d - t));
            }
            return worst;
        };
        double over = excess();
        for (int i : due) {
            if (over <= slack) break;
            if (s.treated(i, t) || deadline(i) <= t || !eligible(i)) continue;
            if (treat(i)) over -= landscape.cell(i).area;
        }

        for (int i = 0; i < n; ++i) {
            auto& a = prev[static_cast<std::size_t>(i)];
            a = s.treated(i, t) ? 0 : a + 1;
        }
    }
    return s;
}

namespace {
constexpr long kWeightPeriod = 1000;
constexpr double kWeightStep = 1.5;
constexpr double kWeightCap = 1000.0;
constexpr int kStuckPeriods = 10;
constexpr std::uint64_t kRepairOdds = 20;
}  // namespace

AnnealResult solve_anneal(const Landscape& landscape, const SettingSpec& setting, int horizon,
                          const AnnealConfig& config) {
    config.validate();
    setting.validate();
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (setting.horizon() != horizon) throw std::invalid_argument("setting horizon does not match");

    const int n = landscape.size();
    const double limit = budget_limit(landscape, setting);
    const double slack = 1e-9 * std::max(1.0, limit);
    double weight = config.target_penalty_weight;
    Rng rng(config.seed);

    const Schedule start = greedy_schedule(landscape, setting, horizon);
    IncrementalEvaluator ev(landscape, setting, start);
    auto score = [&] { return static_cast<double>(ev.objective()) + weight * ev.soft(); };

    double cur_score = score();
    AnnealResult result;
    Schedule best_penalized = ev.schedule();
    double best_score = cur_score;
    long best_penalized_obj = ev.objective();
    std::optional<Schedule> best_feasible;
    long best_feasible_obj = std::numeric_limits<long>::max();
    if (ev.soft() == 0.0) {
        best_feasible = ev.schedule();
        best_feasible_obj = ev.objective();
    }

    result.best_trace.reserve(static_cast<std::size_t>(config.iterations));
    std::vector<std::pair<int, int>> changes;
    std::vector<int> treated_in_year;
    std::vector<std::pair<int, int>> missing;
    double temperature = config.initial_temperature;
    int stuck_periods = 0;
    const auto slots = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(horizon);

    auto toggle = [&](int i, int t) {
        ev.flip(i, t);
        changes.emplace_back(i, t);
    };
    auto undo = [&] {
        for (auto it = changes.rbegin(); it != changes.rend(); ++it) ev.flip(it->first, it->second);
        changes.clear();
    };

    const Schedule& current = ev.schedule();
    // Adds a treatment, dropping later ones of the same cell that come
    // too soon and others in that year until the budget holds. The dropped
    // treatment is random, or the one whose removal scores best.
    auto add = [&](int i, int y, bool best_drop = false) {
        const auto& c = landscape.cell(i);
        if (ev.age(i, y - 1) < c.min_tfi || c.area > limit + slack) return false;
        toggle(i, y);
        for (int t = y + 1; t <= horizon; ++t) {
            if (current.treated(i, t) && ev.age(i, t - 1) < c.min_tfi) toggle(i, t);
        }
        while (ev.year_area(y) > limit + slack) {
            treated_in_year.clear();
            for (int j = 0; j < n; ++j) {
                if (j != i && current.treated(j, y)) treated_in_year.push_back(j);
            }
            if (treated_in_year.empty()) return false;
            int drop = treated_in_year[static_cast<std::size_t>(rng.below(treated_in_year.size()))];
            if (best_drop) {
                double best = std::numeric_limits<double>::infinity();
                for (int j : treated_in_year) {
                    ev.flip(j, y);
                    const double sc = score();
                    ev.flip(j, y);
                    if (sc < best) {
                        best = sc;
                        drop = j;
                    }
                }
            }
            toggle(drop, y);
        }
        return true;
    };
    for (long iter = 0; iter < config.iterations; ++iter, temperature *= config.cooling_rate) {
        // The penalty weight grows while the walk stays infeasible and relaxes
        // back toward the configured value once it is feasible again.
        // A walk stuck infeasible for several periods restarts from the best
        // feasible schedule.
        if (iter > 0 && iter % kWeightPeriod == 0) {
            if (ev.soft() > 0.0) {
                weight = std::min(weight * kWeightStep, kWeightCap * config.target_penalty_weight);
                if (++stuck_periods >= kStuckPeriods) {
                    // Without a feasible point yet, start over from the greedy
                    // schedule at full temperature.
                    const Schedule& to = best_feasible ? *best_feasible : start;
                    for (int t = 1; t <= horizon; ++t) {
                        for (int i = 0; i < n; ++i) {
                            if (ev.schedule().treated(i, t) != to.treated(i, t)) ev.flip(i, t);
                        }
                    }
                    if (!best_feasible) {
                        temperature = config.initial_temperature;
                        weight = config.target_penalty_weight;
                    }
                    stuck_periods = 0;
                }
            } else {
                weight = std::max(config.target_penalty_weight, weight / kWeightStep);
                stuck_periods = 0;
            }
            cur_score = score();
        }
        const auto pick = rng.below(slots);
        const int cell = static_cast<int>(pick % static_cast<std::uint64_t>(n));
        const int year = static_cast<int>(pick / static_cast<std::uint64_t>(n)) + 1;
        changes.clear();

        bool valid = true;
        if (ev.forced_treatment() > 0.0 && rng.below(kRepairOdds) == 0) {
            // Repair move: treat a cell whose forced treatment is missing.
            missing.clear();
            for (int t = 1; t <= horizon; ++t) {
                for (int i = 0; i < n; ++i) {
                    if (ev.forced_violated(i, t)) missing.emplace_back(i, t);
                }
            }
            const auto [i, t] = missing[static_cast<std::size_t>(rng.below(missing.size()))];
            valid = add(i, t, true);
        } else if (!current.treated(cell, year)) {
            valid = add(cell, year);
        } else if (rng.below(2) == 0) {
            toggle(cell, year);
        } else {
            // Shift the treatment one year earlier or later.
            const int to = rng.below(2) == 0 ? year - 1 : year + 1;
            toggle(cell, year);
            valid = to >= 1 && to <= horizon && !current.treated(cell, to) && add(cell, to);
        }
        if (!valid) undo();

        if (valid) {
            const double s = score();
            const double delta = s - cur_score;
            if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temperature)) {
                cur_score = s;
                if (s < best_score) {
                    best_score = s;
                    best_penalized = ev.schedule();
                    best_penalized_obj = ev.objective();
                }
                if (ev.soft() == 0.0 && ev.objective() < best_feasible_obj) {
                    best_feasible = ev.schedule();
                    best_feasible_obj = ev.objective();
                }
            } else {
                undo();
            }
        }
        result.best_trace.push_back(best_score);
    }

    if (best_feasible) {
        result.schedule = std::move(*best_feasible);
        result.objective = best_feasible_obj;
        result.feasible = true;
        result.penalized = static_cast<double>(best_feasible_obj);
    } else {
        result.schedule = std::move(best_penalized);
        result.objective = best_penalized_obj;
        result.feasible = false;
        result.penalized = best_score;
    }
    return result;
}

}  // namespace fueltreat
