#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fueltreat/landscape.hpp"
#include "fueltreat/schedule.hpp"
#include "fueltreat/schedule_eval.hpp"

namespace fueltreat {

/// Maintains the objective and soft-constraint totals of a schedule under
/// single-entry flips. A flip of x[i,t] only changes cell i's ages from t
/// up to its next treatment, so only pairs and local rows touching i in
/// those years are recomputed. Agrees exactly with derive() + check().
class IncrementalEvaluator {
public:
    IncrementalEvaluator(const Landscape& landscape, const SettingSpec& setting, Schedule schedule);

    void flip(int cell, int year);

    const Schedule& schedule() const { return schedule_; }
    int age(int cell, int year) const { return age_[at(cell, year)]; }
    long objective() const { return objective_; }
    double year_area(int year) const { return area_[static_cast<std::size_t>(year)]; }

    double neighbor_habitat() const { return neighbor_habitat_; }
    double forced_treatment() const { return forced_; }
    double habitat_target() const { return target_; }
    double soft() const { return neighbor_habitat_ + forced_ + target_; }

    /// True if cell i is untreated in year t although its forced-treatment
    /// row requires it.
    bool forced_violated(int i, int t) const {
        double habitat_part = 0.0;
        return local_rows(i, t, habitat_part) > 0.0;
    }

private:
    std::size_t at(int cell, int year) const {
        return static_cast<std::size_t>(year) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(cell);
    }
    bool mature(int i, int t) const { return age_[at(i, t)] >= land_.cell(i).mature_threshold; }
    bool high(int i, int t) const { return age_[at(i, t)] >= land_.cell(i).high_threshold; }
    bool old(int i, int t) const { return age_[at(i, t)] >= land_.cell(i).max_tfi; }

    // Neighbour-habitat and forced-treatment rows of cell i in year t (t >= 1).
    double local_rows(int i, int t, double& habitat_part) const;
    double shortfall(int t) const;
    void pair_counts(int i, int t, int sign);

    const Landscape& land_;
    const SettingSpec& setting_;
    Schedule schedule_;
    int n_;
    int horizon_;
    std::vector<int> age_;
    std::vector<int> high_conn_;
    std::vector<int> habitat_conn_;
    std::vector<double> area_;
    long objective_ = 0;
    double neighbor_habitat_ = 0.0;
    double forced_ = 0.0;
    double target_ = 0.0;

    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<std::pair<int, int>> touched_;
};

}  // namespace fueltreat
