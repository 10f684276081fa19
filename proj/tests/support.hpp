#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fueltreat/landscape.hpp"
#include "fueltreat/rng.hpp"
#include "fueltreat/schedule.hpp"
#include "fueltreat/schedule_eval.hpp"

namespace testing {

using namespace fueltreat;

inline std::string data_path(const std::string& name) { return std::string(FUELTREAT_TEST_DATA) + "/" + name; }

// Grid with the default thresholds (8/12, 2/16) and the given row-major ages.
inline Landscape grid_with_ages(int rows, int cols, const std::vector<int>& ages, CellParams params = {}) {
    return build_grid(rows, cols, params).with_initial_ages(ages);
}

inline Landscape line(const std::vector<int>& ages) {
    return grid_with_ages(1, static_cast<int>(ages.size()), ages);
}

inline Landscape random_grid(Rng& rng, int rows, int cols, int max_age = 16) {
    std::vector<int> ages(static_cast<std::size_t>(rows * cols));
    for (auto& a : ages) a = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_age + 1)));
    return grid_with_ages(rows, cols, ages);
}

inline Schedule schedule_from_bits(int cells, int horizon, std::uint64_t bits) {
    Schedule s(cells, horizon);
    for (int t = 1; t <= horizon; ++t) {
        for (int i = 0; i < cells; ++i) {
            if ((bits >> ((t - 1) * cells + i)) & 1U) s.set(i, t, true);
        }
    }
    return s;
}

struct Enumeration {
    bool feasible = false;
    long best = std::numeric_limits<long>::max();
};

// Exhaustive search over every treatment matrix, filtered by check().
inline Enumeration enumerate_all(const Landscape& l, const SettingSpec& setting, int horizon) {
    Enumeration e;
    const int bits = l.size() * horizon;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
        const Schedule s = schedule_from_bits(l.size(), horizon, code);
        const DerivedState st = derive(l, s);
        if (!check(l, s, st, setting).feasible()) continue;
        e.feasible = true;
        e.best = std::min(e.best, objective(st));
    }
    return e;
}

}  // namespace testing
