#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "fueltreat/solver.hpp"
#include "support.hpp"

using namespace fueltreat;
using testing::enumerate_all;
using testing::line;

namespace {

void check_hard_limits(const Landscape& l, const Schedule& s, const SettingSpec& spec) {
    const auto r = check(l, s, spec);
    CHECK(r.count(ConstraintKind::budget) == 0);
    CHECK(r.count(ConstraintKind::min_tfi) == 0);
}

AnnealConfig quick_anneal(std::uint64_t seed) {
    AnnealConfig c;
    c.iterations = 20000;
    c.cooling_rate = 0.9997;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("trivial instances") {
    const auto r = solve_exact(line({0}), SettingSpec::table(4, 0, 2, 0.1), 2);
    CHECK(r.status == ExactStatus::optimal);
    CHECK(r.objective == 0);

    const auto a = solve_anneal(line({0}), SettingSpec::table(4, 0, 2, 0.1), 2, quick_anneal(1));
    CHECK(a.feasible);
    CHECK(a.objective == 0);
}

TEST_CASE("breaking a high pair with one treatment") {
    const Landscape l = line({12, 12});
    const auto spec = SettingSpec::table(4, 0, 2, 0.5);
    const auto r = solve_exact(l, spec, 2);
    REQUIRE(r.status == ExactStatus::optimal);
    CHECK(r.objective == 0);
    CHECK(r.schedule.treated_count(1) == 1);
    const auto e = enumerate_all(l, spec, 2);
    CHECK(e.feasible);
    CHECK(e.best == 0);
}

TEST_CASE("forced treatment on the 1x3 line is honoured") {
    const Landscape l = line({16, 8, 8});
    for (int setting = 1; setting <= 4; ++setting) {
        const auto spec = SettingSpec::table(setting, setting <= 2 ? 1 : 0, 2, 0.34);
        const auto r = solve_exact(l, spec, 2);
        REQUIRE(r.status == ExactStatus::optimal);
        CHECK(r.schedule.treated(0, 1));
        CHECK(check(l, r.schedule, spec).feasible());
    }
}

TEST_CASE("exact search agrees with enumeration") {
    Rng rng(101);
    int feasible = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int rows = 1 + static_cast<int>(rng.below(2));
        const int cols = 2 + static_cast<int>(rng.below(2));
        const int horizon = rows * cols <= 4 ? 3 : 2;
        const Landscape l = testing::random_grid(rng, rows, cols);
        const int setting = 1 + static_cast<int>(rng.below(4));
        const int base = setting <= 2 ? std::min(initial_habitat_connectivity(l), 2) : 0;
        const auto spec = SettingSpec::table(setting, base, horizon, 0.34);
        const auto e = enumerate_all(l, spec, horizon);
        const auto r = solve_exact(l, spec, horizon);
        CHECK((r.status == ExactStatus::optimal) == e.feasible);
        if (e.feasible) {
            ++feasible;
            CHECK(r.objective == e.best);
            CHECK(objective(derive(l, r.schedule)) == r.objective);
            CHECK(check(l, r.schedule, spec).feasible());
        }
    }
    CHECK(feasible > 10);
}

TEST_CASE("relaxation ordering of exact optima on 2x2 grids") {
    Rng rng(7);
    int compared = 0;
    for (int trial = 0; trial < 15; ++trial) {
        const Landscape l = testing::random_grid(rng, 2, 2);
        const int base = initial_habitat_connectivity(l);
        long z[5] = {};
        bool all = true;
        for (int s = 1; s <= 4; ++s) {
            const auto spec = SettingSpec::table(s, base, 2, 0.5);
            const auto e = enumerate_all(l, spec, 2);
            const auto r = solve_exact(l, spec, 2);
            CHECK((r.status == ExactStatus::optimal) == e.feasible);
            if (!e.feasible) {
                all = false;
                continue;
            }
            CHECK(r.objective == e.best);
            z[s] = r.objective;
        }
        if (!all) continue;
        ++compared;
        CHECK(z[4] <= z[2]);
        CHECK(z[2] <= z[1]);
        CHECK(z[4] <= z[3]);
        CHECK(z[3] <= z[1]);
    }
    CHECK(compared > 0);
}

TEST_CASE("relabelling cells does not change the optimum") {
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const Landscape l = testing::random_grid(rng, 2, 3);
        const int setting = 1 + static_cast<int>(rng.below(4));
        const auto spec =
            SettingSpec::table(setting, std::min(2, initial_habitat_connectivity(l)), 3, 0.34);
        std::vector<int> order(6);
        std::iota(order.begin(), order.end(), 0);
        for (int k = 5; k > 0; --k) std::swap(order[static_cast<std::size_t>(k)], order[rng.below(k + 1)]);
        const auto a = solve_exact(l, spec, 3);
        const auto b = solve_exact(l.permuted(order), spec, 3);
        CHECK(a.status == b.status);
        if (a.status == ExactStatus::optimal) CHECK(a.objective == b.objective);
    }
}

TEST_CASE("exact search limits") {
    const Landscape big = build_grid(10, 10, CellParams{});
    CHECK_THROWS_AS(solve_exact(big, SettingSpec::table(4, 0, 2, 0.1), 2), std::invalid_argument);
    ExactOptions opt;
    opt.cap = 400;
    CHECK_NOTHROW(solve_exact(build_grid(3, 3, CellParams{}), SettingSpec::table(4, 0, 2, 0.1), 2, opt));

    // An incumbent limit at the optimum leaves nothing strictly better.
    const Landscape l = line({12, 12, 12});
    const auto spec = SettingSpec::table(4, 0, 2, 0.34);
    const auto r = solve_exact(l, spec, 2);
    REQUIRE(r.status == ExactStatus::optimal);
    opt = ExactOptions{};
    opt.incumbent_limit = r.objective;
    CHECK(solve_exact(l, spec, 2, opt).status == ExactStatus::infeasible);
}

TEST_CASE("greedy start respects budget and minimum interval") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Landscape l = testing::random_grid(rng, 6, 6);
        for (int s = 1; s <= 4; ++s) {
            const auto spec = SettingSpec::table(s, initial_habitat_connectivity(l), 8, 0.1);
            check_hard_limits(l, greedy_schedule(l, spec, 8), spec);
        }
    }
}

TEST_CASE("greedy start brings treatments forward when a year would overflow") {
    // Six cells reach their deadline together in year 2 with room for three a
    // year, so three must go in year 1.
    const Landscape l = testing::grid_with_ages(2, 3, {15, 15, 15, 15, 15, 15});
    const auto spec = SettingSpec::table(4, 0, 2, 0.5);
    const Schedule s = greedy_schedule(l, spec, 2);
    CHECK(check(l, s, spec).feasible());
    CHECK(s.treated_count(1) == 3);
    CHECK(s.total_treatments() >= 5);
}

TEST_CASE("annealing") {
    Rng rng(12);
    int gaps = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const Landscape l = testing::random_grid(rng, 2, 3);
        const int setting = 1 + trial % 4;
        const auto spec = SettingSpec::table(setting, std::min(2, initial_habitat_connectivity(l)), 4, 0.34);
        const auto ex = solve_exact(l, spec, 4);
        const auto an = solve_anneal(l, spec, 4, quick_anneal(static_cast<std::uint64_t>(trial)));
        check_hard_limits(l, an.schedule, spec);
        CHECK(objective(derive(l, an.schedule)) == an.objective);
        CHECK(check(l, an.schedule, spec).feasible() == an.feasible);
        if (an.feasible) {
            REQUIRE(ex.status == ExactStatus::optimal);
            CHECK(an.objective >= ex.objective);
            gaps += static_cast<int>(an.objective - ex.objective);
        }
        for (std::size_t k = 1; k < an.best_trace.size(); ++k) {
            REQUIRE(an.best_trace[k] <= an.best_trace[k - 1]);
        }
    }
    MESSAGE("total annealing gap to exact optima: " << gaps);
}

TEST_CASE("annealing is deterministic for a seed") {
    Rng rng(4);
    const Landscape l = testing::random_grid(rng, 5, 5);
    const auto spec = SettingSpec::table(1, initial_habitat_connectivity(l), 6, 0.1);
    const auto a = solve_anneal(l, spec, 6, quick_anneal(9));
    const auto b = solve_anneal(l, spec, 6, quick_anneal(9));
    CHECK(a.schedule == b.schedule);
    CHECK(a.objective == b.objective);
    CHECK(a.best_trace == b.best_trace);
    CHECK(a.best_trace.size() == 20000);
}

TEST_CASE("annealing configuration checks") {
    AnnealConfig c;
    c.cooling_rate = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = AnnealConfig{};
    c.iterations = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = AnnealConfig{};
    c.initial_temperature = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = AnnealConfig{};
    CHECK_THROWS_AS(solve_anneal(line({1}), SettingSpec::table(4, 0, 2, 0.1), 3, c), std::invalid_argument);
}
