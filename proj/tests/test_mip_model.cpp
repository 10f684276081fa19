#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "fueltreat/mip_model.hpp"
#include "fueltreat/solver.hpp"
#include "support.hpp"

using namespace fueltreat;
using testing::line;

namespace {

// Row content keyed by name, with terms keyed by variable name.
struct RowImage {
    std::map<std::string, double> terms;
    Sense sense;
    double rhs;
    int equation;
    bool operator==(const RowImage&) const = default;
};

std::map<std::string, RowImage> image(const MipInstance& m) {
    std::map<std::string, RowImage> out;
    for (const auto& r : m.rows()) {
        RowImage img{{}, r.sense, r.rhs, r.equation};
        for (const auto& [id, c] : r.terms) img.terms[m.variables()[static_cast<std::size_t>(id)].name] += c;
        out[r.name] = img;
    }
    return out;
}

std::map<std::string, double> objective_image(const MipInstance& m) {
    std::map<std::string, double> out;
    for (const auto& [id, c] : m.objective()) out[m.variables()[static_cast<std::size_t>(id)].name] += c;
    return out;
}

MipInstance round_trip(const MipInstance& m) {
    std::stringstream ss;
    write_mps(ss, m);
    return read_mps(ss);
}

}  // namespace

TEST_CASE("degenerate single cell") {
    const auto m = build_mip(line({0}), SettingSpec::table(4, 0, 1, 0.1), 1);
    CHECK(m.count_prefix("HC") == 0);
    CHECK(m.count_prefix("HB") == 0);
    CHECK(m.objective().empty());
    CHECK(m.isolated_cells == std::vector<int>{0});
    CHECK(m.count_rows(18) == 0);
    CHECK(objective_value(m, lift_schedule(m, line({0}), Schedule(1, 1))) == 0.0);
}

TEST_CASE("variable and row counts") {
    const Landscape l = testing::grid_with_ages(2, 2, {3, 9, 13, 16});
    const auto m1 = build_mip(l, SettingSpec::table(1, 2, 2, 0.5), 2);
    CHECK(m1.count_prefix("HC") == 8);
    CHECK(m1.count_prefix("HB") == 8);
    CHECK(m1.count_prefix("x") == 8);
    CHECK(m1.count_prefix("A") == 12);
    CHECK(m1.count_prefix("O") == 8);
    CHECK(m1.count_variables(VarKind::continuous) == 12);
    CHECK(m1.big_m == 16 + 2 + 1);
    CHECK(m1.count_rows(2) == 2);
    CHECK(m1.count_rows(3) == 4);
    CHECK(m1.count_rows(9) == 8);
    CHECK(m1.count_rows(12) == 8);
    CHECK(m1.count_rows(15) == 2);
    CHECK(m1.count_rows(16) == 8);
    CHECK(m1.count_rows(18) == 8);
    CHECK(m1.count_rows(19) == 8);

    const auto m4 = build_mip(l, SettingSpec::table(4, 2, 2, 0.5), 2);
    CHECK(m4.count_rows(12) == 0);
    CHECK(m4.count_rows(15) == 0);
    CHECK(m4.omitted_target_years == std::vector<int>{1, 2});
    CHECK(m1.rows().size() - m4.rows().size() ==
          static_cast<std::size_t>(m1.count_rows(12) + m1.count_rows(15)));
    CHECK(m1.variables().size() == m4.variables().size());
}

TEST_CASE("model construction errors") {
    const Landscape l = line({1, 2});
    CHECK_THROWS_AS(build_mip(l, SettingSpec::table(4, 0, 2, 0.1), 3), std::invalid_argument);
    CHECK_THROWS_AS(build_mip(l, SettingSpec::table(1, 2, 2, 0.1), 2), std::invalid_argument);  // 1 pair only
    CHECK_NOTHROW(build_mip(l, SettingSpec::table(1, 1, 2, 0.1), 2));
}

TEST_CASE("MPS integer markers enclose exactly the binaries") {
    const Landscape l = line({8, 12});
    const auto m = build_mip(l, SettingSpec::table(1, 1, 1, 0.5), 1);
    std::stringstream ss;
    write_mps(ss, m);
    const std::string text = ss.str();
    CHECK(text.find("ENDATA") != std::string::npos);

    std::istringstream in(text);
    std::string raw;
    bool in_columns = false, in_int = false;
    std::map<std::string, bool> seen_as_int;
    while (std::getline(in, raw)) {
        if (raw == "COLUMNS") { in_columns = true; continue; }
        if (raw == "RHS" || raw == "BOUNDS" || raw == "ENDATA") in_columns = false;
        if (!in_columns) continue;
        if (raw.find("'INTORG'") != std::string::npos) { in_int = true; continue; }
        if (raw.find("'INTEND'") != std::string::npos) { in_int = false; continue; }
        std::istringstream fields(raw);
        std::string name;
        fields >> name;
        seen_as_int[name] = in_int;
    }
    int binaries = 0;
    for (const auto& v : m.variables()) {
        REQUIRE(seen_as_int.count(v.name) == 1);
        CHECK(seen_as_int[v.name] == (v.kind == VarKind::binary));
        binaries += v.kind == VarKind::binary;
    }
    CHECK(seen_as_int.size() == m.variables().size());
    CHECK(binaries == m.count_variables(VarKind::binary));
}

TEST_CASE("MPS round trip preserves the model") {
    Rng rng(31);
    for (int setting = 1; setting <= 4; ++setting) {
        const Landscape l = testing::random_grid(rng, 2, 3);
        const auto m = build_mip(l, SettingSpec::table(setting, 3, 3, 0.34), 3);
        const auto back = round_trip(m);
        CHECK(back.variables().size() == m.variables().size());
        for (std::size_t k = 0; k < m.variables().size(); ++k) {
            const auto& a = m.variables()[k];
            const int id = back.find(a.name);
            REQUIRE(id >= 0);
            const auto& b = back.variables()[static_cast<std::size_t>(id)];
            CHECK(a.kind == b.kind);
            CHECK(a.lower == b.lower);
            CHECK(a.upper == b.upper);
        }
        CHECK(image(back) == image(m));
        CHECK(objective_image(back) == objective_image(m));
        CHECK(back.big_m == m.big_m);
        CHECK(back.horizon == m.horizon);
    }
}

TEST_CASE("schedule feasibility matches the model rows exhaustively") {
    // With x fixed, the rows pin ages and every indicator except HC, which
    // only has a lower bound; the lifted point is therefore the cheapest
    // completion and the model is feasible for x exactly when it is.
    Rng rng(2);
    int feasible_seen = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const Landscape l = testing::random_grid(rng, 2, 2);
        for (int setting = 1; setting <= 4; ++setting) {
            const auto spec = SettingSpec::table(setting, static_cast<int>(rng.below(3)), 2, 0.5);
            const auto m = build_mip(l, spec, 2);
            for (std::uint64_t code = 0; code < 256; ++code) {
                const Schedule s = testing::schedule_from_bits(4, 2, code);
                const auto point = lift_schedule(m, l, s);
                const bool ok = check(l, s, spec).feasible();
                CHECK(violated_rows(m, point).empty() == ok);
                CHECK(objective_value(m, point) == static_cast<double>(objective(derive(l, s))));
                CHECK(schedule_from_point(m, 4, point) == s);
                feasible_seen += ok;
            }
        }
    }
    CHECK(feasible_seen > 0);
}

TEST_CASE("row violations carry the equation of the broken rule") {
    const Landscape l = line({16, 8, 8});
    const auto spec = SettingSpec::table(4, 0, 2, 1.0);
    const auto m = build_mip(l, spec, 2);
    const auto v = violated_rows(m, lift_schedule(m, l, Schedule(3, 2)));
    REQUIRE_FALSE(v.empty());
    for (const auto& r : v) {
        REQUIRE(r.row >= 0);
        CHECK(m.rows()[static_cast<std::size_t>(r.row)].equation == 18);
    }

    // A fractional binary is reported against its variable.
    Schedule s(3, 2);
    s.set(0, 1, true);
    auto point = lift_schedule(m, l, s);
    CHECK(violated_rows(m, point).empty());
    point[static_cast<std::size_t>(m.id("H_1_1"))] = 0.5;
    const auto frac = violated_rows(m, point);
    const bool flagged = std::any_of(frac.begin(), frac.end(), [&](const RowViolation& r) {
        return r.row == -1 - m.id("H_1_1");
    });
    CHECK(flagged);
}

TEST_CASE("solution import") {
    const Landscape l = line({3, 5});
    const auto spec = SettingSpec::table(4, 0, 2, 1.0);
    const auto m = build_mip(l, spec, 2);

    SUBCASE("absent variables default to zero") {
        // Ages grow every untreated year, so the all-zero point is never
        // feasible; listing only the nonzero entries of a valid point is.
        std::istringstream empty("");
        CHECK(import_solution(m, empty).status == SolutionStatus::infeasible);

        Schedule s(2, 2);
        s.set(1, 1, true);
        const auto point = lift_schedule(m, l, s);
        std::stringstream sparse;
        for (std::size_t k = 0; k < point.size(); ++k) {
            if (point[k] != 0.0) sparse << m.variables()[k].name << ' ' << point[k] << '\n';
        }
        const auto sol = import_solution(m, sparse);
        CHECK(sol.status == SolutionStatus::feasible);
        CHECK(sol.values == point);
        CHECK(sol.objective_value == 0.0);
        CHECK_FALSE(sol.claimed_objective.has_value());
    }

    SUBCASE("exact solution survives serialisation") {
        const Landscape hot = line({12, 12, 12});
        const auto hs = SettingSpec::table(4, 0, 2, 0.34);
        const auto hm = build_mip(hot, hs, 2);
        const auto ex = solve_exact(hot, hs, 2);
        REQUIRE(ex.status == ExactStatus::optimal);
        const auto point = lift_schedule(hm, hot, ex.schedule);
        std::stringstream ss;
        write_solution(ss, hm, point);
        const auto sol = import_solution(hm, ss);
        CHECK(sol.status == SolutionStatus::feasible);
        CHECK(sol.objective_value == static_cast<double>(ex.objective));
        CHECK(sol.claimed_objective.has_value());
        CHECK_FALSE(sol.objective_mismatch);
        CHECK(schedule_from_point(hm, 3, sol.values) == ex.schedule);
    }

    SUBCASE("budget breach is flagged") {
        const auto tight = SettingSpec::table(4, 0, 2, 0.5);
        const auto mt = build_mip(l, tight, 2);
        Schedule s(2, 2);
        s.set(0, 1, true);
        s.set(1, 1, true);
        REQUIRE(check(l, s, tight).count(ConstraintKind::budget) == 1);
        std::stringstream ss;
        write_solution(ss, mt, lift_schedule(mt, l, s));
        const auto sol = import_solution(mt, ss);
        CHECK(sol.status == SolutionStatus::infeasible);
        REQUIRE(sol.violations.size() == 1);
        CHECK(mt.rows()[static_cast<std::size_t>(sol.violations[0].row)].name == "E2_1");
    }

    SUBCASE("claimed objective disagreeing with the point") {
        std::istringstream in("# Objective value = 7\nx_0_1 0\n");
        const auto sol = import_solution(m, in);
        CHECK(sol.objective_mismatch);
    }

    SUBCASE("malformed input") {
        std::istringstream unknown("y_0_1 1\n");
        CHECK_THROWS_AS(import_solution(m, unknown), std::invalid_argument);
        std::istringstream junk("x_0_1 abc\n");
        CHECK_THROWS_AS(import_solution(m, junk), std::invalid_argument);
        std::istringstream missing("x_0_1\n");
        CHECK_THROWS_AS(import_solution(m, missing), std::invalid_argument);
        CHECK_THROWS(import_solution_file(m, "/nonexistent/solution.txt"));
    }
}

TEST_CASE("MPS reader rejects broken files") {
    std::istringstream no_end("NAME x\nROWS\n N OBJ\nCOLUMNS\n");
    CHECK_THROWS_AS(read_mps(no_end), std::invalid_argument);
    std::istringstream bad_row("NAME x\nROWS\n Q R1\nENDATA\n");
    CHECK_THROWS_AS(read_mps(bad_row), std::invalid_argument);
    std::istringstream unknown_row("NAME x\nROWS\n N OBJ\nCOLUMNS\n v R9 1\nENDATA\n");
    CHECK_THROWS_AS(read_mps(unknown_row), std::invalid_argument);
}

TEST_CASE("habitat target ramp") {
    SUBCASE("already feasible at the full target") {
        const Landscape l = line({9, 9, 0});
        const auto r = ramp_targets(l, 1, 3, [](const std::vector<int>&) { return true; });
        CHECK(r.feasible);
        CHECK(r.relaxed_years == 0);
        CHECK(r.targets == std::vector<int>{1, 1, 1});
    }

    SUBCASE("ramp series shape") {
        const Landscape l = line({9, 9, 0});
        std::vector<std::vector<int>> tried;
        const auto r = ramp_targets(l, 2, 3, [&](const std::vector<int>& g) {
            tried.push_back(g);
            return tried.size() == 3;
        });
        CHECK(r.relaxed_years == 2);
        CHECK(r.targets == std::vector<int>{0, 0, 2});
        CHECK(tried[0] == std::vector<int>{2, 2, 2});
        CHECK(tried[1] == std::vector<int>{0, 2, 2});
        CHECK_THROWS_AS(ramp_targets(l, 3, 3, [](const std::vector<int>&) { return true; }),
                        std::invalid_argument);
        const auto none = ramp_targets(l, 2, 3, [](const std::vector<int>&) { return false; });
        CHECK_FALSE(none.feasible);
        CHECK(none.relaxed_years == 3);
    }

    SUBCASE("every cell past its maximum interval") {
        // All four cells are old with mature neighbours, so year 1 must treat
        // all of them and every mature pair disappears.
        const Landscape l = testing::grid_with_ages(2, 2, {17, 17, 17, 17});
        const int base = initial_habitat_connectivity(l);
        CHECK(base == 4);
        auto solve = [&](const std::vector<int>& g) {
            SettingSpec s = SettingSpec::table(2, base, 2, 1.0);
            s.habitat_target = g;
            return solve_exact(l, s, 2).status == ExactStatus::optimal;
        };
        const auto r = ramp_targets(l, base, 2, solve);
        CHECK(r.relaxed_years >= 1);
        CHECK(r.feasible);
        for (int t = 1; t <= r.relaxed_years; ++t) CHECK(r.targets[static_cast<std::size_t>(t - 1)] == 0);
    }

    SUBCASE("illustration landscape target") {
        const Landscape l = load_landscape(testing::data_path("illustration_10x10.json"));
        CHECK(initial_habitat_connectivity(l) == 39);
    }
}
