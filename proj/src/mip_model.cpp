#include "fueltreat/mip_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fueltreat {

int MipInstance::add_variable(std::string var_name, VarKind kind) {
    const int id = static_cast<int>(vars_.size());
    auto [it, inserted] = index_.emplace(var_name, id);
    if (!inserted) throw std::invalid_argument("duplicate variable " + var_name);
    Variable v;
    v.name = std::move(var_name);
    v.kind = kind;
    if (kind == VarKind::binary) v.upper = 1.0;
    vars_.push_back(std::move(v));
    return id;
}

void MipInstance::add_row(Row row) {
    for (const auto& [var, coef] : row.terms) {
        (void)coef;
        if (var < 0 || var >= static_cast<int>(vars_.size())) {
            throw std::invalid_argument("row " + row.name + " references an undeclared variable");
        }
    }
    rows_.push_back(std::move(row));
}

int MipInstance::find(const std::string& var_name) const {
    const auto it = index_.find(var_name);
    return it == index_.end() ? -1 : it->second;
}

int MipInstance::id(const std::string& var_name) const {
    const int k = find(var_name);
    if (k < 0) throw std::out_of_range("unknown variable " + var_name);
    return k;
}

int MipInstance::count_rows(int equation) const {
    return static_cast<int>(std::count_if(rows_.begin(), rows_.end(),
                                          [equation](const Row& r) { return r.equation == equation; }));
}

int MipInstance::count_variables(VarKind kind) const {
    return static_cast<int>(std::count_if(vars_.begin(), vars_.end(),
                                          [kind](const Variable& v) { return v.kind == kind; }));
}

int MipInstance::count_prefix(const std::string& prefix) const {
    return static_cast<int>(std::count_if(vars_.begin(), vars_.end(), [&](const Variable& v) {
        return v.name.size() > prefix.size() && v.name.compare(0, prefix.size(), prefix) == 0 &&
               v.name[prefix.size()] == '_';
    }));
}

namespace {

std::string join(const char* prefix, std::initializer_list<int> idx) {
    std::string s = prefix;
    for (int k : idx) {
        s += '_';
        s += std::to_string(k);
    }
    return s;
}

}  // namespace

std::string x_name(int i, int t) { return join("x", {i, t}); }
std::string age_name(int i, int t) { return join("A", {i, t}); }
std::string high_name(int i, int t) { return join("H", {i, t}); }
std::string mature_name(int i, int t) { return join("MT", {i, t}); }
std::string old_name(int i, int t) { return join("O", {i, t}); }
std::string high_pair_name(int i, int j, int t) { return join("HC", {i, j, t}); }
std::string habitat_pair_name(int i, int j, int t) { return join("HB", {i, j, t}); }

double big_m_for(const Landscape& landscape, int horizon) {
    return static_cast<double>(landscape.max_initial_age() + horizon + 1);
}

MipInstance build_mip(const Landscape& landscape, const SettingSpec& setting, int horizon) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    setting.validate();
    if (setting.horizon() != horizon) {
        throw std::invalid_argument("setting horizon does not match model horizon");
    }
    const auto& pairs = landscape.connection_pairs();
    for (int t = 1; t <= horizon; ++t) {
        if (setting.target(t) > static_cast<int>(pairs.size())) {
            throw std::invalid_argument("habitat target G_" + std::to_string(t) +
                                        " exceeds the number of adjacent pairs");
        }
    }

    const int n = landscape.size();
    const double big_m = big_m_for(landscape, horizon);
    MipInstance mip;
    mip.big_m = big_m;
    mip.horizon = horizon;

    // Variable blocks, declared in a fixed order.
    for (int t = 1; t <= horizon; ++t)
        for (int i = 0; i < n; ++i) mip.add_variable(x_name(i, t), VarKind::binary);
    for (int t = 0; t <= horizon; ++t)
        for (int i = 0; i < n; ++i) mip.add_variable(age_name(i, t), VarKind::continuous);
    for (int t = 1; t <= horizon; ++t)
        for (int i = 0; i < n; ++i) mip.add_variable(high_name(i, t), VarKind::binary);
    for (int t = 1; t <= horizon; ++t)
        for (const auto& [i, j] : pairs) mip.add_variable(high_pair_name(i, j, t), VarKind::binary);
    for (int t = 1; t <= horizon; ++t)
        for (int i = 0; i < n; ++i) mip.add_variable(mature_name(i, t), VarKind::binary);
    for (int t = 1; t <= horizon; ++t)
        for (const auto& [i, j] : pairs) mip.add_variable(habitat_pair_name(i, j, t), VarKind::binary);
    for (int t = 0; t < horizon; ++t)
        for (int i = 0; i < n; ++i) mip.add_variable(old_name(i, t), VarKind::binary);

    auto x = [&](int i, int t) { return mip.id(x_name(i, t)); };
    auto age = [&](int i, int t) { return mip.id(age_name(i, t)); };
    auto high = [&](int i, int t) { return mip.id(high_name(i, t)); };
    auto mature = [&](int i, int t) { return mip.id(mature_name(i, t)); };
    auto old = [&](int i, int t) { return mip.id(old_name(i, t)); };
    auto row = [&](int eq, std::initializer_list<int> idx, std::vector<std::pair<int, double>> terms,
                   Sense sense, double rhs) {
        mip.add_row(Row{join(("E" + std::to_string(eq)).c_str(), idx), eq, std::move(terms), sense, rhs});
    };

    for (int t = 1; t <= horizon; ++t) {
        for (const auto& [i, j] : pairs) mip.objective().emplace_back(mip.id(high_pair_name(i, j, t)), 1.0);
    }

    // Budget.
    const double limit = budget_limit(landscape, setting);
    for (int t = 1; t <= horizon; ++t) {
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < n; ++i) terms.emplace_back(x(i, t), landscape.cell(i).area);
        row(2, {t}, std::move(terms), Sense::le, limit);
    }
    // Initial ages.
    for (int i = 0; i < n; ++i) {
        row(3, {i}, {{age(i, 0), 1.0}}, Sense::eq, landscape.cell(i).initial_age);
    }
    for (int t = 1; t <= horizon; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto& c = landscape.cell(i);
            // Age recursion.
            row(4, {i, t}, {{age(i, t), 1.0}, {age(i, t - 1), -1.0}, {x(i, t), big_m}}, Sense::ge, 1.0);
            row(5, {i, t}, {{age(i, t), 1.0}, {x(i, t), big_m}}, Sense::le, big_m);
            row(6, {i, t}, {{age(i, t), 1.0}, {age(i, t - 1), -1.0}}, Sense::le, 1.0);
            // High fuel load indicator.
            row(7, {i, t}, {{age(i, t), 1.0}, {high(i, t), -big_m}}, Sense::le, c.high_threshold - 1.0);
            row(8, {i, t}, {{age(i, t), 1.0}, {high(i, t), -static_cast<double>(c.high_threshold)}},
                Sense::ge, 0.0);
        }
        for (const auto& [i, j] : pairs) {
            row(9, {i, j, t},
                {{high(i, t), 1.0}, {high(j, t), 1.0}, {mip.id(high_pair_name(i, j, t)), -1.0}}, Sense::le,
                1.0);
        }
        for (int i = 0; i < n; ++i) {
            const auto& c = landscape.cell(i);
            row(10, {i, t}, {{age(i, t), 1.0}, {mature(i, t), -big_m}}, Sense::le, c.mature_threshold - 1.0);
            row(11, {i, t}, {{age(i, t), 1.0}, {mature(i, t), -static_cast<double>(c.mature_threshold)}},
                Sense::ge, 0.0);
        }
        if (setting.require_neighbor_habitat) {
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<int, double>> terms;
                for (int j : landscape.neighbors(i)) terms.emplace_back(mature(j, t), 1.0);
                terms.emplace_back(x(i, t), -1.0);
                row(12, {i, t}, std::move(terms), Sense::ge, 0.0);
            }
        }
        for (const auto& [i, j] : pairs) {
            const int hb = mip.id(habitat_pair_name(i, j, t));
            row(13, {i, j, t}, {{mature(i, t), 1.0}, {mature(j, t), 1.0}, {hb, -1.0}}, Sense::le, 1.0);
            row(14, {i, j, t}, {{mature(i, t), 1.0}, {mature(j, t), 1.0}, {hb, -2.0}}, Sense::ge, 0.0);
        }
        if (setting.target(t) > 0) {
            std::vector<std::pair<int, double>> terms;
            for (const auto& [i, j] : pairs) terms.emplace_back(mip.id(habitat_pair_name(i, j, t)), 1.0);
            row(15, {t}, std::move(terms), Sense::ge, setting.target(t));
        } else {
            mip.omitted_target_years.push_back(t);
        }
    }
    // Old indicator over t = 0..T-1.
    for (int t = 0; t < horizon; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto& c = landscape.cell(i);
            row(16, {i, t}, {{age(i, t), 1.0}, {old(i, t), -big_m}}, Sense::le, c.max_tfi - 1.0);
            row(17, {i, t}, {{age(i, t), 1.0}, {old(i, t), -static_cast<double>(c.max_tfi)}}, Sense::ge,
                0.0);
        }
    }
    for (int i = 0; i < n; ++i) {
        if (landscape.neighbors(i).empty()) mip.isolated_cells.push_back(i);
    }
    for (int t = 1; t <= horizon; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto nb = landscape.neighbors(i);
            if (nb.empty()) continue;
            // Forced treatment when old and a mature neighbour exists.
            std::vector<std::pair<int, double>> terms{{old(i, t - 1), 1.0}};
            const double w = 1.0 / static_cast<double>(nb.size());
            for (int j : nb) terms.emplace_back(mature(j, t), w);
            terms.emplace_back(x(i, t), -1.0);
            row(18, {i, t}, std::move(terms), Sense::le, 1.0);
        }
        for (int i = 0; i < n; ++i) {
            const auto& c = landscape.cell(i);
            row(19, {i, t}, {{age(i, t - 1), 1.0}, {x(i, t), -static_cast<double>(c.min_tfi)}}, Sense::ge,
                0.0);
        }
    }
    return mip;
}

std::vector<double> lift_schedule(const MipInstance& instance, const Landscape& landscape,
                                  const Schedule& schedule) {
    const DerivedState state = derive(landscape, schedule);
    const int n = landscape.size();
    const int horizon = schedule.horizon();
    if (instance.horizon != horizon) throw std::invalid_argument("schedule horizon differs from instance");
    std::vector<double> v(instance.variables().size(), 0.0);
    auto put = [&](const std::string& name, double value) { v[static_cast<std::size_t>(instance.id(name))] = value; };
    for (int t = 0; t <= horizon; ++t) {
        for (int i = 0; i < n; ++i) {
            put(age_name(i, t), state.age_of(i, t));
            if (t >= 1) {
                put(x_name(i, t), schedule.treated(i, t) ? 1.0 : 0.0);
                put(high_name(i, t), state.is_high(i, t) ? 1.0 : 0.0);
                put(mature_name(i, t), state.is_mature(i, t) ? 1.0 : 0.0);
            }
            if (t < horizon) put(old_name(i, t), state.is_old(i, t) ? 1.0 : 0.0);
        }
        if (t >= 1) {
            for (const auto& [i, j] : landscape.connection_pairs()) {
                put(high_pair_name(i, j, t), (state.is_high(i, t) && state.is_high(j, t)) ? 1.0 : 0.0);
                put(habitat_pair_name(i, j, t), (state.is_mature(i, t) && state.is_mature(j, t)) ? 1.0 : 0.0);
            }
        }
    }
    return v;
}

Schedule schedule_from_point(const MipInstance& instance, int cells, const std::vector<double>& values) {
    Schedule s(cells, instance.horizon);
    for (int t = 1; t <= instance.horizon; ++t) {
        for (int i = 0; i < cells; ++i) {
            s.set(i, t, std::lround(values.at(static_cast<std::size_t>(instance.id(x_name(i, t))))) == 1);
        }
    }
    return s;
}

std::vector<RowViolation> violated_rows(const MipInstance& instance, const std::vector<double>& values,
                                        double tolerance) {
    if (values.size() != instance.variables().size()) {
        throw std::invalid_argument("value vector does not match the variable count");
    }
    std::vector<RowViolation> out;
    const auto& rows = instance.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double lhs = 0.0;
        for (const auto& [var, coef] : rows[r].terms) lhs += coef * values[static_cast<std::size_t>(var)];
        double excess = 0.0;
        switch (rows[r].sense) {
            case Sense::le: excess = lhs - rows[r].rhs; break;
            case Sense::ge: excess = rows[r].rhs - lhs; break;
            case Sense::eq: excess = std::abs(lhs - rows[r].rhs); break;
        }
        if (excess > tolerance) out.push_back(RowViolation{static_cast<int>(r), excess});
    }
    const auto& vars = instance.variables();
    for (std::size_t k = 0; k < vars.size(); ++k) {
        const double val = values[k];
        double excess = std::max(vars[k].lower - val, val - vars[k].upper);
        if (vars[k].kind == VarKind::binary) excess = std::max(excess, std::abs(val - std::round(val)));
        if (excess > tolerance) out.push_back(RowViolation{-1 - static_cast<int>(k), excess});
    }
    return out;
}

double objective_value(const MipInstance& instance, const std::vector<double>& values) {
    double z = 0.0;
    for (const auto& [var, coef] : instance.objective()) z += coef * values.at(static_cast<std::size_t>(var));
    return z;
}

RampResult ramp_targets(const Landscape& landscape, int base_target, int horizon,
                        const std::function<bool(const std::vector<int>&)>& solve_fn, int low) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (base_target < 0 || low < 0 || low > base_target) {
        throw std::invalid_argument("ramp requires 0 <= low <= base_target");
    }
    if (base_target > static_cast<int>(landscape.connection_pairs().size())) {
        throw std::invalid_argument("base target exceeds the number of adjacent pairs");
    }
    RampResult result;
    for (int k = 0; k <= horizon; ++k) {
        std::vector<int> targets(static_cast<std::size_t>(horizon), base_target);
        std::fill_n(targets.begin(), k, low);
        if (solve_fn(targets)) {
            result.relaxed_years = k;
            result.targets = std::move(targets);
            result.feasible = true;
            return result;
        }
    }
    result.relaxed_years = horizon;
    result.targets.assign(static_cast<std::size_t>(horizon), low);
    return result;
}

}  // namespace fueltreat
