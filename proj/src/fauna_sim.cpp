#include "fueltreat/fauna_sim.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace fueltreat {

int OccupancyState::count(int year) const {
    int total = 0;
    for (int i = 0; i < cells; ++i) total += is_occupied(i, year) ? 1 : 0;
    return total;
}

OccupancyState simulate_occupancy(const Landscape& landscape, const Schedule& schedule,
                                  const DerivedState& state, const OccupancyRules& rules) {
    const int n = landscape.size();
    const int horizon = schedule.horizon();
    if (schedule.cells() != n || state.cells != n || state.horizon != horizon) {
        throw std::invalid_argument("landscape, schedule and derived state dimensions differ");
    }
    OccupancyState occ;
    occ.cells = n;
    occ.horizon = horizon;
    occ.occupied.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(horizon + 1), 0);
    auto slot = [n](int i, int t) {
        return static_cast<std::size_t>(t) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    };
    for (int i = 0; i < n; ++i) occ.occupied[slot(i, 0)] = state.is_mature(i, 0) ? 1 : 0;

    std::vector<std::uint8_t> spread(static_cast<std::size_t>(n));
    for (int t = 1; t <= horizon; ++t) {
        // Relocation.
        for (int i = 0; i < n; ++i) {
            if (!occ.occupied[slot(i, t - 1)] || !schedule.treated(i, t)) continue;
            for (int j : landscape.neighbors(i)) {
                if (state.is_mature(j, t)) occ.occupied[slot(j, t)] = 1;
            }
        }
        // Persistence.
        for (int i = 0; i < n; ++i) {
            if (occ.occupied[slot(i, t - 1)] && !schedule.treated(i, t) && state.is_mature(i, t)) {
                occ.occupied[slot(i, t)] = 1;
            }
        }
        if (!rules.recolonise) continue;
        // Recolonisation, one adjacency step from the post-persistence snapshot.
        for (int i = 0; i < n; ++i) {
            spread[static_cast<std::size_t>(i)] = 0;
            if (occ.occupied[slot(i, t)] || !state.is_mature(i, t)) continue;
            for (int j : landscape.neighbors(i)) {
                if (occ.occupied[slot(j, t)] && state.is_mature(j, t)) {
                    spread[static_cast<std::size_t>(i)] = 1;
                    break;
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            if (spread[static_cast<std::size_t>(i)]) occ.occupied[slot(i, t)] = 1;
        }
    }
    return occ;
}

double occupancy_fraction(const OccupancyState& occupancy, int year) {
    if (year < 0 || year > occupancy.horizon) {
        throw std::out_of_range("year " + std::to_string(year) + " outside 0.." +
                                std::to_string(occupancy.horizon));
    }
    if (occupancy.cells == 0) return 0.0;
    return static_cast<double>(occupancy.count(year)) / static_cast<double>(occupancy.cells);
}

void write_occupancy(std::ostream& out, const OccupancyState& occupancy) {
    for (int t = 0; t <= occupancy.horizon; ++t) {
        for (int i = 0; i < occupancy.cells; ++i) {
            if (i > 0) out << ' ';
            out << (occupancy.is_occupied(i, t) ? '1' : '0');
        }
        out << '\n';
    }
}

}  // namespace fueltreat
